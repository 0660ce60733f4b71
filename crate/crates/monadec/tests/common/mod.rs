//! Helpers shared by the acceptance tests: word enumeration, a brute-force
//! evaluation of the distinguishability formula, and the binary pipeline.

use monadec::{
    build_not_sim_parts, decide_binary, Alphabet, Certificate, ColumnLetter, MultiTapeAutomaton,
    Verdict,
};
use std::collections::{HashSet, VecDeque};

/// Every word over the alphabet's symbol indices with length at most
/// `max_len`, shortest first.
pub fn words_up_to(alphabet: &Alphabet, max_len: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for s in 0..alphabet.len() {
                let mut ext = w.clone();
                ext.push(s);
                next.push(ext);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

pub struct Decided {
    pub verdict: Verdict,
    pub not_sim: MultiTapeAutomaton,
    pub certificate: Option<Certificate>,
}

/// Full pipeline on a binary relation, keeping the distinguishability
/// automaton and certificate for later re-validation.
pub fn pipeline(r: &MultiTapeAutomaton) -> Decided {
    let parts = build_not_sim_parts(r).unwrap();
    let d = decide_binary(&parts.automaton).unwrap();
    Decided {
        verdict: d.verdict,
        not_sim: parts.automaton,
        certificate: d.certificate,
    }
}

fn col(alphabet: &Alphabet, left: Option<usize>, right: Option<usize>) -> u32 {
    alphabet
        .encode(&ColumnLetter::new(vec![left, right]).unwrap())
        .unwrap()
}

/// Runs `set` through the rest of `w` on one tape (the other already
/// exhausted) and reports whether a final state is reachable.
fn tail_accepts(
    r: &MultiTapeAutomaton,
    set: &[u32],
    w: &[usize],
    from: usize,
    w_on_left: bool,
) -> bool {
    let mut cur = set.to_vec();
    for &s in &w[from.min(w.len())..] {
        let letter = if w_on_left {
            col(r.alphabet(), Some(s), None)
        } else {
            col(r.alphabet(), None, Some(s))
        };
        cur = r.step(&cur, letter);
    }
    cur.iter().any(|&q| r.is_final(q))
}

/// Brute-force check: does any word u satisfy
///
/// (R(w,u) ∧ ¬R(w',u)) ∨ (¬R(w,u) ∧ R(w',u)) ∨
/// (R(u,w) ∧ ¬R(u,w')) ∨ (¬R(u,w) ∧ R(u,w'))
///
/// for the binary relation R? Candidate u are explored column by column;
/// a configuration records how far w and w' have been consumed (capped,
/// since past both ends the dynamics depend on u alone) plus the four
/// state sets tracking (w,u), (w',u), (u,w), (u,w'). Memoizing
/// configurations makes the search exact over all u, not just a bounded
/// prefix: the configuration space is finite, so any witness length is
/// eventually covered.
pub fn formula_has_witness(r: &MultiTapeAutomaton, w: &[usize], wp: &[usize]) -> bool {
    assert_eq!(r.arity(), 2);
    let ab = r.alphabet();
    let mm = w.len().max(wp.len());
    let init = vec![r.initial()];
    let start = (0usize, init.clone(), init.clone(), init.clone(), init);
    let mut seen = HashSet::new();
    seen.insert(start.clone());
    let mut queue = VecDeque::from([start]);
    while let Some((j, a, b, c, d)) = queue.pop_front() {
        // Stop here: u is the column sequence consumed so far.
        let acc_a = tail_accepts(r, &a, w, j, true);
        let acc_b = tail_accepts(r, &b, wp, j, true);
        let acc_c = tail_accepts(r, &c, w, j, false);
        let acc_d = tail_accepts(r, &d, wp, j, false);
        if (acc_a && !acc_b) || (!acc_a && acc_b) || (acc_c && !acc_d) || (!acc_c && acc_d) {
            return true;
        }
        if a.is_empty() && b.is_empty() && c.is_empty() && d.is_empty() {
            continue;
        }
        for s in 0..ab.len() {
            let wl = w.get(j).copied();
            let wpl = wp.get(j).copied();
            let next = (
                (j + 1).min(mm),
                r.step(&a, col(ab, wl, Some(s))),
                r.step(&b, col(ab, wpl, Some(s))),
                r.step(&c, col(ab, Some(s), wl)),
                r.step(&d, col(ab, Some(s), wpl)),
            );
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    false
}
