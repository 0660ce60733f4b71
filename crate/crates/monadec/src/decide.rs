//! The decision procedure for monadic decomposability.
//!
//! Input is the distinguishability automaton N built by
//! [`crate::notsim::build_not_sim`]. The relation it recognizes has finite
//! index exactly when N cannot "count": non-decomposability is witnessed by
//! states q, q', a final p and a state r of N such that
//!
//! * some pair (w0, v0) drives (q0, q0) to (q, q') where the first copy of N
//!   reads (w0, v0) and the second reads (v0, v0) (so w0 and v0 are
//!   distinguishable, with v0 reaching q'), and
//! * some (w, v) loops the configuration forward: from (q', q', q, q, r, r)
//!   the six copies reading (w,v), (v,v), (⊥,w), (⊥,v), (⊥,w), (⊥,v) reach
//!   (q, q', p, r, p, r).
//!
//! Pumping the loop yields an infinite family of pairwise distinguishable
//! words, so the relation cannot be a finite union of products. Conversely,
//! if no such quadruple exists the index is finite. The search enumerates
//! quadruples (q, q', p, r) in a fixed lexicographic order (p restricted to
//! final states) and answers with the first witness, so results are fully
//! deterministic; the optional thread count only splits the enumeration
//! range and publishes the minimal witness, never changing the answer.

use std::cell::Cell;
use std::collections::{HashMap, HashSet, VecDeque};
use std::rc::Rc;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use crate::automaton::MultiTapeAutomaton;
use crate::bits::BitSet;
use crate::induced::induced_binary;
use crate::notsim::build_not_sim_parts;
use crate::ops;
use crate::{Error, Result};

/// Outcome of a decomposability test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Decomposable,
    NotDecomposable,
}

impl Verdict {
    pub fn decomposable(self) -> bool {
        matches!(self, Verdict::Decomposable)
    }
}

/// A replayable witness of non-decomposability, in terms of the
/// distinguishability automaton N it was extracted from.
///
/// The states satisfy twelve run conditions, grouped as in the search: the
/// base conditions A(i)-(vi) set up the configuration and B(i)-(vi) close
/// the loop. Writing N_{x,y}(s) for the states reachable from s while one
/// tape reads x and the other y:
///
/// * A(i) q ∈ N_{w0,v0}(q0), A(ii) q' ∈ N_{v0,v0}(q0),
/// * A(iii) q ∈ N_{w1,v1}(q'), A(iv) q' ∈ N_{v1,v1}(q'),
/// * A(v) p ∈ N_{ε,w1}(q), A(vi) r ∈ N_{ε,v1}(q),
/// * B(i) q ∈ N_{w,v}(q'), B(ii) q' ∈ N_{v,v}(q'),
/// * B(iii) p ∈ N_{ε,w}(q), B(iv) r ∈ N_{ε,v}(q),
/// * B(v) p ∈ N_{ε,w}(r), B(vi) r ∈ N_{ε,v}(r),
///
/// with p final. Words are stored as sequences of symbol indices into the
/// base alphabet; paired words have equal length and all are nonempty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub q: u32,
    pub qp: u32,
    pub p: u32,
    pub r: u32,
    pub w0: Vec<usize>,
    pub v0: Vec<usize>,
    pub w1: Vec<usize>,
    pub v1: Vec<usize>,
    pub w: Vec<usize>,
    pub v: Vec<usize>,
}

/// Result of deciding one binary distinguishability automaton.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryDecision {
    pub verdict: Verdict,
    pub certificate: Option<Certificate>,
    /// 1-based rank of the accepting quadruple in the lexicographic
    /// enumeration of (q, q', p, r) with p final, or the total number of
    /// quadruples when none accepts.
    pub quadruples_examined: u64,
}

/// Per-split report for an n-ary decision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KReport {
    pub k: usize,
    pub verdict: Verdict,
    pub not_sim_states: usize,
    pub pre_projection_states: usize,
    pub quadruples_examined: u64,
}

/// Result of deciding an n-ary relation: the conjunction over every split
/// position k of the verdict for the induced binary relation R_k.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decision {
    pub verdict: Verdict,
    pub failing_k: Option<usize>,
    pub certificate: Option<Certificate>,
    pub per_k: Vec<KReport>,
}

/// Decides whether the binary relation behind the distinguishability
/// automaton `n` is monadically decomposable. `n` is the output of
/// [`crate::notsim::build_not_sim`]; decomposability holds exactly when no
/// witness quadruple exists in it.
pub fn decide_binary(n: &MultiTapeAutomaton) -> Result<BinaryDecision> {
    decide_binary_threads(n, 1)
}

/// As [`decide_binary`] with the quadruple enumeration split over
/// `threads` workers. The answer, certificate and count are identical to
/// the sequential run.
pub fn decide_binary_threads(n: &MultiTapeAutomaton, threads: usize) -> Result<BinaryDecision> {
    if n.arity() != 2 {
        return Err(Error::Arity {
            expected: 2,
            got: n.arity(),
        });
    }
    let (t, back) = ops::trim_with_map(n);
    let engine = Engine::new(&t);
    let n64 = engine.n as u64;
    let f64 = engine.finals.len() as u64;
    let total = n64 * n64 * f64 * n64;

    let pairs = engine.a1_pairs();
    let best_rank = if engine.finals.is_empty() || pairs.is_empty() {
        None
    } else if threads > 1 {
        search_parallel(&engine, &pairs, threads)?
    } else {
        let best = Cell::new(u64::MAX);
        let mut caches = Caches::default();
        search_slice(&engine, &mut caches, &pairs, &|| best.get(), &|r| {
            best.set(r)
        });
        (best.get() != u64::MAX).then(|| best.get())
    };

    match best_rank {
        None => Ok(BinaryDecision {
            verdict: Verdict::Decomposable,
            certificate: None,
            quadruples_examined: total,
        }),
        Some(rank) => {
            let z = rank - 1;
            let r = (z % n64) as u32;
            let pi = ((z / n64) % f64) as usize;
            let qp = ((z / (n64 * f64)) % n64) as u32;
            let q = (z / (n64 * f64 * n64)) as u32;
            let p = engine.finals[pi];
            let certificate = extract_certificate(&engine, &back, q, qp, p, r)?;
            Ok(BinaryDecision {
                verdict: Verdict::NotDecomposable,
                certificate: Some(certificate),
                quadruples_examined: rank,
            })
        }
    }
}

/// Decides monadic decomposability of an n-ary relation by deciding every
/// induced binary relation R_k for k = 1..n-1. On failure, reports the
/// smallest failing k and a certificate for the distinguishability
/// automaton of that R_k.
pub fn decide_nary(r: &MultiTapeAutomaton) -> Result<Decision> {
    decide_nary_threads(r, 1)
}

/// As [`decide_nary`], passing `threads` through to each binary decision.
pub fn decide_nary_threads(r: &MultiTapeAutomaton, threads: usize) -> Result<Decision> {
    if r.arity() < 2 {
        // A unary relation is a language: already monadic.
        return Ok(Decision {
            verdict: Verdict::Decomposable,
            failing_k: None,
            certificate: None,
            per_k: Vec::new(),
        });
    }
    let mut per_k = Vec::new();
    let mut failing_k = None;
    let mut certificate = None;
    for k in 1..r.arity() {
        let rk = induced_binary(r, k)?;
        let parts = build_not_sim_parts(&rk)?;
        let bd = decide_binary_threads(&parts.automaton, threads)?;
        if !bd.verdict.decomposable() && failing_k.is_none() {
            failing_k = Some(k);
            certificate = bd.certificate.clone();
        }
        per_k.push(KReport {
            k,
            verdict: bd.verdict,
            not_sim_states: parts.automaton.num_states(),
            pre_projection_states: parts.pre_projection_states,
            quadruples_examined: bd.quadruples_examined,
        });
    }
    Ok(Decision {
        verdict: if failing_k.is_none() {
            Verdict::Decomposable
        } else {
            Verdict::NotDecomposable
        },
        failing_k,
        certificate,
        per_k,
    })
}

/// Unfolds a certificate into k+1 pairwise distinguishable words:
/// x_0 = w0 and y_0 = v0, then x_1 = v0·w1 and y_1 = v0·v1, and from there
/// x_{i+1} = y_i·w and y_{i+1} = y_i·v.
pub fn expand_family(c: &Certificate, k: usize) -> Result<Vec<Vec<usize>>> {
    check_shape(c).map_err(Error::Invalid)?;
    let mut family = vec![c.w0.clone()];
    if k == 0 {
        return Ok(family);
    }
    family.push([c.v0.as_slice(), c.w1.as_slice()].concat());
    let mut y = [c.v0.as_slice(), c.v1.as_slice()].concat();
    for _ in 2..=k {
        family.push([y.as_slice(), c.w.as_slice()].concat());
        y.extend_from_slice(&c.v);
    }
    Ok(family)
}

/// Replays a certificate against the distinguishability automaton it claims
/// to describe: all twelve run conditions plus pairwise membership of the
/// expanded family of k+1 words.
pub fn validate_certificate(c: &Certificate, n: &MultiTapeAutomaton, k: usize) -> bool {
    validate_certificate_report(c, n, k).is_ok()
}

/// As [`validate_certificate`], naming the first failing condition.
pub fn validate_certificate_report(
    c: &Certificate,
    n: &MultiTapeAutomaton,
    k: usize,
) -> std::result::Result<(), String> {
    if n.arity() != 2 {
        return Err(format!("automaton has arity {}, expected 2", n.arity()));
    }
    check_shape(c)?;
    let m = n.alphabet().len();
    let states = n.num_states() as u32;
    for (name, s) in [("q", c.q), ("q'", c.qp), ("p", c.p), ("r", c.r)] {
        if s >= states {
            return Err(format!("state {name} = {s} out of range ({states} states)"));
        }
    }
    if !n.is_final(c.p) {
        return Err("state p is not final".to_string());
    }
    for (name, word) in [
        ("w0", &c.w0),
        ("v0", &c.v0),
        ("w1", &c.w1),
        ("v1", &c.v1),
        ("w", &c.w),
        ("v", &c.v),
    ] {
        if let Some(&s) = word.iter().find(|&&s| s >= m) {
            return Err(format!(
                "word {name} uses symbol index {s}, alphabet has {m}"
            ));
        }
    }

    let radix = m as u32 + 1;
    let pair_ids = |a: &[usize], b: &[usize]| -> Vec<u32> {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| (x as u32 + 1) * radix + (y as u32 + 1))
            .collect()
    };
    let pad_ids = |a: &[usize]| -> Vec<u32> { a.iter().map(|&y| y as u32 + 1).collect() };
    let reaches = |from: u32, ids: &[u32], to: u32| -> std::result::Result<bool, String> {
        let mut cur = vec![from];
        for &id in ids {
            cur = n.step(&cur, id);
            if cur.is_empty() {
                return Ok(false);
            }
        }
        Ok(cur.binary_search(&to).is_ok())
    };
    let q0 = n.initial();
    let conditions: [(&str, u32, Vec<u32>, u32); 12] = [
        (
            "A(i): q not reached from q0 on (w0,v0)",
            q0,
            pair_ids(&c.w0, &c.v0),
            c.q,
        ),
        (
            "A(ii): q' not reached from q0 on (v0,v0)",
            q0,
            pair_ids(&c.v0, &c.v0),
            c.qp,
        ),
        (
            "A(iii): q not reached from q' on (w1,v1)",
            c.qp,
            pair_ids(&c.w1, &c.v1),
            c.q,
        ),
        (
            "A(iv): q' not reached from q' on (v1,v1)",
            c.qp,
            pair_ids(&c.v1, &c.v1),
            c.qp,
        ),
        (
            "A(v): p not reached from q on (ε,w1)",
            c.q,
            pad_ids(&c.w1),
            c.p,
        ),
        (
            "A(vi): r not reached from q on (ε,v1)",
            c.q,
            pad_ids(&c.v1),
            c.r,
        ),
        (
            "B(i): q not reached from q' on (w,v)",
            c.qp,
            pair_ids(&c.w, &c.v),
            c.q,
        ),
        (
            "B(ii): q' not reached from q' on (v,v)",
            c.qp,
            pair_ids(&c.v, &c.v),
            c.qp,
        ),
        (
            "B(iii): p not reached from q on (ε,w)",
            c.q,
            pad_ids(&c.w),
            c.p,
        ),
        (
            "B(iv): r not reached from q on (ε,v)",
            c.q,
            pad_ids(&c.v),
            c.r,
        ),
        (
            "B(v): p not reached from r on (ε,w)",
            c.r,
            pad_ids(&c.w),
            c.p,
        ),
        (
            "B(vi): r not reached from r on (ε,v)",
            c.r,
            pad_ids(&c.v),
            c.r,
        ),
    ];
    for (msg, from, ids, to) in conditions {
        if !reaches(from, &ids, to)? {
            return Err(msg.to_string());
        }
    }

    let family = expand_family(c, k).map_err(|e| e.to_string())?;
    for i in 0..family.len() {
        for j in i + 1..family.len() {
            let t = crate::alphabet::WordTuple::new(vec![family[i].clone(), family[j].clone()]);
            if !n.accepts(&t).map_err(|e| e.to_string())? {
                return Err(format!("family pair ({i},{j}) is not accepted"));
            }
        }
    }
    Ok(())
}

/// Greedily collects up to `k` words of length at most `max_len`, in
/// length-lexicographic order, that are pairwise accepted (in both orders)
/// by `n`. On a distinguishability automaton this is a brute-force hunt for
/// many pairwise distinguishable words; useful as a diagnostic.
pub fn bounded_antichain_search(
    n: &MultiTapeAutomaton,
    k: usize,
    max_len: usize,
) -> Result<Vec<Vec<usize>>> {
    if n.arity() != 2 {
        return Err(Error::Arity {
            expected: 2,
            got: n.arity(),
        });
    }
    let m = n.alphabet().len();
    let mut chosen: Vec<Vec<usize>> = Vec::new();
    if k == 0 {
        return Ok(chosen);
    }
    for len in 0..=max_len {
        let mut word = vec![0usize; len];
        loop {
            let mut ok = true;
            for x in &chosen {
                let fwd = crate::alphabet::WordTuple::new(vec![x.clone(), word.clone()]);
                let bwd = crate::alphabet::WordTuple::new(vec![word.clone(), x.clone()]);
                if !n.accepts(&fwd)? || !n.accepts(&bwd)? {
                    ok = false;
                    break;
                }
            }
            if ok {
                chosen.push(word.clone());
                if chosen.len() == k {
                    return Ok(chosen);
                }
            }
            // Advance the odometer; stop after the lexicographically last word.
            let mut i = len;
            loop {
                if i == 0 {
                    break;
                }
                word[i - 1] += 1;
                if word[i - 1] < m {
                    break;
                }
                word[i - 1] = 0;
                i -= 1;
            }
            if i == 0 {
                break;
            }
        }
    }
    Ok(chosen)
}

fn check_shape(c: &Certificate) -> std::result::Result<(), String> {
    for (name, a, b) in [
        ("w0/v0", &c.w0, &c.v0),
        ("w1/v1", &c.w1, &c.v1),
        ("w/v", &c.w, &c.v),
    ] {
        if a.is_empty() || a.len() != b.len() {
            return Err(format!(
                "certificate words {name} must be nonempty and of equal length"
            ));
        }
    }
    Ok(())
}

/// How one copy of N moves when the shared step letter is (x, y).
#[derive(Clone, Copy)]
enum Role {
    FullXY,
    DiagY,
    PadX,
    PadY,
}

/// Compressed adjacency: `of(idx)` is the sorted target list of bucket idx.
struct Adj {
    offsets: Vec<u32>,
    targets: Vec<u32>,
}

impl Adj {
    fn of(&self, idx: usize) -> &[u32] {
        &self.targets[self.offsets[idx] as usize..self.offsets[idx + 1] as usize]
    }
}

fn adj_from_pairs(entries: usize, pairs: &[(u32, u32)]) -> Adj {
    let mut sizes = vec![0u32; entries];
    for &(i, _) in pairs {
        sizes[i as usize] += 1;
    }
    let mut offsets = vec![0u32; entries + 1];
    for i in 0..entries {
        offsets[i + 1] = offsets[i] + sizes[i];
    }
    let mut cursor: Vec<u32> = offsets[..entries].to_vec();
    let mut targets = vec![0u32; offsets[entries] as usize];
    for &(i, t) in pairs {
        targets[cursor[i as usize] as usize] = t;
        cursor[i as usize] += 1;
    }
    Adj { offsets, targets }
}

/// Precomputed step tables for the trimmed automaton: per-state target lists
/// for full letters (x,y), diagonal letters (y,y) and left-padded letters
/// (⊥,y), plus the letter-oblivious union graphs used for reachability
/// pruning.
struct Engine {
    n: usize,
    m: usize,
    init: u32,
    finals: Vec<u32>,
    full: Adj,
    diag: Adj,
    padl: Adj,
    ufull: Adj,
    udiag: Adj,
    upadl: Adj,
    rufull: Adj,
    rudiag: Adj,
    rupadl: Adj,
    /// Lettered reverse of `padl`: bucket t·m+y lists the sources s with a
    /// (⊥,y) transition s → t.
    rpadl: Adj,
}

#[derive(Default)]
struct Caches {
    full_row: HashMap<u32, Rc<BitSet>>,
    diag_row: HashMap<u32, Rc<BitSet>>,
    padl_row: HashMap<u32, Rc<BitSet>>,
    bfull_row: HashMap<u32, Rc<BitSet>>,
    bdiag_row: HashMap<u32, Rc<BitSet>>,
    bpadl_row: HashMap<u32, Rc<BitSet>>,
    gfinal: Option<Rc<BitSet>>,
    /// Pair sets over state pairs (bit index a·n+b): loop_pairs keyed by q',
    /// pad_loop_pairs keyed by r, pad_final_pairs global.
    loop2: HashMap<u32, Rc<BitSet>>,
    padb2: HashMap<u32, Rc<BitSet>>,
    padf2: Option<Rc<BitSet>>,
    six: HashMap<(u32, u32, u32), Rc<BitSet>>,
}

impl Engine {
    fn new(t: &MultiTapeAutomaton) -> Engine {
        let n = t.num_states();
        let m = t.alphabet().len();
        let radix = m as u32 + 1;
        let mut full_pairs = Vec::new();
        let mut diag_pairs = Vec::new();
        let mut padl_pairs = Vec::new();
        let mut rpadl_pairs = Vec::new();
        let mut ufull = std::collections::BTreeSet::new();
        let mut udiag = std::collections::BTreeSet::new();
        let mut upadl = std::collections::BTreeSet::new();
        for s in 0..n as u32 {
            for (id, targets) in t.transitions_from(s) {
                let hi = id / radix;
                let lo = id % radix;
                if lo == 0 {
                    // (x,⊥) letters never occur in witness runs.
                    continue;
                }
                let y = (lo - 1) as usize;
                if hi == 0 {
                    let idx = s as usize * m + y;
                    for &tg in targets {
                        padl_pairs.push((idx as u32, tg));
                        rpadl_pairs.push((tg * m as u32 + y as u32, s));
                        upadl.insert((s, tg));
                    }
                } else {
                    let x = (hi - 1) as usize;
                    let idx = (s as usize * m + x) * m + y;
                    for &tg in targets {
                        full_pairs.push((idx as u32, tg));
                        ufull.insert((s, tg));
                    }
                    if x == y {
                        let didx = s as usize * m + y;
                        for &tg in targets {
                            diag_pairs.push((didx as u32, tg));
                            udiag.insert((s, tg));
                        }
                    }
                }
            }
        }
        let as_pairs = |set: &std::collections::BTreeSet<(u32, u32)>| -> Vec<(u32, u32)> {
            set.iter().copied().collect()
        };
        let swapped = |set: &std::collections::BTreeSet<(u32, u32)>| -> Vec<(u32, u32)> {
            set.iter().map(|&(s, t)| (t, s)).collect()
        };
        Engine {
            n,
            m,
            init: t.initial(),
            finals: t.final_states().collect(),
            full: adj_from_pairs(n * m * m, &full_pairs),
            diag: adj_from_pairs(n * m, &diag_pairs),
            padl: adj_from_pairs(n * m, &padl_pairs),
            ufull: adj_from_pairs(n, &as_pairs(&ufull)),
            udiag: adj_from_pairs(n, &as_pairs(&udiag)),
            upadl: adj_from_pairs(n, &as_pairs(&upadl)),
            rufull: adj_from_pairs(n, &swapped(&ufull)),
            rudiag: adj_from_pairs(n, &swapped(&udiag)),
            rupadl: adj_from_pairs(n, &swapped(&upadl)),
            rpadl: adj_from_pairs(n * m, &rpadl_pairs),
        }
    }

    fn role_targets(&self, role: Role, s: u32, x: usize, y: usize) -> &[u32] {
        match role {
            Role::FullXY => self.full.of((s as usize * self.m + x) * self.m + y),
            Role::DiagY => self.diag.of(s as usize * self.m + y),
            Role::PadX => self.padl.of(s as usize * self.m + x),
            Role::PadY => self.padl.of(s as usize * self.m + y),
        }
    }

    /// Pairs (q, q') reachable from (q0, q0) in one or more steps where the
    /// copies read (x,y) and (y,y).
    fn a1_pairs(&self) -> Vec<(u32, u32)> {
        let key = |a: u32, b: u32| ((a as u64) << 32) | b as u64;
        let mut visited = HashSet::new();
        visited.insert(key(self.init, self.init));
        let mut reached = HashSet::new();
        let mut queue = VecDeque::new();
        queue.push_back((self.init, self.init));
        while let Some((s1, s2)) = queue.pop_front() {
            for x in 0..self.m {
                for y in 0..self.m {
                    let l1 = self.full.of((s1 as usize * self.m + x) * self.m + y);
                    if l1.is_empty() {
                        continue;
                    }
                    let l2 = self.diag.of(s2 as usize * self.m + y);
                    for &t1 in l1 {
                        for &t2 in l2 {
                            let k = key(t1, t2);
                            reached.insert(k);
                            if visited.insert(k) {
                                queue.push_back((t1, t2));
                            }
                        }
                    }
                }
            }
        }
        let mut out: Vec<(u32, u32)> = reached
            .into_iter()
            .map(|k| ((k >> 32) as u32, k as u32))
            .collect();
        out.sort_unstable();
        out
    }

    fn row(cache: &mut HashMap<u32, Rc<BitSet>>, adj: &Adj, n: usize, s: u32) -> Rc<BitSet> {
        if let Some(b) = cache.get(&s) {
            return b.clone();
        }
        let mut row = BitSet::new(n);
        let mut queue = VecDeque::new();
        for &t in adj.of(s as usize) {
            if !row.contains(t as usize) {
                row.insert(t as usize);
                queue.push_back(t);
            }
        }
        while let Some(v) = queue.pop_front() {
            for &t in adj.of(v as usize) {
                if !row.contains(t as usize) {
                    row.insert(t as usize);
                    queue.push_back(t);
                }
            }
        }
        let rc = Rc::new(row);
        cache.insert(s, rc.clone());
        rc
    }

    fn row_full(&self, c: &mut Caches, s: u32) -> Rc<BitSet> {
        Engine::row(&mut c.full_row, &self.ufull, self.n, s)
    }

    fn row_diag(&self, c: &mut Caches, s: u32) -> Rc<BitSet> {
        Engine::row(&mut c.diag_row, &self.udiag, self.n, s)
    }

    fn row_padl(&self, c: &mut Caches, s: u32) -> Rc<BitSet> {
        Engine::row(&mut c.padl_row, &self.upadl, self.n, s)
    }

    /// States that can reach `s` in zero or more steps of `adj`'s forward
    /// graph, computed on the reversed adjacency. Used to prune product
    /// searches: a component successor outside its target cone can never be
    /// part of an accepting tuple path.
    fn brow(cache: &mut HashMap<u32, Rc<BitSet>>, radj: &Adj, n: usize, s: u32) -> Rc<BitSet> {
        if let Some(b) = cache.get(&s) {
            return b.clone();
        }
        let mut row = BitSet::new(n);
        row.insert(s as usize);
        let mut queue = VecDeque::new();
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for &t in radj.of(v as usize) {
                if !row.contains(t as usize) {
                    row.insert(t as usize);
                    queue.push_back(t);
                }
            }
        }
        let rc = Rc::new(row);
        cache.insert(s, rc.clone());
        rc
    }

    fn cone(&self, c: &mut Caches, role: Role, s: u32) -> Rc<BitSet> {
        match role {
            Role::FullXY => Engine::brow(&mut c.bfull_row, &self.rufull, self.n, s),
            Role::DiagY => Engine::brow(&mut c.bdiag_row, &self.rudiag, self.n, s),
            Role::PadX | Role::PadY => Engine::brow(&mut c.bpadl_row, &self.rupadl, self.n, s),
        }
    }

    /// States that can reach some final state through pad-left moves, in zero
    /// or more steps.
    fn final_cone(&self, c: &mut Caches) -> Rc<BitSet> {
        if let Some(b) = &c.gfinal {
            return b.clone();
        }
        let mut row = BitSet::new(self.n);
        let mut queue = VecDeque::new();
        for &p in &self.finals {
            row.insert(p as usize);
            queue.push_back(p);
        }
        while let Some(v) = queue.pop_front() {
            for &t in self.rupadl.of(v as usize) {
                if !row.contains(t as usize) {
                    row.insert(t as usize);
                    queue.push_back(t);
                }
            }
        }
        let rc = Rc::new(row);
        c.gfinal = Some(rc.clone());
        rc
    }

    /// Pairs (a, b) reachable from (q', q') in one or more steps where the
    /// copies read (x,y) and (y,y). A quadruple can only accept when
    /// (q, q') is in this set: it is the projection of the six-fold loop
    /// onto its first two components.
    fn loop_pairs(&self, c: &mut Caches, qp: u32) -> Rc<BitSet> {
        if let Some(b) = c.loop2.get(&qp) {
            return b.clone();
        }
        let n = self.n;
        let mut row = BitSet::new(n * n);
        // The seed is deliberately not marked: membership means reachable in
        // at least one step, so (qp, qp) only enters the set via a cycle.
        let mut queue = VecDeque::from([(qp, qp)]);
        while let Some((a, b)) = queue.pop_front() {
            for x in 0..self.m {
                for y in 0..self.m {
                    let l1 = self.full.of((a as usize * self.m + x) * self.m + y);
                    if l1.is_empty() {
                        continue;
                    }
                    for &t1 in l1 {
                        for &t2 in self.diag.of(b as usize * self.m + y) {
                            let idx = t1 as usize * n + t2 as usize;
                            if !row.contains(idx) {
                                row.insert(idx);
                                queue.push_back((t1, t2));
                            }
                        }
                    }
                }
            }
        }
        let rc = Rc::new(row);
        c.loop2.insert(qp, rc.clone());
        rc
    }

    /// Backward closure of the seed pairs under the two-copy pad-left step
    /// (both copies read (⊥,y) for a shared y), one or more steps.
    fn pad_pairs_back(&self, seeds: impl IntoIterator<Item = (u32, u32)>) -> BitSet {
        let n = self.n;
        let mut row = BitSet::new(n * n);
        let mut queue: VecDeque<(u32, u32)> = seeds.into_iter().collect();
        while let Some((a, b)) = queue.pop_front() {
            for y in 0..self.m {
                let l1 = self.rpadl.of(a as usize * self.m + y);
                if l1.is_empty() {
                    continue;
                }
                for &s1 in l1 {
                    for &s2 in self.rpadl.of(b as usize * self.m + y) {
                        let idx = s1 as usize * n + s2 as usize;
                        if !row.contains(idx) {
                            row.insert(idx);
                            queue.push_back((s1, s2));
                        }
                    }
                }
            }
        }
        row
    }

    /// Pairs that can reach (r, r) under the shared pad-left step: the
    /// six-fold loop projected onto components four and six requires
    /// (q, r) to be here.
    fn pad_loop_pairs(&self, c: &mut Caches, r: u32) -> Rc<BitSet> {
        if let Some(b) = c.padb2.get(&r) {
            return b.clone();
        }
        let rc = Rc::new(self.pad_pairs_back([(r, r)]));
        c.padb2.insert(r, rc.clone());
        rc
    }

    /// Pairs that can reach some diagonal final pair (p, p) under the shared
    /// pad-left step: the projection onto components three and five.
    fn pad_final_pairs(&self, c: &mut Caches) -> Rc<BitSet> {
        if let Some(b) = &c.padf2 {
            return b.clone();
        }
        let rc = Rc::new(self.pad_pairs_back(self.finals.iter().map(|&p| (p, p))));
        c.padf2 = Some(rc.clone());
        rc
    }

    /// One deterministic step of the subset construction for `role` on the
    /// shared letter (x, y), clipped to the component's target cone.
    fn subset_step(&self, role: Role, from: &BitSet, x: usize, y: usize, cone: &BitSet) -> BitSet {
        let mut out = BitSet::new(self.n);
        for s in from.iter() {
            for &t in self.role_targets(role, s as u32, x, y) {
                out.insert(t as usize);
            }
        }
        out.intersect(cone);
        out
    }

    /// Final states p such that (q, q', p, r, p, r) is reachable in one or
    /// more steps from (q', q', q, q, r, r) in the six-fold product.
    ///
    /// The six copies constrain each other only through the shared column
    /// word, so the search runs the subset construction per copy: a node is
    /// the six-tuple of reachable sets after some word, and the quadruple
    /// accepts at a node exactly when every copy's target lies in its set.
    /// This keeps the branching at m² per node instead of the product of the
    /// six successor lists.
    fn six_reach(&self, c: &mut Caches, q: u32, qp: u32, r: u32) -> Rc<BitSet> {
        if let Some(b) = c.six.get(&(q, qp, r)) {
            return b.clone();
        }
        let padl_q = self.row_padl(c, q);
        let padl_r = self.row_padl(c, r);
        let mut candidates = BitSet::new(self.n);
        for &p in &self.finals {
            if padl_q.contains(p as usize) && padl_r.contains(p as usize) {
                candidates.insert(p as usize);
            }
        }
        let viable = !candidates.is_empty()
            && padl_q.contains(r as usize)
            && padl_r.contains(r as usize)
            && self.row_full(c, qp).contains(q as usize)
            && self.row_diag(c, qp).contains(qp as usize);
        let mut found = BitSet::new(self.n);
        if viable {
            let roles = [
                Role::FullXY,
                Role::DiagY,
                Role::PadX,
                Role::PadY,
                Role::PadX,
                Role::PadY,
            ];
            // Component i of an accepting path must stay inside the backward
            // cone of its fixed target (the witness-column components aim at
            // some final state), so successor sets are clipped to it.
            let cones: [Rc<BitSet>; 6] = [
                self.cone(c, Role::FullXY, q),
                self.cone(c, Role::DiagY, qp),
                self.final_cone(c),
                self.cone(c, Role::PadY, r),
                self.final_cone(c),
                self.cone(c, Role::PadY, r),
            ];
            let start: Box<[BitSet]> = [qp, qp, q, q, r, r]
                .iter()
                .map(|&s| BitSet::singleton(self.n, s as usize))
                .collect();
            let mut visited: HashSet<Box<[BitSet]>> = HashSet::new();
            visited.insert(start.clone());
            let mut queue = VecDeque::from([start]);
            'bfs: while let Some(v) = queue.pop_front() {
                for x in 0..self.m {
                    for y in 0..self.m {
                        let mut child = Vec::with_capacity(6);
                        for i in 0..6 {
                            let s = self.subset_step(roles[i], &v[i], x, y, &cones[i]);
                            if s.is_empty() {
                                break;
                            }
                            child.push(s);
                        }
                        if child.len() < 6 {
                            continue;
                        }
                        // Tested before the visited check: the start tuple was
                        // never tested (zero steps), so re-reaching its image
                        // through a nonempty word must still count.
                        if child[0].contains(q as usize)
                            && child[1].contains(qp as usize)
                            && child[3].contains(r as usize)
                            && child[5].contains(r as usize)
                        {
                            for p in candidates.iter() {
                                if !found.contains(p)
                                    && child[2].contains(p)
                                    && child[4].contains(p)
                                {
                                    found.insert(p);
                                }
                            }
                            if found == candidates {
                                break 'bfs;
                            }
                        }
                        let child: Box<[BitSet]> = child.into_boxed_slice();
                        if !visited.contains(&child) {
                            visited.insert(child.clone());
                            queue.push_back(child);
                        }
                    }
                }
            }
        }
        let rc = Rc::new(found);
        c.six.insert((q, qp, r), rc.clone());
        rc
    }

    /// Shortest (then lexicographically least) word pair driving the k-fold
    /// product from `start` to `target` in at least one step. Runs the same
    /// subset-tuple search as [`Engine::six_reach`]; a node's discovery word
    /// is minimal for every word with the same subset image, so the first
    /// node containing all targets yields the minimal witness pair.
    fn path_bfs<const K: usize>(
        &self,
        c: &mut Caches,
        roles: [Role; K],
        start: [u32; K],
        target: [u32; K],
    ) -> Option<(Vec<usize>, Vec<usize>)> {
        let cones: Vec<Rc<BitSet>> = (0..K).map(|i| self.cone(c, roles[i], target[i])).collect();
        let start_sets: Box<[BitSet]> = start
            .iter()
            .map(|&s| BitSet::singleton(self.n, s as usize))
            .collect();
        // Discovery records (parent index, entering letter code); index 0 is
        // the start and is never walked through.
        let mut arena: Vec<(u32, u32)> = vec![(0, 0)];
        let mut visited: HashSet<Box<[BitSet]>> = HashSet::new();
        visited.insert(start_sets.clone());
        let mut queue = VecDeque::from([(start_sets, 0u32)]);
        while let Some((v, vid)) = queue.pop_front() {
            for x in 0..self.m {
                for y in 0..self.m {
                    let mut child = Vec::with_capacity(K);
                    for i in 0..K {
                        let s = self.subset_step(roles[i], &v[i], x, y, &cones[i]);
                        if s.is_empty() {
                            break;
                        }
                        child.push(s);
                    }
                    if child.len() < K {
                        continue;
                    }
                    let code = (x * self.m + y) as u32;
                    if (0..K).all(|i| child[i].contains(target[i] as usize)) {
                        let mut codes = vec![code];
                        let mut at = vid;
                        while at != 0 {
                            let (prev, pc) = arena[at as usize];
                            codes.push(pc);
                            at = prev;
                        }
                        codes.reverse();
                        let ws = codes.iter().map(|&c| c as usize / self.m).collect();
                        let vs = codes.iter().map(|&c| c as usize % self.m).collect();
                        return Some((ws, vs));
                    }
                    let child: Box<[BitSet]> = child.into_boxed_slice();
                    if !visited.contains(&child) {
                        visited.insert(child.clone());
                        arena.push((vid, code));
                        queue.push_back((child, arena.len() as u32 - 1));
                    }
                }
            }
        }
        None
    }
}

/// Walks one slice of the sorted A1 pair list, publishing the rank of the
/// first accepting quadruple it finds. Ranks grow along the slice, so the
/// first hit is the slice minimum and the walk can stop.
fn search_slice(
    engine: &Engine,
    caches: &mut Caches,
    slice: &[(u32, u32)],
    best_so_far: &dyn Fn() -> u64,
    publish: &dyn Fn(u64),
) {
    let n = engine.n;
    let n64 = n as u64;
    let f64 = engine.finals.len() as u64;
    let block = f64 * n64;
    for &(q, qp) in slice {
        let base = (q as u64 * n64 + qp as u64) * block;
        if base >= best_so_far() {
            break;
        }
        // Filters, cheapest first: single-graph closures, then the exact
        // two-fold projections of the loop condition, then the six-fold
        // search as the arbiter.
        if !engine.row_full(caches, qp).contains(q as usize)
            || !engine.row_diag(caches, qp).contains(qp as usize)
        {
            continue;
        }
        if !engine
            .loop_pairs(caches, qp)
            .contains(q as usize * n + qp as usize)
        {
            continue;
        }
        let padl_q = engine.row_padl(caches, q);
        let pad_final = engine.pad_final_pairs(caches);
        for (pi, &p) in engine.finals.iter().enumerate() {
            if !padl_q.contains(p as usize) {
                continue;
            }
            for r in 0..engine.n as u32 {
                if !padl_q.contains(r as usize) {
                    continue;
                }
                let padl_r = engine.row_padl(caches, r);
                if !padl_r.contains(r as usize) || !padl_r.contains(p as usize) {
                    continue;
                }
                let qr = q as usize * n + r as usize;
                if !pad_final.contains(qr) {
                    continue;
                }
                if !engine.pad_loop_pairs(caches, r).contains(qr) {
                    continue;
                }
                if engine.six_reach(caches, q, qp, r).contains(p as usize) {
                    publish(base + pi as u64 * n64 + r as u64 + 1);
                    return;
                }
            }
        }
    }
}

fn search_parallel(engine: &Engine, pairs: &[(u32, u32)], threads: usize) -> Result<Option<u64>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Invalid(format!("thread pool: {e}")))?;
    let best = AtomicU64::new(u64::MAX);
    let chunk = (pairs.len() / (threads * 4).max(1)).max(1);
    pool.install(|| {
        pairs.par_chunks(chunk).for_each(|slice| {
            let mut caches = Caches::default();
            search_slice(
                engine,
                &mut caches,
                slice,
                &|| best.load(Ordering::Acquire),
                &|rank| {
                    best.fetch_min(rank, Ordering::AcqRel);
                },
            );
        });
    });
    let rank = best.load(Ordering::Acquire);
    Ok((rank != u64::MAX).then_some(rank))
}

fn extract_certificate(
    engine: &Engine,
    back: &[u32],
    q: u32,
    qp: u32,
    p: u32,
    r: u32,
) -> Result<Certificate> {
    let broken = || {
        Error::Invalid("internal: witness path extraction failed after a positive search".into())
    };
    let mut caches = Caches::default();
    let (w0, v0) = engine
        .path_bfs(
            &mut caches,
            [Role::FullXY, Role::DiagY],
            [engine.init, engine.init],
            [q, qp],
        )
        .ok_or_else(broken)?;
    let (w1, v1) = engine
        .path_bfs(
            &mut caches,
            [Role::FullXY, Role::DiagY, Role::PadX, Role::PadY],
            [qp, qp, q, q],
            [q, qp, p, r],
        )
        .ok_or_else(broken)?;
    let (w, v) = engine
        .path_bfs(
            &mut caches,
            [
                Role::FullXY,
                Role::DiagY,
                Role::PadX,
                Role::PadY,
                Role::PadX,
                Role::PadY,
            ],
            [qp, qp, q, q, r, r],
            [q, qp, p, r, p, r],
        )
        .ok_or_else(broken)?;
    Ok(Certificate {
        q: back[q as usize],
        qp: back[qp as usize],
        p: back[p as usize],
        r: back[r as usize],
        w0,
        v0,
        w1,
        v1,
        w,
        v,
    })
}
