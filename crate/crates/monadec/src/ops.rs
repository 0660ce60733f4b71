//! The automata algebra: boolean operations, determinization and
//! minimization, tape manipulation, and the padding-aware variants of
//! complement and projection.
//!
//! Everything here is canonical: states of derived automata are numbered in
//! breadth-first discovery order with letters visited in id order, so equal
//! inputs always produce byte-identical outputs.

use crate::alphabet::{Alphabet, ColumnLetter};
use crate::automaton::MultiTapeAutomaton;
use crate::bits::BitSet;
use crate::{Error, Result};
use std::collections::{BTreeMap, BTreeSet, HashMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoolOp {
    And,
    Or,
}

impl BoolOp {
    fn apply(self, a: bool, b: bool) -> bool {
        match self {
            BoolOp::And => a && b,
            BoolOp::Or => a || b,
        }
    }
}

/// Subset construction. The result is a complete DFA (the empty subset is
/// its sink) whose states are reachable subsets in discovery order.
pub fn determinize(a: &MultiTapeAutomaton) -> MultiTapeAutomaton {
    let letters: Vec<u32> = a.alphabet().letters(a.arity()).collect();
    let n = a.num_states();
    let start = BitSet::singleton(n, a.initial() as usize);
    let mut ids: HashMap<BitSet, u32> = HashMap::from([(start.clone(), 0)]);
    let mut subsets = vec![start];
    let mut rows: Vec<Vec<u32>> = Vec::new();
    let mut i = 0;
    while i < subsets.len() {
        let cur = subsets[i].clone();
        let mut row = Vec::with_capacity(letters.len());
        for &l in &letters {
            let mut succ = BitSet::new(n);
            for s in cur.iter() {
                for &t in a.successors(s as u32, l) {
                    succ.insert(t as usize);
                }
            }
            let next = ids.len() as u32;
            let id = *ids.entry(succ.clone()).or_insert_with(|| {
                subsets.push(succ);
                next
            });
            row.push(id);
        }
        rows.push(row);
        i += 1;
    }
    let mut out =
        MultiTapeAutomaton::new(a.arity(), a.alphabet().clone(), subsets.len(), 0).unwrap();
    for (s, subset) in subsets.iter().enumerate() {
        if subset.iter().any(|q| a.is_final(q as u32)) {
            out.set_final(s as u32, true).unwrap();
        }
        for (li, &l) in letters.iter().enumerate() {
            out.add_transition(s as u32, l, rows[s][li]).unwrap();
        }
    }
    out
}

/// Adds a rejecting sink for every missing (state, letter) slot. Identity on
/// already-complete automata.
pub fn complete(a: &MultiTapeAutomaton) -> MultiTapeAutomaton {
    if a.is_complete() {
        return a.clone();
    }
    let mut out = a.clone();
    let sink = out.add_state();
    for s in 0..out.num_states() as u32 {
        for l in a.alphabet().letters(a.arity()) {
            if out.successors(s, l).is_empty() {
                out.add_transition(s, l, sink).unwrap();
            }
        }
    }
    out
}

/// Intersection or union by the pairing construction, on reachable pairs
/// only. Union completes both operands first so that neither side can die
/// and silence the other's accepting runs.
pub fn boolean_product(
    a: &MultiTapeAutomaton,
    b: &MultiTapeAutomaton,
    op: BoolOp,
) -> Result<MultiTapeAutomaton> {
    if a.arity() != b.arity() {
        return Err(Error::Arity {
            expected: a.arity(),
            got: b.arity(),
        });
    }
    if a.alphabet() != b.alphabet() {
        return Err(Error::AlphabetMismatch);
    }
    let (a, b) = match op {
        BoolOp::And => (a.clone(), b.clone()),
        BoolOp::Or => (complete(a), complete(b)),
    };
    let mut ids: HashMap<(u32, u32), u32> = HashMap::new();
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    let mut intern = |pairs: &mut Vec<(u32, u32)>, p: (u32, u32)| -> u32 {
        let next = pairs.len() as u32;
        *ids.entry(p).or_insert_with(|| {
            pairs.push(p);
            next
        })
    };
    intern(&mut pairs, (a.initial(), b.initial()));
    let mut trans: Vec<(u32, u32, u32)> = Vec::new();
    let mut i = 0;
    while i < pairs.len() {
        let (sa, sb) = pairs[i];
        for l in a.alphabet().letters(a.arity()) {
            for &ta in a.successors(sa, l) {
                for &tb in b.successors(sb, l) {
                    let t = intern(&mut pairs, (ta, tb));
                    trans.push((i as u32, l, t));
                }
            }
        }
        i += 1;
    }
    let mut out = MultiTapeAutomaton::new(a.arity(), a.alphabet().clone(), pairs.len(), 0)?;
    for (s, &(sa, sb)) in pairs.iter().enumerate() {
        if op.apply(a.is_final(sa), b.is_final(sb)) {
            out.set_final(s as u32, true).unwrap();
        }
    }
    for (from, l, to) in trans {
        out.add_transition(from, l, to).unwrap();
    }
    Ok(out)
}

/// Union of any number of same-signature automata via a fresh initial state
/// that copies every operand's initial out-transitions. No state blowup.
pub fn nfa_union(parts: &[&MultiTapeAutomaton]) -> Result<MultiTapeAutomaton> {
    let first = *parts
        .first()
        .ok_or_else(|| Error::Invalid("union of zero automata".into()))?;
    for p in parts {
        if p.arity() != first.arity() {
            return Err(Error::Arity {
                expected: first.arity(),
                got: p.arity(),
            });
        }
        if p.alphabet() != first.alphabet() {
            return Err(Error::AlphabetMismatch);
        }
    }
    let states = 1 + parts.iter().map(|p| p.num_states()).sum::<usize>();
    let mut out = MultiTapeAutomaton::new(first.arity(), first.alphabet().clone(), states, 0)?;
    let mut offset = 1u32;
    for p in parts {
        for s in 0..p.num_states() as u32 {
            if p.is_final(s) {
                out.set_final(offset + s, true).unwrap();
            }
        }
        p.for_each_transition(|from, l, to| {
            out.add_transition(offset + from, l, offset + to).unwrap();
        });
        for (l, targets) in p.transitions_from(p.initial()) {
            for &t in targets {
                out.add_transition(0, l, offset + t).unwrap();
            }
        }
        if p.is_final(p.initial()) {
            out.set_final(0, true).unwrap();
        }
        offset += p.num_states() as u32;
    }
    Ok(out)
}

/// Accepts exactly the valid padded spellings: once a tape pads it stays
/// padded. One state per reachable set of already-padded tapes.
pub fn valid_pad_automaton(alphabet: &Alphabet, arity: usize) -> MultiTapeAutomaton {
    let pad_mask = |l: u32| -> u32 {
        (0..arity)
            .filter(|&t| alphabet.entry(arity, l, t).is_none())
            .fold(0, |m, t| m | 1 << t)
    };
    let mut ids: HashMap<u32, u32> = HashMap::from([(0, 0)]);
    let mut masks = vec![0u32];
    let mut trans = Vec::new();
    let mut i = 0;
    while i < masks.len() {
        let cur = masks[i];
        for l in alphabet.letters(arity) {
            let target = pad_mask(l);
            if cur & !target != 0 {
                continue;
            }
            let next = ids.len() as u32;
            let id = *ids.entry(target).or_insert_with(|| {
                masks.push(target);
                next
            });
            trans.push((i as u32, l, id));
        }
        i += 1;
    }
    let mut out = MultiTapeAutomaton::new(arity, alphabet.clone(), masks.len(), 0).unwrap();
    for s in 0..masks.len() as u32 {
        out.set_final(s, true).unwrap();
    }
    for (from, l, to) in trans {
        out.add_transition(from, l, to).unwrap();
    }
    out
}

fn reachable(a: &MultiTapeAutomaton) -> Vec<bool> {
    let mut seen = vec![false; a.num_states()];
    let mut stack = vec![a.initial()];
    seen[a.initial() as usize] = true;
    while let Some(s) = stack.pop() {
        for (_, targets) in a.transitions_from(s) {
            for &t in targets {
                if !std::mem::replace(&mut seen[t as usize], true) {
                    stack.push(t);
                }
            }
        }
    }
    seen
}

fn coreachable(a: &MultiTapeAutomaton) -> Vec<bool> {
    let mut rev: Vec<Vec<u32>> = vec![Vec::new(); a.num_states()];
    a.for_each_transition(|from, _, to| rev[to as usize].push(from));
    let mut seen = vec![false; a.num_states()];
    let mut stack: Vec<u32> = a.final_states().collect();
    for &s in &stack {
        seen[s as usize] = true;
    }
    while let Some(s) = stack.pop() {
        for &p in &rev[s as usize] {
            if !std::mem::replace(&mut seen[p as usize], true) {
                stack.push(p);
            }
        }
    }
    seen
}

/// Restriction to states that lie on some path from the initial state to a
/// final state. The initial state is always kept; surviving states keep
/// their relative order, so trimming is stable.
pub fn trim(a: &MultiTapeAutomaton) -> MultiTapeAutomaton {
    trim_with_map(a).0
}

/// [`trim`], plus the original index of every surviving state.
pub(crate) fn trim_with_map(a: &MultiTapeAutomaton) -> (MultiTapeAutomaton, Vec<u32>) {
    let reach = reachable(a);
    let co = coreachable(a);
    let live: Vec<u32> = (0..a.num_states() as u32)
        .filter(|&s| (reach[s as usize] && co[s as usize]) || s == a.initial())
        .collect();
    let mut new_id = vec![u32::MAX; a.num_states()];
    for (i, &s) in live.iter().enumerate() {
        new_id[s as usize] = i as u32;
    }
    let mut out = MultiTapeAutomaton::new(
        a.arity(),
        a.alphabet().clone(),
        live.len(),
        new_id[a.initial() as usize],
    )
    .unwrap();
    for &s in &live {
        if a.is_final(s) {
            out.set_final(new_id[s as usize], true).unwrap();
        }
    }
    a.for_each_transition(|from, l, to| {
        if new_id[from as usize] != u32::MAX && new_id[to as usize] != u32::MAX {
            out.add_transition(new_id[from as usize], l, new_id[to as usize])
                .unwrap();
        }
    });
    (out, live)
}

pub fn is_empty(a: &MultiTapeAutomaton) -> bool {
    let reach = reachable(a);
    !a.final_states().any(|s| reach[s as usize])
}

/// Complement within the valid paddings: determinize, flip, and intersect
/// with the valid-pad automaton so only meaningful spellings are accepted.
pub fn complement_padded(a: &MultiTapeAutomaton) -> MultiTapeAutomaton {
    let mut det = determinize(a);
    for s in 0..det.num_states() as u32 {
        let f = det.is_final(s);
        det.set_final(s, !f).unwrap();
    }
    let vp = valid_pad_automaton(a.alphabet(), a.arity());
    trim(&boolean_product(&det, &vp, BoolOp::And).unwrap())
}

/// Whether the relation contains every tuple, i.e. the complement within
/// valid paddings is empty.
pub fn is_universal_padded(a: &MultiTapeAutomaton) -> bool {
    is_empty(&complement_padded(a))
}

/// Hopcroft-style minimization by iterated partition refinement on the
/// determinized automaton, renumbered canonically. The result is the unique
/// minimal complete DFA of the letter-sequence language.
pub fn minimize(a: &MultiTapeAutomaton) -> MultiTapeAutomaton {
    let d = determinize(a);
    let letters: Vec<u32> = d.alphabet().letters(d.arity()).collect();
    let n = d.num_states();
    let mut block: Vec<u32> = (0..n).map(|s| d.is_final(s as u32) as u32).collect();
    let mut blocks = 2.min(n);
    loop {
        let mut ids: HashMap<Vec<u32>, u32> = HashMap::new();
        let mut next: Vec<u32> = Vec::with_capacity(n);
        for s in 0..n {
            let mut sig = Vec::with_capacity(letters.len() + 1);
            sig.push(block[s]);
            for &l in &letters {
                sig.push(block[d.successors(s as u32, l)[0] as usize]);
            }
            let fresh = ids.len() as u32;
            next.push(*ids.entry(sig).or_insert(fresh));
        }
        let count = ids.len();
        block = next;
        if count == blocks {
            break;
        }
        blocks = count;
    }
    // Representative per block, then breadth-first renumbering from the
    // initial block with letters in id order: the canonical form.
    let mut rep = vec![u32::MAX; blocks];
    for s in (0..n).rev() {
        rep[block[s] as usize] = s as u32;
    }
    let mut order = vec![u32::MAX; blocks];
    let mut queue = vec![block[d.initial() as usize]];
    order[queue[0] as usize] = 0;
    let mut head = 0;
    let mut issued = 1;
    while head < queue.len() {
        let b = queue[head];
        head += 1;
        for &l in &letters {
            let tb = block[d.successors(rep[b as usize], l)[0] as usize];
            if order[tb as usize] == u32::MAX {
                order[tb as usize] = issued;
                issued += 1;
                queue.push(tb);
            }
        }
    }
    let mut out = MultiTapeAutomaton::new(d.arity(), d.alphabet().clone(), blocks, 0).unwrap();
    for b in 0..blocks {
        if d.is_final(rep[b]) {
            out.set_final(order[b], true).unwrap();
        }
        for &l in &letters {
            let tb = block[d.successors(rep[b], l)[0] as usize];
            out.add_transition(order[b], l, order[tb as usize]).unwrap();
        }
    }
    out
}

/// Shrinks an automaton without changing its language by alternating
/// forward and backward bisimulation quotients until neither merges
/// anything. Product and projection outputs tend to collapse a lot; both
/// passes keep deterministic automata deterministic.
pub fn reduce(a: &MultiTapeAutomaton) -> MultiTapeAutomaton {
    let mut cur = reduce_forward_only(a);
    loop {
        let next = reduce_forward_only(&reduce_backward(&cur));
        if next.num_states() >= cur.num_states() {
            return cur;
        }
        cur = next;
    }
}

/// Refinement signature of a state: its current class and its sorted
/// letter-to-neighbor-class rows.
type RefineKey = (u32, Vec<(u32, Vec<u32>)>);

/// Quotients by the coarsest forward bisimulation. The initial partition
/// separates final from non-final states; each round re-keys every state by
/// its class and its letter-to-successor-class rows until the partition is
/// stable. The quotient accepts the same language and never has more states.
pub(crate) fn reduce_forward_only(a: &MultiTapeAutomaton) -> MultiTapeAutomaton {
    let n = a.num_states();
    if n == 0 {
        return a.clone();
    }
    let mut class: Vec<u32> = (0..n).map(|s| a.is_final(s as u32) as u32).collect();
    loop {
        let mut ids: HashMap<RefineKey, u32> = HashMap::new();
        let mut next = Vec::with_capacity(n);
        for s in 0..n as u32 {
            let mut row: Vec<(u32, Vec<u32>)> = Vec::new();
            for (l, targets) in a.transitions_from(s) {
                let mut cs: Vec<u32> = targets.iter().map(|&t| class[t as usize]).collect();
                cs.sort_unstable();
                cs.dedup();
                row.push((l, cs));
            }
            let fresh = ids.len() as u32;
            next.push(*ids.entry((class[s as usize], row)).or_insert(fresh));
        }
        // Stability must compare partitions, not class counts: a lone seed
        // class can split into exactly as many classes as a count-based
        // check expects, which once merged non-bisimilar states here.
        let stable = next == class;
        class = next;
        if stable {
            break;
        }
    }
    let count = 1 + *class.iter().max().unwrap() as usize;
    // Class ids follow first occurrence in state order, so id order is the
    // representative order and the renumbering is monotone.
    let mut out = MultiTapeAutomaton::new(
        a.arity(),
        a.alphabet().clone(),
        count,
        class[a.initial() as usize],
    )
    .unwrap();
    let mut seen = vec![false; count];
    for s in 0..n as u32 {
        let c = class[s as usize];
        if seen[c as usize] {
            continue;
        }
        seen[c as usize] = true;
        if a.is_final(s) {
            out.set_final(c, true).unwrap();
        }
        for (l, targets) in a.transitions_from(s) {
            let mut cs: Vec<u32> = targets.iter().map(|&t| class[t as usize]).collect();
            cs.sort_unstable();
            cs.dedup();
            for t in cs {
                out.add_transition(c, l, t).unwrap();
            }
        }
    }
    out
}

/// Quotients by the coarsest backward bisimulation, the forward construction
/// run on the reversed automaton. The initial partition separates the initial
/// state from the rest; refinement keys on predecessor classes per letter. A
/// quotient class is final when any member is. Also language-preserving:
/// merged states have the same set of words leading to them.
fn reduce_backward(a: &MultiTapeAutomaton) -> MultiTapeAutomaton {
    let n = a.num_states();
    if n == 0 {
        return a.clone();
    }
    let mut preds: Vec<BTreeMap<u32, Vec<u32>>> = vec![BTreeMap::new(); n];
    for s in 0..n as u32 {
        for (l, targets) in a.transitions_from(s) {
            for &t in targets {
                preds[t as usize].entry(l).or_default().push(s);
            }
        }
    }
    let mut class: Vec<u32> = (0..n as u32).map(|s| (s == a.initial()) as u32).collect();
    loop {
        let mut ids: HashMap<RefineKey, u32> = HashMap::new();
        let mut next = Vec::with_capacity(n);
        for s in 0..n {
            let mut row: Vec<(u32, Vec<u32>)> = Vec::new();
            for (&l, sources) in &preds[s] {
                let mut cs: Vec<u32> = sources.iter().map(|&t| class[t as usize]).collect();
                cs.sort_unstable();
                cs.dedup();
                row.push((l, cs));
            }
            let fresh = ids.len() as u32;
            next.push(*ids.entry((class[s], row)).or_insert(fresh));
        }
        // Same partition-equality check as the forward pass, and for the
        // same reason.
        let stable = next == class;
        class = next;
        if stable {
            break;
        }
    }
    let count = 1 + *class.iter().max().unwrap() as usize;
    let mut out = MultiTapeAutomaton::new(
        a.arity(),
        a.alphabet().clone(),
        count,
        class[a.initial() as usize],
    )
    .unwrap();
    let mut edges: BTreeSet<(u32, u32, u32)> = BTreeSet::new();
    for s in 0..n as u32 {
        if a.is_final(s) {
            out.set_final(class[s as usize], true).unwrap();
        }
        for (l, targets) in a.transitions_from(s) {
            for &t in targets {
                edges.insert((class[s as usize], l, class[t as usize]));
            }
        }
    }
    for (c, l, t) in edges {
        out.add_transition(c, l, t).unwrap();
    }
    out
}

/// Spreads an m-tape automaton over `arity` tapes: tape i of the input is
/// read at tape `positions[i]` of the result, other tapes are unconstrained.
/// Columns that are all-pad on the watched tapes are skipped in place, which
/// matches pad-extension on valid spellings.
pub fn cylindrify(
    a: &MultiTapeAutomaton,
    arity: usize,
    positions: &[usize],
) -> Result<MultiTapeAutomaton> {
    if positions.len() != a.arity() || arity < a.arity() {
        return Err(Error::Arity {
            expected: a.arity(),
            got: positions.len(),
        });
    }
    let mut seen = vec![false; arity];
    for &p in positions {
        if p >= arity || std::mem::replace(&mut seen[p], true) {
            return Err(Error::Invalid(
                "tape positions must be distinct and in range".into(),
            ));
        }
    }
    let mut out =
        MultiTapeAutomaton::new(arity, a.alphabet().clone(), a.num_states(), a.initial())?;
    for s in 0..a.num_states() as u32 {
        if a.is_final(s) {
            out.set_final(s, true).unwrap();
        }
    }
    for l in a.alphabet().letters(arity) {
        let col = a.alphabet().decode(arity, l)?;
        let watched: Vec<Option<usize>> = positions.iter().map(|&p| col.entries()[p]).collect();
        if watched.iter().all(Option::is_none) {
            for s in 0..out.num_states() as u32 {
                out.add_transition(s, l, s).unwrap();
            }
        } else {
            let sub = a.alphabet().encode(&ColumnLetter::new(watched)?)?;
            for s in 0..a.num_states() as u32 {
                for &t in a.successors(s, sub) {
                    out.add_transition(s, l, t).unwrap();
                }
            }
        }
    }
    Ok(out)
}

/// Drops one tape. The input is first restricted to valid paddings (only
/// those spellings define the relation); columns live solely on the dropped
/// tape then form a suffix of any accepting run, and are absorbed by
/// extending the final set backwards along such ghost transitions.
pub fn project(a: &MultiTapeAutomaton, tape: usize) -> Result<MultiTapeAutomaton> {
    if a.arity() < 2 {
        return Err(Error::Invalid("projection needs at least two tapes".into()));
    }
    if tape >= a.arity() {
        return Err(Error::Invalid(format!(
            "no tape {tape} at arity {}",
            a.arity()
        )));
    }
    let vp = valid_pad_automaton(a.alphabet(), a.arity());
    let b = trim(&boolean_product(a, &vp, BoolOp::And)?);
    let arity = a.arity() - 1;
    let mut out =
        MultiTapeAutomaton::new(arity, a.alphabet().clone(), b.num_states(), b.initial())?;
    let mut ghost_rev: Vec<Vec<u32>> = vec![Vec::new(); b.num_states()];
    let mut relabel: HashMap<u32, Option<u32>> = HashMap::new();
    for from in 0..b.num_states() as u32 {
        for (l, targets) in b.transitions_from(from) {
            let dropped = *relabel.entry(l).or_insert_with(|| {
                let col = b.alphabet().decode(b.arity(), l).unwrap();
                let kept: Vec<Option<usize>> = col
                    .entries()
                    .iter()
                    .enumerate()
                    .filter(|&(t, _)| t != tape)
                    .map(|(_, &e)| e)
                    .collect();
                if kept.iter().all(Option::is_none) {
                    None
                } else {
                    Some(
                        b.alphabet()
                            .encode(&ColumnLetter::new(kept).unwrap())
                            .unwrap(),
                    )
                }
            });
            for &t in targets {
                match dropped {
                    None => ghost_rev[t as usize].push(from),
                    Some(nl) => out.add_transition(from, nl, t)?,
                }
            }
        }
    }
    let mut stack: Vec<u32> = b.final_states().collect();
    let mut fin = vec![false; b.num_states()];
    for &s in &stack {
        fin[s as usize] = true;
    }
    while let Some(s) = stack.pop() {
        for &p in &ghost_rev[s as usize] {
            if !std::mem::replace(&mut fin[p as usize], true) {
                stack.push(p);
            }
        }
    }
    for (s, &f) in fin.iter().enumerate() {
        if f {
            out.set_final(s as u32, true)?;
        }
    }
    Ok(trim(&out))
}
