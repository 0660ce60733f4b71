//! Test-relation generators with independently computable ground truth.
//!
//! Two reductions tie decomposability to classical questions: universality
//! of an NFA language, and vertex reachability in a DAG. Both come with
//! their own oracle (subset-construction universality, plain graph search)
//! so the decision procedure can be tested differentially. The module also
//! builds the canonical relations used throughout the test suites and
//! seed-deterministic random automata.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::alphabet::{Alphabet, Symbol, WordTuple};
use crate::automaton::MultiTapeAutomaton;
use crate::decide::Verdict;
use crate::ops::{self, BoolOp};
use crate::{Error, Result};

/// A generated relation whose decomposability is known by construction.
#[derive(Clone, Debug)]
pub struct ReductionInstance {
    pub relation: MultiTapeAutomaton,
    pub ground_truth: Verdict,
    pub provenance: String,
}

/// A directed acyclic graph in the shape [`dag_reduction`] consumes:
/// `edges` over vertices `0..vertices`, plus distinguished source and
/// target vertices.
#[derive(Clone, Debug)]
pub struct Dag {
    pub vertices: usize,
    pub edges: Vec<(u32, u32)>,
    pub source: u32,
    pub target: u32,
}

fn expect_unary(a: &MultiTapeAutomaton) -> Result<()> {
    if a.arity() != 1 {
        return Err(Error::Arity {
            expected: 1,
            got: a.arity(),
        });
    }
    Ok(())
}

/// Re-reads a unary automaton over a larger alphabet containing all its
/// symbols; the language is unchanged.
fn with_alphabet(a: &MultiTapeAutomaton, bigger: &Alphabet) -> Result<MultiTapeAutomaton> {
    expect_unary(a)?;
    let map: Vec<u32> =
        a.alphabet()
            .symbols()
            .iter()
            .map(|s| {
                bigger.index_of(s).map(|i| i as u32 + 1).ok_or_else(|| {
                    Error::Invalid(format!("symbol {s} missing from target alphabet"))
                })
            })
            .collect::<Result<_>>()?;
    let mut out = MultiTapeAutomaton::new(1, bigger.clone(), a.num_states(), a.initial())?;
    for s in 0..a.num_states() as u32 {
        if a.is_final(s) {
            out.set_final(s, true)?;
        }
        for (id, targets) in a.transitions_from(s) {
            for &t in targets {
                out.add_transition(s, map[id as usize - 1], t)?;
            }
        }
    }
    Ok(out)
}

/// Unary NFA for the single-letter language {symbol}.
fn single_letter(alphabet: &Alphabet, symbol: usize) -> MultiTapeAutomaton {
    let mut a = MultiTapeAutomaton::new(1, alphabet.clone(), 2, 0).unwrap();
    a.add_transition(0, symbol as u32 + 1, 1).unwrap();
    a.set_final(1, true).unwrap();
    a
}

/// Unary automaton for S* where S is a set of symbols.
fn symbols_star(alphabet: &Alphabet, symbols: &[usize]) -> MultiTapeAutomaton {
    let mut a = MultiTapeAutomaton::new(1, alphabet.clone(), 1, 0).unwrap();
    a.set_final(0, true).unwrap();
    for &s in symbols {
        a.add_transition(0, s as u32 + 1, 0).unwrap();
    }
    a
}

/// Epsilon-free concatenation of two unary NFAs.
fn concat1(a: &MultiTapeAutomaton, b: &MultiTapeAutomaton) -> MultiTapeAutomaton {
    let off = a.num_states() as u32;
    let mut out = MultiTapeAutomaton::new(
        1,
        a.alphabet().clone(),
        a.num_states() + b.num_states(),
        a.initial(),
    )
    .unwrap();
    let b_accepts_empty = b.is_final(b.initial());
    for s in 0..a.num_states() as u32 {
        if b_accepts_empty && a.is_final(s) {
            out.set_final(s, true).unwrap();
        }
        for (id, targets) in a.transitions_from(s) {
            for &t in targets {
                out.add_transition(s, id, t).unwrap();
                if a.is_final(t) {
                    out.add_transition(s, id, b.initial() + off).unwrap();
                }
            }
        }
    }
    // A word of the first language may be empty, in which case reading
    // starts directly inside the second automaton.
    if a.is_final(a.initial()) {
        for (id, targets) in b.transitions_from(b.initial()) {
            for &t in targets {
                out.add_transition(a.initial(), id, t + off).unwrap();
            }
        }
    }
    for s in 0..b.num_states() as u32 {
        if b.is_final(s) {
            out.set_final(s + off, true).unwrap();
        }
        for (id, targets) in b.transitions_from(s) {
            for &t in targets {
                out.add_transition(s + off, id, t + off).unwrap();
            }
        }
    }
    out
}

/// Epsilon-free Kleene star of a unary NFA: a fresh accepting initial state
/// that restarts the automaton after every completed word.
fn star1(a: &MultiTapeAutomaton) -> MultiTapeAutomaton {
    let mut out = MultiTapeAutomaton::new(1, a.alphabet().clone(), a.num_states() + 1, 0).unwrap();
    out.set_final(0, true).unwrap();
    for (id, targets) in a.transitions_from(a.initial()) {
        for &t in targets {
            out.add_transition(0, id, t + 1).unwrap();
            if a.is_final(t) {
                out.add_transition(0, id, 0).unwrap();
            }
        }
    }
    for s in 0..a.num_states() as u32 {
        for (id, targets) in a.transitions_from(s) {
            for &t in targets {
                out.add_transition(s + 1, id, t + 1).unwrap();
                if a.is_final(t) {
                    out.add_transition(s + 1, id, 0).unwrap();
                }
            }
        }
    }
    out
}

/// The diagonal relation {(u, u) | u in L} of a unary language.
pub fn diag(l: &MultiTapeAutomaton) -> Result<MultiTapeAutomaton> {
    expect_unary(l)?;
    let radix = l.alphabet().len() as u32 + 1;
    let mut out = MultiTapeAutomaton::new(2, l.alphabet().clone(), l.num_states(), l.initial())?;
    for s in 0..l.num_states() as u32 {
        if l.is_final(s) {
            out.set_final(s, true)?;
        }
        for (id, targets) in l.transitions_from(s) {
            for &t in targets {
                out.add_transition(s, id * radix + id, t)?;
            }
        }
    }
    Ok(out)
}

/// The product L_1 × … × L_n of unary languages over a shared alphabet, as
/// an n-ary relation.
pub fn product_relation(factors: &[&MultiTapeAutomaton]) -> Result<MultiTapeAutomaton> {
    if factors.is_empty() {
        return Err(Error::Invalid("a product needs at least one factor".into()));
    }
    for f in factors {
        expect_unary(f)?;
    }
    let n = factors.len();
    if n == 1 {
        return Ok(factors[0].clone());
    }
    let mut acc = ops::cylindrify(factors[0], n, &[0])?;
    for (i, f) in factors.iter().enumerate().skip(1) {
        acc = ops::boolean_product(&acc, &ops::cylindrify(f, n, &[i])?, BoolOp::And)?;
    }
    Ok(ops::reduce(&ops::trim(&acc)))
}

/// {(u, u) | u in Σ*}.
pub fn equality(alphabet: &Alphabet) -> MultiTapeAutomaton {
    let radix = alphabet.len() as u32 + 1;
    let mut a = MultiTapeAutomaton::new(2, alphabet.clone(), 1, 0).unwrap();
    a.set_final(0, true).unwrap();
    for x in 1..radix {
        a.add_transition(0, x * radix + x, 0).unwrap();
    }
    a
}

/// {(u, v) | u is a proper prefix of v}.
pub fn strict_prefix(alphabet: &Alphabet) -> MultiTapeAutomaton {
    let radix = alphabet.len() as u32 + 1;
    let mut a = MultiTapeAutomaton::new(2, alphabet.clone(), 2, 0).unwrap();
    for x in 1..radix {
        a.add_transition(0, x * radix + x, 0).unwrap();
        a.add_transition(0, x, 1).unwrap();
        a.add_transition(1, x, 1).unwrap();
    }
    a.set_final(1, true).unwrap();
    a
}

/// {(u, v) | |u| = |v|}.
pub fn equal_length(alphabet: &Alphabet) -> MultiTapeAutomaton {
    let radix = alphabet.len() as u32 + 1;
    let mut a = MultiTapeAutomaton::new(2, alphabet.clone(), 1, 0).unwrap();
    a.set_final(0, true).unwrap();
    for x in 1..radix {
        for y in 1..radix {
            a.add_transition(0, x * radix + y, 0).unwrap();
        }
    }
    a
}

/// The finite relation containing exactly the given tuples.
pub fn finite_relation(
    alphabet: &Alphabet,
    arity: usize,
    tuples: &[WordTuple],
) -> Result<MultiTapeAutomaton> {
    if arity == 0 {
        return Err(Error::Arity {
            expected: 1,
            got: 0,
        });
    }
    let mut chains = Vec::new();
    for t in tuples {
        if t.arity() != arity {
            return Err(Error::Arity {
                expected: arity,
                got: t.arity(),
            });
        }
        let padded = crate::alphabet::pad_encode(t);
        let mut chain = MultiTapeAutomaton::new(arity, alphabet.clone(), padded.len() + 1, 0)?;
        for (i, col) in padded.columns().iter().enumerate() {
            chain.add_transition(i as u32, alphabet.encode(col)?, i as u32 + 1)?;
        }
        chain.set_final(padded.len() as u32, true)?;
        chains.push(chain);
    }
    if chains.is_empty() {
        return MultiTapeAutomaton::new(arity, alphabet.clone(), 1, 0);
    }
    let refs: Vec<&MultiTapeAutomaton> = chains.iter().collect();
    Ok(ops::reduce(&ops::nfa_union(&refs)?))
}

/// Seed-deterministic random automaton. Each (state, letter) slot receives
/// a uniformly chosen target with probability `density`; in
/// non-deterministic mode a second target is added with probability
/// `density`². Every state is final with probability 0.3, with one random
/// state promoted if none was. The sampling order is fixed, so a seed fully
/// determines the automaton.
pub fn random_automaton(
    alphabet: &Alphabet,
    arity: usize,
    state_count: usize,
    density: f64,
    deterministic: bool,
    seed: u64,
) -> Result<MultiTapeAutomaton> {
    if state_count == 0 {
        return Err(Error::Invalid("state_count must be at least 1".into()));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::Invalid(format!("density {density} not in (0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = MultiTapeAutomaton::new(arity, alphabet.clone(), state_count, 0)?;
    for s in 0..state_count as u32 {
        for letter in alphabet.letters(arity) {
            if rng.random_bool(density) {
                a.add_transition(s, letter, rng.random_range(0..state_count as u32))?;
            }
            if !deterministic && rng.random_bool(density * density) {
                a.add_transition(s, letter, rng.random_range(0..state_count as u32))?;
            }
        }
    }
    let mut any_final = false;
    for s in 0..state_count as u32 {
        if rng.random_bool(0.3) {
            a.set_final(s, true)?;
            any_final = true;
        }
    }
    if !any_final {
        a.set_final(rng.random_range(0..state_count as u32), true)?;
    }
    Ok(a)
}

/// Seed-deterministic random DAG: edges only go from lower to higher vertex
/// index, so acyclicity holds by construction. Source and target are
/// distinct random vertices.
pub fn random_dag(seed: u64, max_vertices: usize) -> Dag {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vertices = rng.random_range(2..=max_vertices.max(2));
    let mut edges = Vec::new();
    for i in 0..vertices as u32 {
        for j in i + 1..vertices as u32 {
            if rng.random_bool(1.0 / 6.0) {
                edges.push((i, j));
            }
        }
    }
    let source = rng.random_range(0..vertices as u32);
    let mut target = rng.random_range(0..vertices as u32 - 1);
    if target >= source {
        target += 1;
    }
    Dag {
        vertices,
        edges,
        source,
        target,
    }
}

/// Reduction from NFA universality: over Σ ∪ {#}, the relation
/// R = {(u, u) | u ∈ (Σ*#)*} ∪ (L#)* × (Σ*#)* is monadically decomposable
/// exactly when L = Σ*. Ground truth comes from the subset-construction
/// universality check, never from the decision procedure.
pub fn universality_reduction(a: &MultiTapeAutomaton) -> Result<ReductionInstance> {
    expect_unary(a)?;
    let base = a.alphabet();
    let hash_sym = Symbol::Char('#');
    if base.index_of(&hash_sym).is_some() || base.pad() == '#' {
        return Err(Error::Invalid("input alphabet already uses '#'".into()));
    }
    let mut symbols = base.symbols().to_vec();
    symbols.push(hash_sym.clone());
    let ext = Alphabet::new(symbols, base.pad())?;
    let hash_idx = ext.index_of(&hash_sym).expect("just inserted");
    let sigma: Vec<usize> = (0..ext.len()).filter(|&i| i != hash_idx).collect();

    let hash = single_letter(&ext, hash_idx);
    // (Σ*#)* minimizes to the canonical two-state machine.
    let blocks = ops::minimize(&star1(&concat1(&symbols_star(&ext, &sigma), &hash)));
    let r1 = diag(&blocks)?;
    let lifted = with_alphabet(a, &ext)?;
    let l_blocks = ops::reduce(&ops::trim(&star1(&concat1(&lifted, &hash))));
    let r2 = product_relation(&[&l_blocks, &blocks])?;
    let relation = ops::reduce(&ops::trim(&ops::nfa_union(&[&r1, &r2])?));

    let universal = ops::is_universal_padded(a);
    Ok(ReductionInstance {
        relation,
        ground_truth: if universal {
            Verdict::Decomposable
        } else {
            Verdict::NotDecomposable
        },
        provenance: format!(
            "universality reduction: {}-state unary NFA, language universal: {universal}",
            a.num_states()
        ),
    })
}

/// Reduction from DAG reachability: paths from the source spell pairs
/// (u, u) over per-edge letters, the target loops on the extra letter
/// a_{d+1}, and mismatched letter pairs fall into a sink. The relation is
/// monadically decomposable exactly when the target is unreachable. Ground
/// truth comes from breadth-first search on the graph.
pub fn dag_reduction(g: &Dag) -> Result<ReductionInstance> {
    let v = g.vertices;
    for &(a, b) in &g.edges {
        if a as usize >= v || b as usize >= v {
            return Err(Error::BadState {
                state: a.max(b),
                count: v,
            });
        }
    }
    if g.source as usize >= v || g.target as usize >= v {
        return Err(Error::BadState {
            state: g.source.max(g.target),
            count: v,
        });
    }
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); v];
    for &(a, b) in &g.edges {
        adj[a as usize].push(b);
    }
    for row in &mut adj {
        row.sort_unstable();
        row.dedup();
    }
    // Cycle check via iterative depth-first search with colors.
    let mut color = vec![0u8; v];
    for start in 0..v {
        if color[start] != 0 {
            continue;
        }
        let mut stack = vec![(start as u32, 0usize)];
        color[start] = 1;
        while let Some(&mut (u, ref mut i)) = stack.last_mut() {
            if *i < adj[u as usize].len() {
                let w = adj[u as usize][*i];
                *i += 1;
                match color[w as usize] {
                    0 => {
                        color[w as usize] = 1;
                        stack.push((w, 0));
                    }
                    1 => return Err(Error::Invalid("graph has a cycle".into())),
                    _ => {}
                }
            } else {
                color[u as usize] = 2;
                stack.pop();
            }
        }
    }

    let d = adj.iter().map(|r| r.len()).max().unwrap_or(0);
    let letter_chars: String = (0..=d).map(|i| (b'a' + i as u8) as char).collect();
    if d + 1 > 26 {
        return Err(Error::Invalid(format!(
            "outdegree {d} needs more than 26 letters"
        )));
    }
    let alphabet = Alphabet::base(&letter_chars)?;
    let m = alphabet.len() as u32;
    let radix = m + 1;
    let diag_id = |i: u32| (i + 1) * radix + (i + 1);

    let sink = v as u32;
    let mut a = MultiTapeAutomaton::new(2, alphabet.clone(), v + 1, g.source)?;
    a.set_final(g.target, true)?;
    let mut used = vec![vec![false; m as usize]; v + 1];
    for (u, row) in adj.iter().enumerate() {
        for (i, &w) in row.iter().enumerate() {
            a.add_transition(u as u32, diag_id(i as u32), w)?;
            used[u][i] = true;
        }
    }
    a.add_transition(g.target, diag_id(m - 1), g.target)?;
    used[g.target as usize][m as usize - 1] = true;
    // Complete the full-letter part: unused diagonals and every mismatch
    // drop into the sink.
    for s in 0..=v as u32 {
        for x in 0..m {
            for y in 0..m {
                if x != y || s == sink || !used[s as usize][x as usize] {
                    a.add_transition(s, (x + 1) * radix + (y + 1), sink)?;
                }
            }
        }
    }

    let mut reach = vec![false; v];
    reach[g.source as usize] = true;
    let mut queue = std::collections::VecDeque::from([g.source]);
    while let Some(u) = queue.pop_front() {
        for &w in &adj[u as usize] {
            if !reach[w as usize] {
                reach[w as usize] = true;
                queue.push_back(w);
            }
        }
    }
    let reachable = reach[g.target as usize];
    Ok(ReductionInstance {
        relation: a,
        ground_truth: if reachable { Verdict::NotDecomposable } else { Verdict::Decomposable },
        provenance: format!(
            "dag reduction: {v} vertices, {} edges, source {}, target {}, target reachable: {reachable}",
            g.edges.len(),
            g.source,
            g.target
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::base("ab").unwrap()
    }

    fn words(m: usize, max_len: usize) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = vec![vec![]];
        let mut layer: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for w in &layer {
                for s in 0..m {
                    let mut v = w.clone();
                    v.push(s);
                    next.push(v);
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }

    #[test]
    fn canonical_relations_behave() {
        let eq = equality(&ab());
        assert!(eq
            .accepts(&WordTuple::new(vec![vec![0, 1], vec![0, 1]]))
            .unwrap());
        assert!(!eq
            .accepts(&WordTuple::new(vec![vec![0, 1], vec![1, 0]]))
            .unwrap());
        let el = equal_length(&ab());
        assert!(el
            .accepts(&WordTuple::new(vec![vec![0, 1], vec![1, 0]]))
            .unwrap());
        assert!(!el
            .accepts(&WordTuple::new(vec![vec![0], vec![0, 1]]))
            .unwrap());
        let sp = strict_prefix(&ab());
        assert!(sp
            .accepts(&WordTuple::new(vec![vec![0], vec![0, 1]]))
            .unwrap());
        assert!(!sp.accepts(&WordTuple::new(vec![vec![0], vec![0]])).unwrap());
        assert!(!sp
            .accepts(&WordTuple::new(vec![vec![0, 1], vec![0]]))
            .unwrap());
        assert_eq!(ops::trim(&sp).num_states(), 2);
    }

    #[test]
    fn finite_relation_contains_exactly_its_tuples() {
        let tuples = vec![
            WordTuple::new(vec![vec![0], vec![1, 1]]),
            WordTuple::new(vec![vec![], vec![0]]),
            WordTuple::new(vec![vec![1, 0], vec![]]),
        ];
        let r = finite_relation(&ab(), 2, &tuples).unwrap();
        for u in words(2, 2) {
            for v in words(2, 2) {
                let t = WordTuple::new(vec![u.clone(), v.clone()]);
                let expect = tuples.iter().any(|x| x.words == t.words);
                assert_eq!(r.accepts(&t).unwrap(), expect, "{u:?} {v:?}");
            }
        }
        let empty = finite_relation(&ab(), 2, &[]).unwrap();
        assert!(ops::is_empty(&empty));
    }

    #[test]
    fn unary_algebra_builds_block_languages() {
        // '#' sorts before 'a' and 'b', so its symbol index is 0.
        let ext = Alphabet::base("ab#").unwrap();
        let hash_idx = ext.index_of(&Symbol::Char('#')).unwrap();
        assert_eq!(hash_idx, 0);
        let hash = single_letter(&ext, hash_idx);
        let hash_free: Vec<usize> = (0..3).filter(|&i| i != hash_idx).collect();
        let blocks = ops::minimize(&star1(&concat1(&symbols_star(&ext, &hash_free), &hash)));
        assert_eq!(blocks.num_states(), 2);
        for w in words(3, 4) {
            // (Σ*#)* is exactly: empty, or ending in #.
            let expect = w.is_empty() || w.last() == Some(&hash_idx);
            assert_eq!(
                blocks.accepts(&WordTuple::new(vec![w.clone()])).unwrap(),
                expect,
                "{w:?}"
            );
        }
    }

    #[test]
    fn universality_reduction_ground_truths() {
        // Σ* itself: universal.
        let all = symbols_star(&ab(), &[0, 1]);
        let inst = universality_reduction(&all).unwrap();
        assert_eq!(inst.ground_truth, Verdict::Decomposable);
        // Only "a": not universal.
        let just_a = single_letter(&ab(), 0);
        let inst = universality_reduction(&just_a).unwrap();
        assert_eq!(inst.ground_truth, Verdict::NotDecomposable);
        // R1 sanity: (w#, w#) always belongs. In the extended alphabet '#'
        // is symbol 0 and the base letters shift up by one.
        let hash = inst
            .relation
            .alphabet()
            .index_of(&Symbol::Char('#'))
            .unwrap();
        assert_eq!(hash, 0);
        for w in words(2, 3) {
            let mut x: Vec<usize> = w.iter().map(|&s| s + 1).collect();
            x.push(hash);
            let t = WordTuple::new(vec![x.clone(), x]);
            assert!(inst.relation.accepts(&t).unwrap(), "{w:?}");
        }
    }

    #[test]
    fn universality_reduction_matches_set_definition() {
        // Brute-force R1 ∪ R2 membership for all component lengths ≤ 6.
        // Words below run over the extended alphabet: 0 = '#', 1 = 'a',
        // 2 = 'b'; blocks are mapped back down for membership in L.
        let a = random_automaton(&ab(), 1, 3, 0.5, false, 11).unwrap();
        let inst = universality_reduction(&a).unwrap();
        let in_blocks = |w: &[usize]| w.is_empty() || *w.last().unwrap() == 0;
        let in_lang = |block: &[usize]| {
            let base: Vec<usize> = block.iter().map(|&s| s - 1).collect();
            a.accepts(&WordTuple::new(vec![base])).unwrap()
        };
        let in_l_blocks = |w: &[usize]| {
            if w.is_empty() {
                return true;
            }
            if *w.last().unwrap() != 0 {
                return false;
            }
            let parts: Vec<&[usize]> = w.split(|&s| s == 0).collect();
            parts[..parts.len() - 1].iter().all(|b| in_lang(b))
        };
        for u in words(3, 6) {
            for v in words(3, 6) {
                let r1 = u == v && in_blocks(&u);
                let r2 = in_l_blocks(&u) && in_blocks(&v);
                let got = inst
                    .relation
                    .accepts(&WordTuple::new(vec![u.clone(), v.clone()]))
                    .unwrap();
                assert_eq!(got, r1 || r2, "u={u:?} v={v:?}");
            }
        }
    }

    #[test]
    fn dag_reduction_examples() {
        // Single edge source → target: reachable, not decomposable.
        let g = Dag {
            vertices: 2,
            edges: vec![(0, 1)],
            source: 0,
            target: 1,
        };
        let inst = dag_reduction(&g).unwrap();
        assert_eq!(inst.ground_truth, Verdict::NotDecomposable);
        assert!(inst.relation.is_deterministic());
        // No edges, distinct source/target: empty relation.
        let g = Dag {
            vertices: 2,
            edges: vec![],
            source: 0,
            target: 1,
        };
        let inst = dag_reduction(&g).unwrap();
        assert_eq!(inst.ground_truth, Verdict::Decomposable);
        assert!(ops::is_empty(&inst.relation));
        // Cycles are rejected.
        let g = Dag {
            vertices: 2,
            edges: vec![(0, 1), (1, 0)],
            source: 0,
            target: 1,
        };
        assert!(dag_reduction(&g).is_err());
    }

    #[test]
    fn dag_relation_is_the_diagonal_of_its_path_language() {
        let g = Dag {
            vertices: 4,
            edges: vec![(0, 1), (0, 2), (1, 3), (2, 3)],
            source: 0,
            target: 3,
        };
        let inst = dag_reduction(&g).unwrap();
        let m = inst.relation.alphabet().len();
        // Simulate the construction independently: follow letters through
        // the DAG (i-th sorted out-edge = i-th letter), then loops on the
        // last letter at the target.
        let path_word = |w: &[usize]| -> bool {
            let mut adj: Vec<Vec<u32>> = vec![Vec::new(); g.vertices];
            for &(a, b) in &g.edges {
                adj[a as usize].push(b);
            }
            for row in &mut adj {
                row.sort_unstable();
            }
            let mut cur = g.source;
            let mut i = 0;
            while i < w.len() {
                if cur == g.target && w[i..].iter().all(|&s| s == m - 1) {
                    return true;
                }
                match adj[cur as usize].get(w[i]) {
                    Some(&next) => cur = next,
                    None => return false,
                }
                i += 1;
            }
            cur == g.target
        };
        for u in words(m, 3) {
            for v in words(m, 3) {
                let got = inst
                    .relation
                    .accepts(&WordTuple::new(vec![u.clone(), v.clone()]))
                    .unwrap();
                let expect = u == v && path_word(&u);
                assert_eq!(got, expect, "u={u:?} v={v:?}");
            }
        }
    }

    #[test]
    fn random_generators_are_seed_deterministic() {
        let a = random_automaton(&ab(), 2, 5, 0.4, false, 42).unwrap();
        let b = random_automaton(&ab(), 2, 5, 0.4, false, 42).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, random_automaton(&ab(), 2, 5, 0.4, false, 43).unwrap());
        let full = random_automaton(&ab(), 2, 4, 1.0, true, 7).unwrap();
        assert!(full.is_deterministic());
        assert!(full.is_complete());
        let g1 = random_dag(9, 12);
        let g2 = random_dag(9, 12);
        assert_eq!(g1.edges, g2.edges);
        assert_eq!(
            (g1.vertices, g1.source, g1.target),
            (g2.vertices, g2.source, g2.target)
        );
        assert_ne!(g1.source, g1.target);
        dag_reduction(&g1).unwrap();
    }

    #[test]
    fn products_and_diagonals_compose() {
        // a* × b* accepts (aa, b) and rejects (b, b).
        let astar = symbols_star(&ab(), &[0]);
        let bstar = symbols_star(&ab(), &[1]);
        let p = product_relation(&[&astar, &bstar]).unwrap();
        assert!(p
            .accepts(&WordTuple::new(vec![vec![0, 0], vec![1]]))
            .unwrap());
        assert!(!p.accepts(&WordTuple::new(vec![vec![1], vec![1]])).unwrap());
        let d = diag(&astar).unwrap();
        assert!(d
            .accepts(&WordTuple::new(vec![vec![0, 0], vec![0, 0]]))
            .unwrap());
        assert!(!d
            .accepts(&WordTuple::new(vec![vec![0], vec![0, 0]]))
            .unwrap());
        // Ternary product keeps arity.
        let t = product_relation(&[&astar, &bstar, &astar]).unwrap();
        assert_eq!(t.arity(), 3);
        assert!(t
            .accepts(&WordTuple::new(vec![vec![0], vec![1, 1], vec![]]))
            .unwrap());
    }
}
