//! The n-tape automaton: a plain NFA over column letters, with acceptance
//! defined on the padded spelling of a word tuple.

use crate::alphabet::{pad_encode, Alphabet, WordTuple};
use crate::{Error, Result};
use std::collections::BTreeMap;

const NO_SUCCESSORS: &[u32] = &[];

/// An NFA over the column letters of `alphabet` at a fixed arity. The
/// relation it recognizes is the set of tuples whose padded spelling it
/// accepts; runs over invalid paddings carry no meaning.
///
/// Transition targets are kept sorted and deduplicated, and letters are
/// iterated in id order everywhere, so construction order never leaks into
/// results built from this type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiTapeAutomaton {
    arity: usize,
    alphabet: Alphabet,
    initial: u32,
    finals: Vec<bool>,
    trans: Vec<BTreeMap<u32, Vec<u32>>>,
}

/// An arity-2 automaton. Only a reading aid: arity is checked at runtime.
pub type BinaryRelationAutomaton = MultiTapeAutomaton;

impl MultiTapeAutomaton {
    pub fn new(arity: usize, alphabet: Alphabet, states: usize, initial: u32) -> Result<Self> {
        if arity == 0 {
            return Err(Error::Invalid("arity must be at least 1".into()));
        }
        if states == 0 || (initial as usize) >= states {
            return Err(Error::BadState {
                state: initial,
                count: states,
            });
        }
        alphabet.letter_count(arity);
        Ok(MultiTapeAutomaton {
            arity,
            alphabet,
            initial,
            finals: vec![false; states],
            trans: vec![BTreeMap::new(); states],
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.finals.len()
    }

    pub fn initial(&self) -> u32 {
        self.initial
    }

    pub fn add_state(&mut self) -> u32 {
        self.finals.push(false);
        self.trans.push(BTreeMap::new());
        self.finals.len() as u32 - 1
    }

    fn check_state(&self, state: u32) -> Result<()> {
        if (state as usize) < self.num_states() {
            Ok(())
        } else {
            Err(Error::BadState {
                state,
                count: self.num_states(),
            })
        }
    }

    pub fn set_initial(&mut self, state: u32) -> Result<()> {
        self.check_state(state)?;
        self.initial = state;
        Ok(())
    }

    pub fn is_final(&self, state: u32) -> bool {
        self.finals[state as usize]
    }

    pub fn set_final(&mut self, state: u32, value: bool) -> Result<()> {
        self.check_state(state)?;
        self.finals[state as usize] = value;
        Ok(())
    }

    pub fn final_states(&self) -> impl Iterator<Item = u32> + '_ {
        self.finals
            .iter()
            .enumerate()
            .filter(|(_, &f)| f)
            .map(|(s, _)| s as u32)
    }

    pub fn add_transition(&mut self, from: u32, letter: u32, to: u32) -> Result<()> {
        self.check_state(from)?;
        self.check_state(to)?;
        if letter == 0 || letter > self.alphabet.letter_count(self.arity) {
            return Err(Error::BadLetter {
                letter,
                arity: self.arity,
            });
        }
        let targets = self.trans[from as usize].entry(letter).or_default();
        if let Err(pos) = targets.binary_search(&to) {
            targets.insert(pos, to);
        }
        Ok(())
    }

    pub fn successors(&self, state: u32, letter: u32) -> &[u32] {
        self.trans[state as usize]
            .get(&letter)
            .map_or(NO_SUCCESSORS, Vec::as_slice)
    }

    /// Outgoing transitions of one state, in letter order.
    pub fn transitions_from(&self, state: u32) -> impl Iterator<Item = (u32, &[u32])> {
        self.trans[state as usize]
            .iter()
            .map(|(&l, t)| (l, t.as_slice()))
    }

    pub fn for_each_transition(&self, mut f: impl FnMut(u32, u32, u32)) {
        for from in 0..self.num_states() as u32 {
            for (letter, targets) in self.transitions_from(from) {
                for &to in targets {
                    f(from, letter, to);
                }
            }
        }
    }

    pub fn transition_count(&self) -> usize {
        self.trans
            .iter()
            .flat_map(|m| m.values())
            .map(Vec::len)
            .sum()
    }

    /// One subset-step: all states reachable from `set` on `letter`.
    /// `set` must be sorted; the result is sorted and deduplicated.
    pub fn step(&self, set: &[u32], letter: u32) -> Vec<u32> {
        let mut out: Vec<u32> = set
            .iter()
            .flat_map(|&s| self.successors(s, letter))
            .copied()
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Runs the automaton on raw letter ids from the initial state.
    pub fn run_letters(&self, letters: &[u32]) -> Result<Vec<u32>> {
        let mut cur = vec![self.initial];
        for &l in letters {
            if l == 0 || l > self.alphabet.letter_count(self.arity) {
                return Err(Error::BadLetter {
                    letter: l,
                    arity: self.arity,
                });
            }
            cur = self.step(&cur, l);
        }
        Ok(cur)
    }

    /// Whether the padded spelling of `t` is accepted.
    pub fn accepts(&self, t: &WordTuple) -> Result<bool> {
        if t.arity() != self.arity {
            return Err(Error::Arity {
                expected: self.arity,
                got: t.arity(),
            });
        }
        let mut cur = vec![self.initial];
        for col in pad_encode(t).columns() {
            let id = self.alphabet.encode(col)?;
            cur = self.step(&cur, id);
            if cur.is_empty() {
                return Ok(false);
            }
        }
        Ok(cur.iter().any(|&s| self.is_final(s)))
    }

    pub fn is_deterministic(&self) -> bool {
        self.trans
            .iter()
            .flat_map(|m| m.values())
            .all(|t| t.len() <= 1)
    }

    pub fn is_complete(&self) -> bool {
        let count = self.alphabet.letter_count(self.arity) as usize;
        self.trans
            .iter()
            .all(|m| m.len() == count && m.values().all(|t| !t.is_empty()))
    }

    /// Renames state `s` to `perm[s]`; `perm` must be a permutation.
    pub fn permute_states(&self, perm: &[u32]) -> Result<Self> {
        if perm.len() != self.num_states() {
            return Err(Error::Invalid(
                "permutation length differs from state count".into(),
            ));
        }
        let mut seen = vec![false; perm.len()];
        for &p in perm {
            self.check_state(p)?;
            if std::mem::replace(&mut seen[p as usize], true) {
                return Err(Error::Invalid("state permutation repeats an index".into()));
            }
        }
        let mut out = Self::new(
            self.arity,
            self.alphabet.clone(),
            self.num_states(),
            perm[self.initial as usize],
        )?;
        for (s, &f) in self.finals.iter().enumerate() {
            out.finals[perm[s] as usize] = f;
        }
        self.for_each_transition(|from, letter, to| {
            out.add_transition(perm[from as usize], letter, perm[to as usize])
                .unwrap();
        });
        Ok(out)
    }

    /// Reorders tapes: tape `j` of the result reads what tape `perm[j]` read.
    pub fn permute_tapes(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.arity {
            return Err(Error::Arity {
                expected: self.arity,
                got: perm.len(),
            });
        }
        let mut seen = vec![false; self.arity];
        for &p in perm {
            if p >= self.arity || std::mem::replace(&mut seen[p], true) {
                return Err(Error::Invalid("invalid tape permutation".into()));
            }
        }
        let mut out = Self::new(
            self.arity,
            self.alphabet.clone(),
            self.num_states(),
            self.initial,
        )?;
        out.finals = self.finals.clone();
        let mut result = Ok(());
        self.for_each_transition(|from, letter, to| {
            if result.is_err() {
                return;
            }
            result = (|| {
                let col = self.alphabet.decode(self.arity, letter)?;
                let entries = perm.iter().map(|&p| col.entries()[p]).collect();
                let id = self
                    .alphabet
                    .encode(&crate::alphabet::ColumnLetter::new(entries)?)?;
                out.add_transition(from, id, to)
            })();
        });
        result?;
        Ok(out)
    }
}
