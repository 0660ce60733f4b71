//! Packing tape groups: the induced binary views R_k of an n-ary relation,
//! and the bijection δ between word tuples and packed words.
//!
//! Grouping tapes 1..k and k+1..n turns each column into a pair of packed
//! symbols. A group whose entries are all ⊥ contributes the fresh pad ⊥′
//! (written `!`), so the packed pair is again a valid padded spelling.

use crate::alphabet::{
    pad_decode, pad_encode, Alphabet, ColumnLetter, PaddedWord, Symbol, WordTuple,
};
use crate::automaton::MultiTapeAutomaton;
use crate::{Error, Result};

pub const PACKED_PAD: char = '!';

/// Σ_k: the alphabet of height-k columns over a base alphabet, with the
/// all-⊥ column excluded and a fresh pad ⊥′ on top.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PackedAlphabet {
    base: Alphabet,
    width: usize,
}

impl PackedAlphabet {
    pub fn new(base: &Alphabet, width: usize) -> Result<Self> {
        if width == 0 {
            return Err(Error::Invalid("packing width must be at least 1".into()));
        }
        if width > 1 && base.symbols().iter().any(|s| !matches!(s, Symbol::Char(_))) {
            return Err(Error::Invalid(
                "cannot pack an already packed alphabet".into(),
            ));
        }
        base.letter_count(width);
        Ok(PackedAlphabet {
            base: base.clone(),
            width,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn base(&self) -> &Alphabet {
        &self.base
    }

    pub fn pad(&self) -> char {
        PACKED_PAD
    }

    /// Packs one height-`width` column into a symbol. Width-1 columns stay
    /// plain symbols; the all-⊥ column is not packable.
    pub fn pack(&self, entries: &[Option<usize>]) -> Result<Symbol> {
        if entries.len() != self.width {
            return Err(Error::Arity {
                expected: self.width,
                got: entries.len(),
            });
        }
        if self.width == 1 {
            return match entries[0] {
                Some(i) => Ok(self.base.symbol(i)?.clone()),
                None => Err(Error::AllPadColumn),
            };
        }
        if entries.iter().all(Option::is_none) {
            return Err(Error::AllPadColumn);
        }
        let chars = entries
            .iter()
            .map(|e| {
                Ok(match e {
                    None => None,
                    Some(i) => match self.base.symbol(*i)? {
                        Symbol::Char(c) => Some(*c),
                        Symbol::Packed(_) => unreachable!("checked at construction"),
                    },
                })
            })
            .collect::<Result<_>>()?;
        Ok(Symbol::Packed(chars))
    }

    /// Inverse of [`pack`].
    pub fn unpack(&self, s: &Symbol) -> Result<Vec<Option<usize>>> {
        let unknown =
            || Error::Invalid(format!("symbol {s} is not a width-{} packing", self.width));
        if self.width == 1 {
            let i = self.base.index_of(s).ok_or_else(unknown)?;
            return Ok(vec![Some(i)]);
        }
        match s {
            Symbol::Packed(chars) if chars.len() == self.width => chars
                .iter()
                .map(|c| {
                    Ok(match c {
                        None => None,
                        Some(c) => Some(self.base.index_of(&Symbol::Char(*c)).ok_or_else(unknown)?),
                    })
                })
                .collect(),
            _ => Err(unknown()),
        }
    }

    /// All (|Σ|+1)^width − 1 packed symbols, in canonical order.
    pub fn symbols(&self) -> Vec<Symbol> {
        self.base
            .letters(self.width)
            .map(|l| {
                self.pack(self.base.decode(self.width, l).unwrap().entries())
                    .unwrap()
            })
            .collect()
    }
}

/// δ: a tuple of words as the single packed word spelling its columns.
pub fn delta_encode(base: &Alphabet, t: &WordTuple) -> Result<Vec<Symbol>> {
    let pa = PackedAlphabet::new(base, t.arity())?;
    pad_encode(t)
        .columns()
        .iter()
        .map(|c| pa.pack(c.entries()))
        .collect()
}

/// Inverse of [`delta_encode`]; rejects symbols of the wrong shape and
/// packed words whose residual padding is invalid.
pub fn delta_decode(base: &Alphabet, arity: usize, w: &[Symbol]) -> Result<WordTuple> {
    let pa = PackedAlphabet::new(base, arity)?;
    let columns = w
        .iter()
        .map(|s| ColumnLetter::new(pa.unpack(s)?))
        .collect::<Result<_>>()?;
    pad_decode(&PaddedWord::new(arity, columns)?)
}

/// The alphabet Σ′ = Σ_k ∪ Σ_{n−k} both tapes of an induced binary relation
/// range over, padded by ⊥′.
pub fn induced_alphabet(base: &Alphabet, k: usize, n: usize) -> Result<Alphabet> {
    let mut symbols = PackedAlphabet::new(base, k)?.symbols();
    symbols.extend(PackedAlphabet::new(base, n - k)?.symbols());
    Alphabet::new(symbols, PACKED_PAD)
}

/// The induced binary relation R_k: tapes 1..k packed against tapes k+1..n.
/// States, initial, finals, and the transition count are inherited; only
/// letters are relabeled, a group mapping to its packed symbol or to ⊥′ when
/// every entry is ⊥.
pub fn induced_binary(r: &MultiTapeAutomaton, k: usize) -> Result<MultiTapeAutomaton> {
    let n = r.arity();
    if n < 2 {
        return Err(Error::Invalid(
            "induced views need at least two tapes".into(),
        ));
    }
    if k == 0 || k >= n {
        return Err(Error::Invalid(format!(
            "split position {k} is not inside 1..{}",
            n - 1
        )));
    }
    let alpha = induced_alphabet(r.alphabet(), k, n)?;
    let left = PackedAlphabet::new(r.alphabet(), k)?;
    let right = PackedAlphabet::new(r.alphabet(), n - k)?;
    let lambda = |pa: &PackedAlphabet, half: &[Option<usize>]| -> Result<Option<usize>> {
        if half.iter().all(Option::is_none) {
            return Ok(None);
        }
        let s = pa.pack(half)?;
        Ok(Some(
            alpha
                .index_of(&s)
                .expect("every packed symbol is in the union alphabet"),
        ))
    };
    let mut out = MultiTapeAutomaton::new(2, alpha.clone(), r.num_states(), r.initial())?;
    for s in 0..r.num_states() as u32 {
        if r.is_final(s) {
            out.set_final(s, true)?;
        }
    }
    let mut relabel = std::collections::HashMap::new();
    for from in 0..r.num_states() as u32 {
        for (l, targets) in r.transitions_from(from) {
            let nl = match relabel.get(&l) {
                Some(&nl) => nl,
                None => {
                    let col = r.alphabet().decode(n, l)?;
                    let pair = ColumnLetter::new(vec![
                        lambda(&left, &col.entries()[..k])?,
                        lambda(&right, &col.entries()[k..])?,
                    ])?;
                    let nl = alpha.encode(&pair)?;
                    relabel.insert(l, nl);
                    nl
                }
            };
            for &t in targets {
                out.add_transition(from, nl, t)?;
            }
        }
    }
    Ok(out)
}

/// Packs the first k and remaining components of a tuple: the pair of words
/// related by R_k exactly when the tuple is in R.
pub fn split_tuple(
    base: &Alphabet,
    t: &WordTuple,
    k: usize,
    induced: &Alphabet,
) -> Result<WordTuple> {
    let n = t.arity();
    if k == 0 || k >= n {
        return Err(Error::Invalid(format!(
            "split position {k} is not inside 1..{}",
            n - 1
        )));
    }
    let word = |words: &[Vec<usize>]| -> Result<Vec<usize>> {
        let symbols = delta_encode(base, &WordTuple::new(words.to_vec()))?;
        Ok(symbols
            .iter()
            .map(|s| {
                induced
                    .index_of(s)
                    .expect("every packed symbol is in the union alphabet")
            })
            .collect())
    };
    Ok(WordTuple::new(vec![
        word(&t.words[..k])?,
        word(&t.words[k..])?,
    ]))
}
