//! Alphabets, column letters, and the padded encoding of word tuples.
//!
//! An n-tuple of words is fed to an automaton as a single word over columns:
//! height-n tuples over Σ ∪ {⊥} in which shorter components are padded with
//! ⊥ at the end. The all-⊥ column is not a letter. Columns are packed into
//! dense `u32` ids (mixed radix, tape 0 most significant, ⊥ as digit 0) so
//! that id order equals lexicographic column order with ⊥ first.

use crate::{Error, Result};
use std::fmt;

/// Reserved by the text format; never usable as a symbol character.
const RESERVED: [char; 5] = ['(', ')', ',', '_', '!'];

/// One alphabet symbol. Base symbols are single characters. Packed symbols
/// arise when tapes are grouped: a packed symbol is a column over the base
/// alphabet, `None` marking the base pad. A packed symbol is never all-pad.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Char(char),
    Packed(Vec<Option<char>>),
}

impl Symbol {
    fn validate(&self) -> Result<()> {
        let ok_char = |c: char| !c.is_whitespace() && !c.is_control() && !RESERVED.contains(&c);
        match self {
            Symbol::Char(c) if ok_char(*c) => Ok(()),
            Symbol::Char(c) => Err(Error::Invalid(format!(
                "character {c:?} cannot be a symbol"
            ))),
            Symbol::Packed(entries) => {
                if entries.iter().all(|e| e.is_none()) {
                    return Err(Error::AllPadColumn);
                }
                if entries.len() < 2 {
                    return Err(Error::Invalid(
                        "packed symbols group at least two tapes".into(),
                    ));
                }
                for e in entries.iter().flatten() {
                    if !ok_char(*e) {
                        return Err(Error::Invalid(format!(
                            "character {e:?} cannot be a symbol"
                        )));
                    }
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Char(c) => write!(f, "{c}"),
            Symbol::Packed(entries) => {
                write!(f, "(")?;
                for (i, e) in entries.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    match e {
                        Some(c) => write!(f, "{c}")?,
                        None => write!(f, "_")?,
                    }
                }
                write!(f, ")")
            }
        }
    }
}

/// A finite, canonically sorted symbol set plus the rendering of its pad.
/// Words and columns refer to symbols by index into this set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<Symbol>,
    pad: char,
}

impl Alphabet {
    pub fn new(mut symbols: Vec<Symbol>, pad: char) -> Result<Self> {
        symbols.sort();
        symbols.dedup();
        if symbols.is_empty() {
            return Err(Error::Invalid("alphabet must not be empty".into()));
        }
        for s in &symbols {
            s.validate()?;
            if *s == Symbol::Char(pad) {
                return Err(Error::Invalid(format!(
                    "pad {pad:?} collides with a symbol"
                )));
            }
        }
        if pad.is_whitespace() || pad.is_control() || ['(', ')', ','].contains(&pad) {
            return Err(Error::Invalid(format!(
                "character {pad:?} cannot be the pad"
            )));
        }
        Ok(Alphabet { symbols, pad })
    }

    /// Base alphabet from the characters of `chars`, padded with `_`.
    pub fn base(chars: &str) -> Result<Self> {
        Self::new(chars.chars().map(Symbol::Char).collect(), '_')
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn pad(&self) -> char {
        self.pad
    }

    pub fn symbol(&self, index: usize) -> Result<&Symbol> {
        self.symbols.get(index).ok_or(Error::BadSymbol {
            index,
            count: self.symbols.len(),
        })
    }

    pub fn index_of(&self, s: &Symbol) -> Option<usize> {
        self.symbols.binary_search(s).ok()
    }

    fn radix(&self) -> u64 {
        self.symbols.len() as u64 + 1
    }

    /// Number of valid column letters at the given arity; ids are
    /// `1..=letter_count`. Panics if the id space outgrows `u32`.
    pub fn letter_count(&self, arity: usize) -> u32 {
        assert!(arity >= 1, "arity must be at least 1");
        let n = self
            .radix()
            .checked_pow(arity as u32)
            .filter(|&n| n <= u32::MAX as u64 + 1)
            .expect("alphabet too large for this arity");
        (n - 1) as u32
    }

    pub fn letters(&self, arity: usize) -> impl Iterator<Item = u32> {
        1..=self.letter_count(arity)
    }

    pub fn encode(&self, col: &ColumnLetter) -> Result<u32> {
        self.letter_count(col.arity());
        let mut id = 0u64;
        for e in col.entries() {
            let digit = match e {
                None => 0,
                Some(i) => {
                    self.symbol(*i)?;
                    *i as u64 + 1
                }
            };
            id = id * self.radix() + digit;
        }
        Ok(id as u32)
    }

    pub fn decode(&self, arity: usize, id: u32) -> Result<ColumnLetter> {
        if id == 0 || id > self.letter_count(arity) {
            return Err(Error::BadLetter { letter: id, arity });
        }
        let mut entries = vec![None; arity];
        let mut rest = id as u64;
        for e in entries.iter_mut().rev() {
            let digit = rest % self.radix();
            rest /= self.radix();
            *e = if digit == 0 {
                None
            } else {
                Some(digit as usize - 1)
            };
        }
        ColumnLetter::new(entries)
    }

    /// Entry of one tape of a valid letter id, without materializing the
    /// whole column.
    pub fn entry(&self, arity: usize, id: u32, tape: usize) -> Option<usize> {
        debug_assert!(id >= 1 && id <= self.letter_count(arity) && tape < arity);
        let digit = (id as u64 / self.radix().pow((arity - 1 - tape) as u32)) % self.radix();
        if digit == 0 {
            None
        } else {
            Some(digit as usize - 1)
        }
    }

    /// Renders a column letter the way the text format spells it: bare
    /// symbol-or-pad at arity 1, parenthesized tuple otherwise.
    pub fn display_letter(&self, arity: usize, id: u32) -> Result<String> {
        let col = self.decode(arity, id)?;
        let entry = |e: &Option<usize>| -> Result<String> {
            Ok(match e {
                None => self.pad.to_string(),
                Some(i) => self.symbol(*i)?.to_string(),
            })
        };
        if arity == 1 {
            return entry(&col.entries()[0]);
        }
        let parts: Vec<String> = col.entries().iter().map(entry).collect::<Result<_>>()?;
        Ok(format!("({})", parts.join(",")))
    }

    pub fn display_word(&self, word: &[usize]) -> Result<String> {
        let parts: Vec<String> = word
            .iter()
            .map(|&i| Ok(self.symbol(i)?.to_string()))
            .collect::<Result<_>>()?;
        Ok(parts.join(" "))
    }
}

/// One column of a padded tuple: symbol indices with `None` for ⊥, at least
/// one entry non-pad.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ColumnLetter {
    entries: Vec<Option<usize>>,
}

impl ColumnLetter {
    pub fn new(entries: Vec<Option<usize>>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Invalid("a column needs at least one tape".into()));
        }
        if entries.iter().all(|e| e.is_none()) {
            return Err(Error::AllPadColumn);
        }
        Ok(ColumnLetter { entries })
    }

    pub fn arity(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Option<usize>] {
        &self.entries
    }
}

/// A tuple of words over one alphabet, each word a sequence of symbol
/// indices. Components may have different lengths.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WordTuple {
    pub words: Vec<Vec<usize>>,
}

impl WordTuple {
    pub fn new(words: Vec<Vec<usize>>) -> Self {
        WordTuple { words }
    }

    pub fn arity(&self) -> usize {
        self.words.len()
    }
}

/// The padded spelling of a tuple: a sequence of columns, none of them
/// all-pad, every column of the same height.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PaddedWord {
    arity: usize,
    columns: Vec<ColumnLetter>,
}

impl PaddedWord {
    pub fn new(arity: usize, columns: Vec<ColumnLetter>) -> Result<Self> {
        if arity == 0 {
            return Err(Error::Invalid("arity must be at least 1".into()));
        }
        for c in &columns {
            if c.arity() != arity {
                return Err(Error::Arity {
                    expected: arity,
                    got: c.arity(),
                });
            }
        }
        Ok(PaddedWord { arity, columns })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn columns(&self) -> &[ColumnLetter] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }
}

/// Spells out a tuple column by column, padding each component past its end.
/// The result has max component length many columns and no all-pad column.
pub fn pad_encode(t: &WordTuple) -> PaddedWord {
    assert!(t.arity() >= 1, "arity must be at least 1");
    let len = t.words.iter().map(Vec::len).max().unwrap();
    let columns = (0..len)
        .map(|j| {
            ColumnLetter::new(t.words.iter().map(|w| w.get(j).copied()).collect())
                .expect("some component is live at every column up to the max length")
        })
        .collect();
    PaddedWord {
        arity: t.arity(),
        columns,
    }
}

/// Inverse of [`pad_encode`]: rejects sequences in which a tape carries a
/// symbol after its padding began.
pub fn pad_decode(p: &PaddedWord) -> Result<WordTuple> {
    let mut words = vec![Vec::new(); p.arity()];
    let mut ended = vec![false; p.arity()];
    for col in &p.columns {
        for (tape, e) in col.entries().iter().enumerate() {
            match e {
                Some(_) if ended[tape] => return Err(Error::InvalidPadding { tape }),
                Some(i) => words[tape].push(*i),
                None => ended[tape] = true,
            }
        }
    }
    Ok(WordTuple { words })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SliceMode {
    Prefix,
    Suffix,
}

/// First or last `i` symbols of a word; errors if the word is shorter.
pub fn word_slice(w: &[usize], i: usize, mode: SliceMode) -> Result<Vec<usize>> {
    if i > w.len() {
        return Err(Error::Invalid(format!(
            "cannot take {i} symbols of a length-{} word",
            w.len()
        )));
    }
    Ok(match mode {
        SliceMode::Prefix => w[..i].to_vec(),
        SliceMode::Suffix => w[w.len() - i..].to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::base("ab").unwrap()
    }

    #[test]
    fn symbols_sort_canonically() {
        let a = Alphabet::new(
            vec![Symbol::Char('b'), Symbol::Char('a'), Symbol::Char('b')],
            '_',
        )
        .unwrap();
        assert_eq!(a.symbols(), &[Symbol::Char('a'), Symbol::Char('b')]);
        assert_eq!(a.index_of(&Symbol::Char('b')), Some(1));
    }

    #[test]
    fn pad_may_not_collide() {
        assert!(Alphabet::new(vec![Symbol::Char('a')], 'a').is_err());
        assert!(Alphabet::base("a(").is_err());
    }

    #[test]
    fn letter_ids_roundtrip_and_order_pads_first() {
        let a = ab();
        assert_eq!(a.letter_count(2), 8);
        let mut cols = Vec::new();
        for id in a.letters(2) {
            let col = a.decode(2, id).unwrap();
            assert_eq!(a.encode(&col).unwrap(), id);
            for tape in 0..2 {
                assert_eq!(a.entry(2, id, tape), col.entries()[tape]);
            }
            cols.push(col.entries().to_vec());
        }
        assert_eq!(cols[0], vec![None, Some(0)]);
        assert_eq!(cols[7], vec![Some(1), Some(1)]);
        let mut sorted = cols.clone();
        sorted.sort();
        assert_eq!(cols, sorted);
    }

    #[test]
    fn all_pad_column_is_rejected() {
        assert!(matches!(
            ColumnLetter::new(vec![None, None]),
            Err(Error::AllPadColumn)
        ));
        assert_eq!(
            ab().encode(&ColumnLetter::new(vec![None, Some(0)]).unwrap())
                .unwrap(),
            1
        );
    }

    #[test]
    fn pads_ragged_tuple_columnwise() {
        // (a, ε, ab) spells out as the two columns (a,⊥,a)(⊥,⊥,b).
        let t = WordTuple::new(vec![vec![0], vec![], vec![0, 1]]);
        let p = pad_encode(&t);
        assert_eq!(p.len(), 2);
        assert_eq!(p.columns()[0].entries(), &[Some(0), None, Some(0)]);
        assert_eq!(p.columns()[1].entries(), &[None, None, Some(1)]);
        assert_eq!(pad_decode(&p).unwrap(), t);
    }

    #[test]
    fn empty_tuple_has_no_columns() {
        let t = WordTuple::new(vec![vec![], vec![]]);
        assert!(pad_encode(&t).is_empty());
        assert_eq!(pad_decode(&pad_encode(&t)).unwrap(), t);
    }

    #[test]
    fn resumed_tape_is_invalid() {
        let cols = vec![
            ColumnLetter::new(vec![None, Some(0)]).unwrap(),
            ColumnLetter::new(vec![Some(0), Some(0)]).unwrap(),
        ];
        let p = PaddedWord::new(2, cols).unwrap();
        assert!(matches!(
            pad_decode(&p),
            Err(Error::InvalidPadding { tape: 0 })
        ));
    }

    #[test]
    fn packed_symbols_render_with_base_pad() {
        let s = Symbol::Packed(vec![Some('a'), None]);
        assert_eq!(s.to_string(), "(a,_)");
        assert!(Symbol::Packed(vec![None, None]).validate().is_err());
    }

    #[test]
    fn slices_take_either_end() {
        let w = vec![0, 1, 0];
        assert_eq!(word_slice(&w, 2, SliceMode::Prefix).unwrap(), vec![0, 1]);
        assert_eq!(word_slice(&w, 2, SliceMode::Suffix).unwrap(), vec![1, 0]);
        assert_eq!(
            word_slice(&w, 0, SliceMode::Suffix).unwrap(),
            Vec::<usize>::new()
        );
        assert!(word_slice(&w, 4, SliceMode::Prefix).is_err());
    }
}
