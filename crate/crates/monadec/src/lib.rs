//! Synchronized multi-tape automata over padded word tuples, and a decision
//! procedure for whether the relation such an automaton recognizes is
//! monadic decomposable, i.e. expressible as a finite union of products of
//! regular languages.
//!
//! The pipeline: an n-ary relation is reduced to binary views (`induced`),
//! each binary relation is turned into the automaton for the pairs of words
//! that some context distinguishes (`notsim`), and non-decomposability is
//! then a quadruple-reachability question on that automaton (`decide`),
//! answered together with a replayable certificate.

pub mod alphabet;
pub mod automaton;
mod bits;
pub mod decide;
pub mod dot;
pub mod generators;
pub mod induced;
pub mod notsim;
pub mod ops;
pub mod text;

pub use alphabet::{
    pad_decode, pad_encode, word_slice, Alphabet, ColumnLetter, PaddedWord, SliceMode, Symbol,
    WordTuple,
};
pub use automaton::{BinaryRelationAutomaton, MultiTapeAutomaton};
pub use decide::{
    bounded_antichain_search, decide_binary, decide_binary_threads, decide_nary,
    decide_nary_threads, expand_family, validate_certificate, validate_certificate_report,
    BinaryDecision, Certificate, Decision, KReport, Verdict,
};
pub use notsim::{build_not_sim, build_not_sim_parts, NotSim};

/// Errors shared by every module: structural misuse of an automaton, invalid
/// encodings, and text-format problems.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("arity mismatch: expected {expected}, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("state {state} out of range ({count} states)")]
    BadState { state: u32, count: usize },
    #[error("letter id {letter} is not valid for arity {arity}")]
    BadLetter { letter: u32, arity: usize },
    #[error("symbol index {index} out of range ({count} symbols)")]
    BadSymbol { index: usize, count: usize },
    #[error("a column with every tape padded is not a letter")]
    AllPadColumn,
    #[error("invalid padding: tape {tape} carries a symbol after its pad began")]
    InvalidPadding { tape: usize },
    #[error("alphabets differ between operands")]
    AlphabetMismatch,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
