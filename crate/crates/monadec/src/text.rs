//! Line-oriented automaton text format.
//!
//! ```text
//! arity 2
//! alphabet a b
//! pad _
//! states 3
//! initial 0
//! final 1
//! trans 0 (a,a) 0
//! trans 0 (_,a) 1
//! ```
//!
//! One declaration per line. A line whose first non-blank character is `#`
//! is a comment; inline comments are not supported because `#` is a common
//! alphabet symbol. Transition letters are written the way
//! [`Alphabet::display_letter`] prints them: a bare symbol for arity 1,
//! otherwise a parenthesized comma-separated tuple with the pad character
//! for padded tapes. Packed symbols keep their own inner parentheses, with
//! `_` for an embedded pad, so an induced-relation letter reads
//! `((a,_),!)`. [`print_automaton`] emits a canonical form (finals
//! ascending, transitions in source/letter/target order) and
//! [`parse_automaton`] inverts it exactly.

use crate::alphabet::{Alphabet, ColumnLetter, Symbol};
use crate::automaton::MultiTapeAutomaton;
use crate::{Error, Result};

/// Renders an automaton in the canonical text form. Transitions come out in
/// source, then letter id, then target order, so equal automata print to
/// equal strings and `parse_automaton(print_automaton(a)) == a`.
pub fn print_automaton(a: &MultiTapeAutomaton) -> String {
    let alphabet = a.alphabet();
    let mut out = String::new();
    out.push_str(&format!("arity {}\n", a.arity()));
    let symbols: Vec<String> = alphabet.symbols().iter().map(|s| s.to_string()).collect();
    out.push_str(&format!("alphabet {}\n", symbols.join(" ")));
    out.push_str(&format!("pad {}\n", alphabet.pad()));
    out.push_str(&format!("states {}\n", a.num_states()));
    out.push_str(&format!("initial {}\n", a.initial()));
    let finals: Vec<String> = a.final_states().map(|f| f.to_string()).collect();
    if !finals.is_empty() {
        out.push_str(&format!("final {}\n", finals.join(" ")));
    }
    for s in 0..a.num_states() as u32 {
        for (letter, targets) in a.transitions_from(s) {
            let shown = alphabet
                .display_letter(a.arity(), letter)
                .expect("stored transition letters are valid");
            for &t in targets {
                out.push_str(&format!("trans {s} {shown} {t}\n"));
            }
        }
    }
    out
}

/// Parses the text form. Errors carry the 1-based line number.
pub fn parse_automaton(input: &str) -> Result<MultiTapeAutomaton> {
    let fail = |line: usize, msg: String| Error::Parse { line, msg };
    let mut arity: Option<usize> = None;
    let mut symbols: Option<Vec<Symbol>> = None;
    let mut pad: Option<char> = None;
    let mut states: Option<usize> = None;
    let mut initial: Option<u32> = None;
    let mut finals: Vec<(usize, u32)> = Vec::new();
    let mut automaton: Option<MultiTapeAutomaton> = None;

    for (idx, raw) in input.lines().enumerate() {
        let no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let keyword = tokens.next().expect("non-empty line has a first token");
        let rest: Vec<&str> = tokens.collect();
        match keyword {
            "arity" => {
                let v: usize =
                    one_number(&rest).ok_or_else(|| fail(no, "arity wants one number".into()))?;
                arity = Some(v);
            }
            "alphabet" => {
                if rest.is_empty() {
                    return Err(fail(no, "alphabet wants at least one symbol".into()));
                }
                let mut list = Vec::new();
                for tok in &rest {
                    list.push(parse_symbol(tok).map_err(|msg| fail(no, msg))?);
                }
                symbols = Some(list);
            }
            "pad" => {
                if rest.len() != 1 || rest[0].chars().count() != 1 {
                    return Err(fail(no, "pad wants one character".into()));
                }
                pad = Some(rest[0].chars().next().expect("checked length"));
            }
            "states" => {
                let v: usize =
                    one_number(&rest).ok_or_else(|| fail(no, "states wants one number".into()))?;
                states = Some(v);
            }
            "initial" => {
                let v: u32 = one_number(&rest)
                    .ok_or_else(|| fail(no, "initial wants one state number".into()))?;
                initial = Some(v);
            }
            "final" => {
                for tok in &rest {
                    let f: u32 = tok
                        .parse()
                        .map_err(|_| fail(no, format!("bad final state '{tok}'")))?;
                    finals.push((no, f));
                }
            }
            "trans" => {
                if automaton.is_none() {
                    automaton = Some(build(
                        no, &arity, &symbols, &pad, &states, &initial, &finals,
                    )?);
                    finals.clear();
                }
                let a = automaton.as_mut().expect("just built");
                if rest.len() != 3 {
                    return Err(fail(no, "trans wants: source letter target".into()));
                }
                let from: u32 = rest[0]
                    .parse()
                    .map_err(|_| fail(no, format!("bad source state '{}'", rest[0])))?;
                let to: u32 = rest[2]
                    .parse()
                    .map_err(|_| fail(no, format!("bad target state '{}'", rest[2])))?;
                let letter =
                    parse_letter(a.alphabet(), a.arity(), rest[1]).map_err(|msg| fail(no, msg))?;
                a.add_transition(from, letter, to)
                    .map_err(|e| fail(no, format!("bad transition: {e}")))?;
            }
            other => {
                return Err(fail(no, format!("unknown declaration '{other}'")));
            }
        }
    }
    match automaton {
        Some(a) => Ok(a),
        // No transitions at all: legal for automata over empty behaviour.
        None => build(
            input.lines().count() + 1,
            &arity,
            &symbols,
            &pad,
            &states,
            &initial,
            &finals,
        ),
    }
}

fn one_number<T: std::str::FromStr>(rest: &[&str]) -> Option<T> {
    if rest.len() == 1 {
        rest[0].parse().ok()
    } else {
        None
    }
}

fn build(
    line: usize,
    arity: &Option<usize>,
    symbols: &Option<Vec<Symbol>>,
    pad: &Option<char>,
    states: &Option<usize>,
    initial: &Option<u32>,
    finals: &[(usize, u32)],
) -> Result<MultiTapeAutomaton> {
    let fail = |line: usize, msg: String| Error::Parse { line, msg };
    let missing = |what: &str| fail(line, format!("missing '{what}' declaration"));
    let arity = arity.ok_or_else(|| missing("arity"))?;
    let symbols = symbols.clone().ok_or_else(|| missing("alphabet"))?;
    let pad = pad.ok_or_else(|| missing("pad"))?;
    let states = states.ok_or_else(|| missing("states"))?;
    let initial = initial.ok_or_else(|| missing("initial"))?;
    let alphabet =
        Alphabet::new(symbols, pad).map_err(|e| fail(line, format!("bad alphabet: {e}")))?;
    let mut a = MultiTapeAutomaton::new(arity, alphabet, states, initial)
        .map_err(|e| fail(line, format!("bad header: {e}")))?;
    for &(no, f) in finals {
        a.set_final(f, true)
            .map_err(|e| fail(no, format!("bad final state: {e}")))?;
    }
    Ok(a)
}

/// A symbol token: one character, or `(e1,...,ek)` with single-character
/// entries where `_` marks an embedded pad.
fn parse_symbol(tok: &str) -> std::result::Result<Symbol, String> {
    if let Some(inner) = tok.strip_prefix('(').and_then(|t| t.strip_suffix(')')) {
        let mut entries = Vec::new();
        for part in inner.split(',') {
            let mut chars = part.chars();
            let (Some(c), None) = (chars.next(), chars.next()) else {
                return Err(format!("bad packed symbol '{tok}'"));
            };
            entries.push(if c == '_' { None } else { Some(c) });
        }
        if entries.iter().all(|e| e.is_none()) {
            return Err(format!("packed symbol '{tok}' is all-pad"));
        }
        Ok(Symbol::Packed(entries))
    } else {
        let mut chars = tok.chars();
        let (Some(c), None) = (chars.next(), chars.next()) else {
            return Err(format!("bad symbol '{tok}'"));
        };
        Ok(Symbol::Char(c))
    }
}

/// A transition letter token, in [`Alphabet::display_letter`] form.
fn parse_letter(alphabet: &Alphabet, arity: usize, tok: &str) -> std::result::Result<u32, String> {
    let entries: Vec<&str> = if arity == 1 {
        vec![tok]
    } else {
        let inner = tok
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| format!("letter '{tok}' is not a parenthesized {arity}-tuple"))?;
        let parts = split_top_level(inner);
        if parts.len() != arity {
            return Err(format!(
                "letter '{tok}' has {} entries, automaton has arity {arity}",
                parts.len()
            ));
        }
        parts
    };
    let mut column = Vec::new();
    for part in entries {
        if part.chars().count() == 1 && part.starts_with(alphabet.pad()) {
            column.push(None);
            continue;
        }
        let sym = parse_symbol(part)?;
        let index = alphabet
            .index_of(&sym)
            .ok_or_else(|| format!("symbol '{part}' is not in the alphabet"))?;
        column.push(Some(index));
    }
    let col = ColumnLetter::new(column).map_err(|e| format!("bad letter '{tok}': {e}"))?;
    alphabet
        .encode(&col)
        .map_err(|e| format!("bad letter '{tok}': {e}"))
}

/// Splits on commas that are not nested inside parentheses.
fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}
