//! Graphviz export.

use crate::automaton::MultiTapeAutomaton;
use crate::ops;

/// Renders the automaton as a DOT digraph: one node per state (doublecircle
/// for finals), a point pseudo-node marking the initial state, and one edge
/// per transition labeled with its column letter. The header comments how
/// many states survive trimming, so sinks left by completion or
/// complementation are easy to spot before plotting.
pub fn to_dot(a: &MultiTapeAutomaton) -> String {
    let live = ops::trim(a).num_states();
    let total = a.num_states();
    let mut out = String::new();
    out.push_str("digraph automaton {\n");
    if live == total {
        out.push_str(&format!("  // {total} states, all live under trim\n"));
    } else {
        out.push_str(&format!(
            "  // {total} states, {live} live under trim (the rest are sinks or unreachable)\n"
        ));
    }
    out.push_str("  rankdir=LR;\n");
    out.push_str("  __start [shape=point, label=\"\"];\n");
    for s in 0..a.num_states() as u32 {
        let shape = if a.is_final(s) {
            "doublecircle"
        } else {
            "circle"
        };
        out.push_str(&format!("  q{s} [shape={shape}, label=\"{s}\"];\n"));
    }
    out.push_str(&format!("  __start -> q{};\n", a.initial()));
    for s in 0..a.num_states() as u32 {
        for (letter, targets) in a.transitions_from(s) {
            let shown = a
                .alphabet()
                .display_letter(a.arity(), letter)
                .expect("stored transition letters are valid");
            for &t in targets {
                out.push_str(&format!("  q{s} -> q{t} [label=\"{}\"];\n", escape(&shown)));
            }
        }
    }
    out.push_str("}\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;

    #[test]
    fn equality_exports_one_state_and_a_start_marker() {
        let mut a = MultiTapeAutomaton::new(2, Alphabet::base("ab").unwrap(), 1, 0).unwrap();
        a.set_final(0, true).unwrap();
        a.add_transition(0, 4, 0).unwrap();
        a.add_transition(0, 8, 0).unwrap();
        let dot = to_dot(&a);
        assert!(dot.starts_with("digraph automaton {"));
        assert!(dot.contains("1 states, all live under trim"));
        assert!(dot.contains("q0 [shape=doublecircle"));
        assert!(dot.contains("__start -> q0;"));
        assert!(dot.contains("q0 -> q0 [label=\"(a,a)\"];"));
        assert!(dot.contains("q0 -> q0 [label=\"(b,b)\"];"));
    }

    #[test]
    fn dead_states_show_up_in_the_header() {
        let mut a = MultiTapeAutomaton::new(1, Alphabet::base("ab").unwrap(), 3, 0).unwrap();
        a.set_final(1, true).unwrap();
        a.add_transition(0, 1, 1).unwrap();
        a.add_transition(0, 2, 2).unwrap();
        let dot = to_dot(&a);
        assert!(dot.contains("3 states, 2 live under trim"), "{dot}");
        assert!(dot.contains("q2 [shape=circle"));
    }
}
