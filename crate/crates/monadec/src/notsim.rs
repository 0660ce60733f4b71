//! Construction of the distinguishability relation for a binary relation R.
//!
//! Two words w, w' are distinguishable when some witness u separates them:
//! exactly one of R(w,u), R(w',u) holds, or exactly one of R(u,w), R(u,w')
//! does. Monadic decomposability of R is equivalent to this relation having
//! finite "reachability diameter", which is what the decision procedure in
//! [`crate::decide`] tests on the automaton built here.

use crate::automaton::MultiTapeAutomaton;
use crate::ops::{self, BoolOp};
use crate::{Error, Result};

/// The distinguishability automaton together with the size of the ternary
/// union it was projected from. That size bounds how much longer than
/// max(|w|, |w'|) a shortest witness u can need to be, which the test
/// oracles rely on.
#[derive(Clone, Debug)]
pub struct NotSim {
    pub automaton: MultiTapeAutomaton,
    pub pre_projection_states: usize,
}

/// Builds the binary automaton recognizing the set of distinguishable pairs.
pub fn build_not_sim(r: &MultiTapeAutomaton) -> Result<MultiTapeAutomaton> {
    Ok(build_not_sim_parts(r)?.automaton)
}

/// As [`build_not_sim`], but also reports the pre-projection state count.
///
/// Steps: determinize and minimize R into D, complement it within the valid
/// paddings into Dc, cylindrify both onto the tape pairs (0,2), (1,2), (2,0)
/// and (2,1) of a ternary automaton whose third tape carries the witness,
/// intersect per disjunct, union the four disjuncts, and finally project the
/// witness tape away. Every intermediate stage is trimmed and reduced, which
/// keeps sizes polynomial in practice without changing any language.
pub fn build_not_sim_parts(r: &MultiTapeAutomaton) -> Result<NotSim> {
    if r.arity() != 2 {
        return Err(Error::Arity {
            expected: 2,
            got: r.arity(),
        });
    }
    let d = ops::minimize(r);
    let dc = ops::complement_padded(&d);

    let part = |w_side: &MultiTapeAutomaton,
                wp_side: &MultiTapeAutomaton,
                flipped: bool|
     -> Result<MultiTapeAutomaton> {
        // Watched tape pairs: (w,u) and (w',u), or (u,w) and (u,w') when the
        // witness sits on the left of R.
        let (pos_w, pos_wp): (&[usize], &[usize]) = if flipped {
            (&[2, 0], &[2, 1])
        } else {
            (&[0, 2], &[1, 2])
        };
        let a = ops::cylindrify(w_side, 3, pos_w)?;
        let b = ops::cylindrify(wp_side, 3, pos_wp)?;
        Ok(ops::reduce_forward_only(&ops::trim(&ops::boolean_product(
            &a,
            &b,
            BoolOp::And,
        )?)))
    };

    let parts = [
        part(&d, &dc, false)?, // R(w,u)  and not R(w',u)
        part(&dc, &d, false)?, // not R(w,u)  and R(w',u)
        part(&d, &dc, true)?,  // R(u,w)  and not R(u,w')
        part(&dc, &d, true)?,  // not R(u,w)  and R(u,w')
    ];
    let union = ops::reduce_forward_only(&ops::nfa_union(&[
        &parts[0], &parts[1], &parts[2], &parts[3],
    ])?);
    let pre_projection_states = union.num_states();
    let automaton = ops::reduce(&ops::project(&union, 2)?);
    Ok(NotSim {
        automaton,
        pre_projection_states,
    })
}
