//! Necessary conditions on the tables of a machine obeying the primed
//! contextuality family, used to narrow domains during search.
//!
//! They assume every state will be reachable from the initial one, which
//! the search guarantees. Leaves are always confirmed by the checker.

use super::partial::{sign_bit, PartialAutomaton};
use crate::observables::{Context, ObsId, Sign};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    /// A value no other table shares pins the memory on every observable
    /// compatible with it.
    FixMemory,
    /// A table contradicting a context may stay put on at most one of its members.
    StayOnce,
    /// A contradiction must be repaired by other tables.
    Repair,
}

impl Rule {
    /// Position in the usual numbering of the table rules.
    pub fn number(self) -> u8 {
        match self {
            Rule::FixMemory => 3,
            Rule::StayOnce => 4,
            Rule::Repair => 5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Propagation {
    Consistent(PartialAutomaton),
    Refuted(Rule),
}

/// Applies the rules until nothing changes.
pub fn propagate(p: &PartialAutomaton) -> Propagation {
    let mut p = p.clone();
    match narrow(&mut p) {
        Ok(()) => Propagation::Consistent(p),
        Err(rule) => Propagation::Refuted(rule),
    }
}

pub(crate) fn narrow(p: &mut PartialAutomaton) -> Result<(), Rule> {
    loop {
        let before = p.clone();
        fix_memory(p)?;
        for q in 0..p.num_states() {
            for c in p.structure().contexts() {
                if contradicts(p, q, c) {
                    stay_once(p, q, c)?;
                    repair(p, q, c)?;
                }
            }
        }
        if *p == before {
            return Ok(());
        }
    }
}

fn fix_memory(p: &mut PartialAutomaton) -> Result<(), Rule> {
    let s = p.structure();
    for x in 0..p.num_observables() {
        for q in 0..p.num_states() {
            let Some(v) = p.value(q, x) else { continue };
            let unique = (0..p.num_states()).all(|j| j == q || p.value(j, x) == Some(-v));
            if !unique {
                continue;
            }
            for y in (0..p.num_observables())
                .filter(|&y| y == x || s.contexts_containing(x).any(|c| s.contexts()[c].contains(y)))
            {
                if !p.restrict_next(q, y, 1 << q) {
                    return Err(Rule::FixMemory);
                }
            }
        }
    }
    Ok(())
}

fn contradicts(p: &PartialAutomaton, q: usize, c: &Context) -> bool {
    let values: Option<Vec<Sign>> = c.members.iter().map(|&x| p.value(q, x)).collect();
    values.is_some_and(|v| Sign::product(v) != c.parity)
}

fn stay_once(p: &mut PartialAutomaton, q: usize, c: &Context) -> Result<(), Rule> {
    let stays: Vec<ObsId> = c.members.iter().copied().filter(|&x| p.next(q, x) == Some(q)).collect();
    match stays.len() {
        0 => Ok(()),
        1 => {
            for &x in c.members.iter().filter(|&&x| x != stays[0]) {
                if !p.restrict_next(q, x, !(1 << q)) {
                    return Err(Rule::StayOnce);
                }
            }
            Ok(())
        }
        _ => Err(Rule::StayOnce),
    }
}

/// Measuring a member `x` first from `q` and then the rest of the context
/// must end in a state whose table satisfies the context and keeps `x`'s
/// value. One table agrees with `T_q` on at most two members, so the other
/// tables must jointly cover all three.
fn repair(p: &PartialAutomaton, q: usize, c: &Context) -> Result<(), Rule> {
    let own: Vec<u8> = c.members.iter().map(|&x| sign_bit(p.value(q, x).expect("fixed on the context"))).collect();
    // Bit m of a cover: some table agrees with T_q on member m.
    let mut covers = 1u8 << 0;
    for j in (0..p.num_states()).filter(|&j| j != q) {
        let mut options = 1u8 << 0;
        for bits in 0u8..8 {
            let signs: [Sign; 3] = std::array::from_fn(|m| if bits >> m & 1 == 1 { Sign::Minus } else { Sign::Plus });
            if Sign::product(signs) != c.parity {
                continue;
            }
            if (0..3).all(|m| p.value_domain(j, c.members[m]) & sign_bit(signs[m]) != 0) {
                let agree = (0..3).filter(|&m| sign_bit(signs[m]) == own[m]).fold(0u8, |a, m| a | 1 << m);
                options |= 1 << agree;
            }
        }
        let mut next = 0u8;
        for have in (0..8).filter(|&h| covers >> h & 1 == 1) {
            for add in (0..8).filter(|&a| options >> a & 1 == 1) {
                next |= 1 << (have | add);
            }
        }
        covers = next;
    }
    if covers >> 7 & 1 == 1 {
        Ok(())
    } else {
        Err(Rule::Repair)
    }
}
