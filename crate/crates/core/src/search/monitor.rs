//! Domain narrowing from the primed contextuality and compatibility
//! families.
//!
//! Every state of a machine the search produces is reachable, so under a
//! primed family each fixed transition is the middle of some checked run.
//! Following fixed transitions from every state with the family's monitor
//! tells what the targets of the still open transitions will be asked to
//! answer; targets whose tables disagree are dropped.

use super::partial::{sign_bit, PartialAutomaton};
use crate::checker::Family;
use crate::observables::{Context, ObsId, ObservableStructure, Sign};

#[derive(Clone, Debug)]
pub(crate) struct Monitors {
    contexts: Vec<Context>,
    /// Per observable, the observables that must leave its value alone.
    keeps: Vec<u32>,
}

impl Monitors {
    pub fn new(s: &ObservableStructure, families: &[Family]) -> Monitors {
        let all = families.contains(&Family::AllPrime);
        let contexts = if all || families.contains(&Family::ContextPrime) { s.contexts().to_vec() } else { Vec::new() };
        let keeps = if all || families.contains(&Family::CompatPrime) {
            (0..s.len()).map(|y| s.compat_mask(y)).collect()
        } else {
            Vec::new()
        };
        Monitors { contexts, keeps }
    }

    pub fn is_empty(&self) -> bool {
        self.contexts.is_empty() && self.keeps.is_empty()
    }

    /// `false` when some run is already bound to fail.
    pub fn narrow(&self, p: &mut PartialAutomaton) -> bool {
        self.contexts.iter().all(|c| narrow_context(p, c))
            && self.keeps.iter().enumerate().all(|(y, &moves)| narrow_keep(p, y, moves))
    }
}

/// States that may still answer `v` on `x`.
fn allowing(p: &PartialAutomaton, x: ObsId, v: Sign) -> u32 {
    (0..p.num_states()).filter(|&u| p.value_domain(u, x) & sign_bit(v) != 0).map(|u| 1 << u).sum()
}

type Record = [Option<Sign>; 3];

fn record_index(r: &Record) -> usize {
    r.iter().fold(0, |acc, v| 3 * acc + v.map_or(0, |v| 1 + usize::from(v.is_minus())))
}

fn narrow_context(p: &mut PartialAutomaton, c: &Context) -> bool {
    let k = p.num_states();
    let mut seen = vec![false; 27 * k];
    let mut stack: Vec<(usize, Record)> = (0..k).map(|q| (q, [None; 3])).collect();
    while let Some((t, r)) = stack.pop() {
        let slot = 27 * t + record_index(&r);
        if seen[slot] {
            continue;
        }
        seen[slot] = true;
        for (j, &x) in c.members.iter().enumerate() {
            let Some(v) = p.value(t, x) else { continue };
            if r[j].is_some_and(|old| old != v) {
                return false;
            }
            let mut r2 = r;
            r2[j] = Some(v);
            let known: Vec<usize> = (0..3).filter(|&i| r2[i].is_some()).collect();
            let mut mask = known.iter().fold(u32::MAX, |m, &i| m & allowing(p, c.members[i], r2[i].unwrap()));
            match known.len() {
                3 if Sign::product(r2.iter().flatten().copied()) != c.parity => return false,
                2 => {
                    let z = (0..3).find(|i| r2[*i].is_none()).unwrap();
                    let forced = c.parity * Sign::product(r2.iter().flatten().copied());
                    mask &= allowing(p, c.members[z], forced);
                }
                _ => {}
            }
            if !p.restrict_next(t, x, mask) {
                return false;
            }
            if let Some(u) = p.next(t, x) {
                stack.push((u, r2));
            }
        }
    }
    true
}

fn narrow_keep(p: &mut PartialAutomaton, y: ObsId, moves: u32) -> bool {
    let (k, n) = (p.num_states(), p.num_observables());
    let mut required = vec![0u8; k];
    let mut stack = Vec::new();
    for q in 0..k {
        if let Some(v) = p.value(q, y) {
            if !p.restrict_next(q, y, allowing(p, y, v)) {
                return false;
            }
            if let Some(t) = p.next(q, y) {
                stack.push((t, v));
            }
        }
    }
    while let Some((t, v)) = stack.pop() {
        if required[t] & sign_bit(v) != 0 {
            continue;
        }
        required[t] |= sign_bit(v);
        if !p.restrict_value(t, y, required[t]) {
            return false;
        }
        let mask = allowing(p, y, v);
        for x in (0..n).filter(|&x| moves >> x & 1 == 1) {
            if !p.restrict_next(t, x, mask) {
                return false;
            }
            if let Some(u) = p.next(t, x) {
                stack.push((u, v));
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{a3, a4};
    use crate::observables::StructureKind;

    fn pm() -> &'static ObservableStructure {
        StructureKind::Pm.structure()
    }

    #[test]
    fn which_monitors_apply() {
        assert!(Monitors::new(pm(), &[Family::Context, Family::Compat, Family::All]).is_empty());
        let m = Monitors::new(pm(), &[Family::ContextPrime]);
        assert_eq!((m.contexts.len(), m.keeps.len()), (6, 0));
        let m = Monitors::new(pm(), &[Family::AllPrime]);
        assert_eq!((m.contexts.len(), m.keeps.len()), (6, 9));
    }

    #[test]
    fn obeying_machines_are_untouched() {
        for (a, families) in
            [(a3(), vec![Family::ContextPrime]), (a4(), vec![Family::ContextPrime, Family::CompatPrime])]
        {
            let mut p = PartialAutomaton::from_automaton(&a);
            let before = p.clone();
            assert!(Monitors::new(pm(), &families).narrow(&mut p));
            assert_eq!(p, before);
        }
    }

    #[test]
    fn violations_are_refuted() {
        let mut p = PartialAutomaton::from_automaton(&a3());
        assert!(!Monitors::new(pm(), &[Family::CompatPrime]).narrow(&mut p));
        let plus = crate::automaton::MealyAutomaton::constant(StructureKind::Pm, &[Sign::Plus; 9]).unwrap();
        let mut p = PartialAutomaton::from_automaton(&plus);
        assert!(!Monitors::new(pm(), &[Family::ContextPrime]).narrow(&mut p));
    }

    #[test]
    fn targets_must_agree_on_the_measured_value() {
        let mut p = PartialAutomaton::new(StructureKind::Pm, 2);
        for x in 0..9 {
            p.restrict_value(0, x, sign_bit(Sign::Plus));
            p.restrict_value(1, x, sign_bit(Sign::Minus));
        }
        assert!(Monitors::new(pm(), &[Family::CompatPrime]).narrow(&mut p));
        for x in 0..9 {
            assert_eq!(p.next(0, x), Some(0));
            assert_eq!(p.next(1, x), Some(1));
        }
    }
}
