//! Partially specified automata and checks that only look at fixed cells.

use std::collections::VecDeque;

use crate::automaton::MealyAutomaton;
use crate::checker::{Family, ORDERS};
use crate::observables::{ObsId, ObservableStructure, Sign, StructureKind};
use crate::oracle::StabilizerSpace;

pub const PLUS: u8 = 1;
pub const MINUS: u8 = 2;
const ANY_VALUE: u8 = PLUS | MINUS;

fn full_mask(k: usize) -> u32 {
    if k >= 32 {
        u32::MAX
    } else {
        (1 << k) - 1
    }
}

pub(crate) fn sign_bit(v: Sign) -> u8 {
    if v.is_minus() {
        MINUS
    } else {
        PLUS
    }
}

/// Value and transition tables with a domain per cell: a set of allowed
/// outcomes and a set of allowed target states.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartialAutomaton {
    kind: StructureKind,
    k: usize,
    n: usize,
    values: Vec<u8>,
    next: Vec<u32>,
    /// States `0..created` have been referenced; targets beyond `created` are
    /// not yet available to branching.
    created: usize,
}

impl PartialAutomaton {
    /// Nothing fixed; state 0 is the initial state.
    pub fn new(kind: StructureKind, k: usize) -> PartialAutomaton {
        assert!((1..=32).contains(&k), "state count must be in 1..=32");
        let n = kind.structure().len();
        PartialAutomaton { kind, k, n, values: vec![ANY_VALUE; k * n], next: vec![full_mask(k); k * n], created: 1 }
    }

    /// Every cell fixed to the automaton's entry.
    pub fn from_automaton(a: &MealyAutomaton) -> PartialAutomaton {
        let mut p = PartialAutomaton::new(a.kind(), a.num_states());
        for q in 0..a.num_states() {
            for x in 0..a.num_observables() {
                p.assign(q, x, a.value(q, x), a.next(q, x));
            }
        }
        p.created = a.num_states();
        p
    }

    pub fn kind(&self) -> StructureKind {
        self.kind
    }

    pub fn structure(&self) -> &'static ObservableStructure {
        self.kind.structure()
    }

    pub fn num_states(&self) -> usize {
        self.k
    }

    pub fn num_observables(&self) -> usize {
        self.n
    }

    pub fn created(&self) -> usize {
        self.created
    }

    pub fn value_domain(&self, q: usize, x: ObsId) -> u8 {
        self.values[q * self.n + x]
    }

    pub fn next_domain(&self, q: usize, x: ObsId) -> u32 {
        self.next[q * self.n + x]
    }

    pub fn value(&self, q: usize, x: ObsId) -> Option<Sign> {
        match self.value_domain(q, x) {
            PLUS => Some(Sign::Plus),
            MINUS => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn next(&self, q: usize, x: ObsId) -> Option<usize> {
        let d = self.next_domain(q, x);
        (d.count_ones() == 1).then(|| d.trailing_zeros() as usize)
    }

    pub fn is_fixed(&self, q: usize, x: ObsId) -> bool {
        self.value(q, x).is_some() && self.next(q, x).is_some()
    }

    /// Intersects a value domain; `false` if it becomes empty.
    pub fn restrict_value(&mut self, q: usize, x: ObsId, mask: u8) -> bool {
        let cell = &mut self.values[q * self.n + x];
        *cell &= mask;
        *cell != 0
    }

    /// Intersects a target domain; `false` if it becomes empty.
    pub fn restrict_next(&mut self, q: usize, x: ObsId, mask: u32) -> bool {
        let cell = &mut self.next[q * self.n + x];
        *cell &= mask;
        *cell != 0
    }

    pub fn assign(&mut self, q: usize, x: ObsId, v: Sign, target: usize) {
        self.values[q * self.n + x] = sign_bit(v);
        self.next[q * self.n + x] = 1 << target;
        self.created = self.created.max(target + 1).max(q + 1);
    }

    /// Resets a cell to the full domain.
    pub fn forget(&mut self, q: usize, x: ObsId) {
        self.values[q * self.n + x] = ANY_VALUE;
        self.next[q * self.n + x] = full_mask(self.k);
    }

    pub fn to_automaton(&self) -> Option<MealyAutomaton> {
        let mut values = Vec::with_capacity(self.k * self.n);
        let mut next = Vec::with_capacity(self.k * self.n);
        for q in 0..self.k {
            for x in 0..self.n {
                values.push(self.value(q, x)?);
                next.push(self.next(q, x)?);
            }
        }
        MealyAutomaton::new(self.kind, values, next, 0).ok()
    }

    /// Value table of `q` if fully fixed, as a mask with bit `x` set for `-1`.
    pub fn table_mask(&self, q: usize) -> Option<u32> {
        (0..self.n).try_fold(0u32, |m, x| Some(m | u32::from(self.value(q, x)?.is_minus()) << x))
    }

    pub(crate) fn set_created(&mut self, created: usize) {
        self.created = created;
    }
}

/// Outcome of looking for violations among the fixed cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Probe {
    /// Every completion violates some family.
    Violation,
    /// Nothing decided yet; this cell is the first one the checks need.
    Needs(usize, ObsId),
    /// Every completion of the unfixed cells obeys.
    Clear,
}

/// Runs every family's product search on the fixed part of `p`.
pub fn probe(p: &PartialAutomaton, families: &[Family], space: Option<&StabilizerSpace>) -> Probe {
    let mut hint: Option<(usize, ObsId)> = None;
    let (reached, reach_hint) = known_reachable(p);
    for &f in families {
        let starts: Vec<usize> = if f.is_prime() { reached.clone() } else { vec![0] };
        for &s in &starts {
            let found = match f.base() {
                Family::Rc => rc(p, s, &mut hint),
                Family::Repeat => repeat(p, s, &mut hint),
                Family::Context => {
                    p.structure().contexts().iter().any(|c| context(p, s, &c.members, c.parity, &mut hint))
                }
                Family::Compat => (0..p.n).any(|y| compat(p, s, y, &mut hint)),
                Family::All => all(p, s, space.expect("stabilizer space for the all family"), &mut hint),
                _ => unreachable!(),
            };
            if found {
                return Probe::Violation;
            }
        }
    }
    let needs_reach = families.iter().any(|f| f.is_prime());
    match hint.or(if needs_reach { reach_hint } else { None }) {
        Some((q, x)) => Probe::Needs(q, x),
        None => Probe::Clear,
    }
}

fn note(hint: &mut Option<(usize, ObsId)>, q: usize, x: ObsId) {
    hint.get_or_insert((q, x));
}

/// States certainly reachable from 0, and the first unfixed transition met.
fn known_reachable(p: &PartialAutomaton) -> (Vec<usize>, Option<(usize, ObsId)>) {
    let mut seen = vec![false; p.k];
    seen[0] = true;
    let mut queue = VecDeque::from([0]);
    let mut hint = None;
    while let Some(q) = queue.pop_front() {
        for x in 0..p.n {
            match p.next(q, x) {
                Some(t) if !seen[t] => {
                    seen[t] = true;
                    queue.push_back(t);
                }
                Some(_) => {}
                None => note(&mut hint, q, x),
            }
        }
    }
    ((0..p.k).filter(|&q| seen[q]).collect(), hint)
}

fn rc(p: &PartialAutomaton, s: usize, hint: &mut Option<(usize, ObsId)>) -> bool {
    for c in p.structure().contexts() {
        'order: for order in ORDERS {
            let (mut q, mut product) = (s, Sign::Plus);
            for (i, &j) in order.iter().enumerate() {
                let x = c.members[j];
                let Some(v) = p.value(q, x) else {
                    note(hint, q, x);
                    continue 'order;
                };
                product = product * v;
                if i < 2 {
                    let Some(t) = p.next(q, x) else {
                        note(hint, q, x);
                        continue 'order;
                    };
                    q = t;
                }
            }
            if product != c.parity {
                return true;
            }
        }
    }
    false
}

fn repeat(p: &PartialAutomaton, s: usize, hint: &mut Option<(usize, ObsId)>) -> bool {
    for x in 0..p.n {
        let (Some(v), Some(t)) = (p.value(s, x), p.next(s, x)) else {
            note(hint, s, x);
            continue;
        };
        match p.value(t, x) {
            Some(w) if w != v => return true,
            Some(_) => {}
            None => note(hint, t, x),
        }
    }
    false
}

/// Monitor codes: 0 unset, 1 plus, 2 minus, per member.
fn context(
    p: &PartialAutomaton,
    s: usize,
    members: &[ObsId; 3],
    parity: Sign,
    hint: &mut Option<(usize, ObsId)>,
) -> bool {
    let mut seen = vec![false; p.k * 27];
    let code = |q: usize, rec: [u8; 3]| q * 27 + rec[0] as usize * 9 + rec[1] as usize * 3 + rec[2] as usize;
    seen[code(s, [0; 3])] = true;
    let mut queue = VecDeque::from([(s, [0u8; 3])]);
    while let Some((q, rec)) = queue.pop_front() {
        for (j, &x) in members.iter().enumerate() {
            let Some(v) = p.value(q, x) else {
                note(hint, q, x);
                continue;
            };
            let bit = sign_bit(v);
            if rec[j] != 0 && rec[j] != bit {
                return true;
            }
            let mut r = rec;
            r[j] = bit;
            if r.iter().all(|&b| b != 0) {
                let product = Sign::product(r.iter().map(|&b| if b == MINUS { Sign::Minus } else { Sign::Plus }));
                if product != parity {
                    return true;
                }
            }
            let Some(t) = p.next(q, x) else {
                note(hint, q, x);
                continue;
            };
            if !seen[code(t, r)] {
                seen[code(t, r)] = true;
                queue.push_back((t, r));
            }
        }
    }
    false
}

fn compat(p: &PartialAutomaton, s: usize, y: ObsId, hint: &mut Option<(usize, ObsId)>) -> bool {
    let st = p.structure();
    let (Some(v), Some(s1)) = (p.value(s, y), p.next(s, y)) else {
        note(hint, s, y);
        return false;
    };
    let mut seen = vec![false; p.k];
    seen[s1] = true;
    let mut queue = VecDeque::from([s1]);
    while let Some(q) = queue.pop_front() {
        match p.value(q, y) {
            Some(w) if w != v => return true,
            Some(_) => {}
            None => note(hint, q, y),
        }
        for x in (0..p.n).filter(|&x| st.compatible(x, y)) {
            match p.next(q, x) {
                Some(t) if !seen[t] => {
                    seen[t] = true;
                    queue.push_back(t);
                }
                Some(_) => {}
                None => note(hint, q, x),
            }
        }
    }
    false
}

fn all(p: &PartialAutomaton, s: usize, space: &StabilizerSpace, hint: &mut Option<(usize, ObsId)>) -> bool {
    let mut seen = vec![false; p.k * space.len()];
    seen[s * space.len()] = true;
    let mut queue = VecDeque::from([(s, 0usize)]);
    while let Some((q, m)) = queue.pop_front() {
        for x in 0..p.n {
            let Some(v) = p.value(q, x) else {
                note(hint, q, x);
                continue;
            };
            let Some(m2) = space.successor(m, x, v) else {
                return true;
            };
            let Some(t) = p.next(q, x) else {
                note(hint, q, x);
                continue;
            };
            if !seen[t * space.len() + m2] {
                seen[t * space.len() + m2] = true;
                queue.push_back((t, m2));
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{a3, a4};
    use crate::checker::{check, CheckOptions};

    fn verdict(a: &MealyAutomaton, families: &[Family]) -> bool {
        families.iter().all(|&f| check(a, f).obeys)
    }

    #[test]
    fn complete_partial_matches_checker() {
        let space = StabilizerSpace::from_mixed(StructureKind::Pm.structure());
        for a in [a3(), a4()] {
            let p = PartialAutomaton::from_automaton(&a);
            for f in Family::EVERY {
                let expected = if check(&a, f).obeys { Probe::Clear } else { Probe::Violation };
                assert_eq!(probe(&p, &[f], Some(&space)), expected, "{f}");
            }
        }
        assert!(verdict(&a4(), &[Family::ContextPrime, Family::CompatPrime]));
        assert!(!crate::checker::obeys(&a3(), Family::CompatPrime, CheckOptions::default()));
    }

    #[test]
    fn empty_partial_needs_first_cell() {
        let p = PartialAutomaton::new(StructureKind::Pm, 3);
        assert_eq!(probe(&p, &[Family::ContextPrime], None), Probe::Needs(0, 0));
        assert_eq!(p.created(), 1);
        assert_eq!(p.to_automaton(), None);
    }

    #[test]
    fn forgetting_cells_keeps_violations_local() {
        let mut p = PartialAutomaton::from_automaton(&a3());
        p.forget(2, 8);
        assert!(matches!(probe(&p, &[Family::ContextPrime], None), Probe::Needs(..)));
    }
}
