//! Deterministic Mealy machines over an observable structure.
//!
//! State `q` answers observable `x` with `value(q, x)` and then moves to
//! `next(q, x)`. States are 0-based in the API and 1-based in the text
//! format and in printed output.

mod builtin;
mod text;

use std::fmt;

pub use builtin::{a3, a4, build_ten_state, builtin, TenStateConstruction, TEN_STATE_EIGENSTATES};
pub use text::{parse, serialize};

use crate::error::{Error, Result};
use crate::observables::{ObsId, ObservableStructure, Sign, StructureKind};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MealyAutomaton {
    kind: StructureKind,
    states: usize,
    values: Vec<Sign>,
    next: Vec<usize>,
    initial: usize,
}

impl MealyAutomaton {
    /// `values` and `next` are row-major `states × n` tables.
    pub fn new(kind: StructureKind, values: Vec<Sign>, next: Vec<usize>, initial: usize) -> Result<MealyAutomaton> {
        let n = kind.structure().len();
        if values.is_empty() || !values.len().is_multiple_of(n) || next.len() != values.len() {
            return Err(Error::Invariant(format!(
                "tables must be k × {n}, got {} values and {} transitions",
                values.len(),
                next.len()
            )));
        }
        let states = values.len() / n;
        if let Some(bad) = next.iter().position(|&t| t >= states) {
            return Err(Error::Invariant(format!(
                "state {} observable {}: next state {} out of range 1..={states}",
                bad / n + 1,
                kind.structure().label(bad % n),
                next[bad] + 1
            )));
        }
        if initial >= states {
            return Err(Error::StateOutOfRange(initial));
        }
        Ok(MealyAutomaton { kind, states, values, next, initial })
    }

    /// A single-state machine answering with fixed values.
    pub fn constant(kind: StructureKind, values: &[Sign]) -> Result<MealyAutomaton> {
        MealyAutomaton::new(kind, values.to_vec(), vec![0; values.len()], 0)
    }

    pub fn kind(&self) -> StructureKind {
        self.kind
    }

    pub fn structure(&self) -> &'static ObservableStructure {
        self.kind.structure()
    }

    pub fn num_states(&self) -> usize {
        self.states
    }

    pub fn num_observables(&self) -> usize {
        self.values.len() / self.states
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn with_initial(&self, initial: usize) -> Result<MealyAutomaton> {
        if initial >= self.states {
            return Err(Error::StateOutOfRange(initial));
        }
        Ok(MealyAutomaton { initial, ..self.clone() })
    }

    pub fn value(&self, state: usize, obs: ObsId) -> Sign {
        self.values[state * self.num_observables() + obs]
    }

    pub fn next(&self, state: usize, obs: ObsId) -> usize {
        self.next[state * self.num_observables() + obs]
    }

    /// The value table `T_state`.
    pub fn table(&self, state: usize) -> &[Sign] {
        let n = self.num_observables();
        &self.values[state * n..(state + 1) * n]
    }

    pub fn values(&self) -> &[Sign] {
        &self.values
    }

    pub fn transitions(&self) -> &[usize] {
        &self.next
    }

    pub fn step(&self, state: usize, obs: ObsId) -> Result<(Sign, usize)> {
        if state >= self.states {
            return Err(Error::StateOutOfRange(state));
        }
        if obs >= self.num_observables() {
            return Err(Error::ObservableOutOfRange(obs));
        }
        Ok((self.value(state, obs), self.next(state, obs)))
    }

    pub fn run(&self, from: usize, seq: &[ObsId]) -> Result<RunRecord> {
        let mut record = RunRecord { inputs: Vec::with_capacity(seq.len()), outputs: Vec::new(), states: vec![from] };
        if from >= self.states {
            return Err(Error::StateOutOfRange(from));
        }
        let mut state = from;
        for &obs in seq {
            let (v, s) = self.step(state, obs)?;
            record.inputs.push(obs);
            record.outputs.push(v);
            record.states.push(s);
            state = s;
        }
        Ok(record)
    }

    /// Renames states with `perm[old] = new`; `perm` must be a permutation of `0..k`.
    pub fn relabel(&self, perm: &[usize]) -> MealyAutomaton {
        let n = self.num_observables();
        let mut values = vec![Sign::Plus; self.values.len()];
        let mut next = vec![0; self.next.len()];
        for q in 0..self.states {
            for x in 0..n {
                values[perm[q] * n + x] = self.value(q, x);
                next[perm[q] * n + x] = perm[self.next(q, x)];
            }
        }
        MealyAutomaton { kind: self.kind, states: self.states, values, next, initial: perm[self.initial] }
    }

    /// Negates `value(q, x)` for every state `q` and every `x` in `observables`.
    pub fn flip_signs(&self, observables: &[ObsId]) -> MealyAutomaton {
        let mut out = self.clone();
        let n = self.num_observables();
        for q in 0..self.states {
            for &x in observables {
                out.values[q * n + x] = -out.values[q * n + x];
            }
        }
        out
    }
}

impl fmt::Debug for MealyAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize(self))
    }
}

/// Inputs, outputs and the visited states of one run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunRecord {
    pub inputs: Vec<ObsId>,
    pub outputs: Vec<Sign>,
    /// `states[0]` is the starting state; `states[i + 1]` follows input `i`.
    pub states: Vec<usize>,
}

impl RunRecord {
    pub fn final_state(&self) -> usize {
        *self.states.last().expect("states is never empty")
    }

    pub fn trace(&self) -> Vec<(ObsId, Sign)> {
        self.inputs.iter().copied().zip(self.outputs.iter().copied()).collect()
    }

    /// Subscripted notation `A_1^+ B_2^-`, states 1-based.
    pub fn annotated(&self, s: &ObservableStructure) -> String {
        self.inputs
            .iter()
            .zip(&self.outputs)
            .zip(&self.states)
            .map(|((&x, v), q)| format!("{}_{}^{}", s.label(x), q + 1, v))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(s: &ObservableStructure, labels: &str) -> Vec<ObsId> {
        labels.split_whitespace().map(|l| s.id_of(l).unwrap()).collect()
    }

    #[test]
    fn a3_steps() {
        let a = a3();
        let s = a.structure();
        assert_eq!(a.step(0, s.id_of("gamma").unwrap()).unwrap(), (Sign::Plus, 0));
        assert_eq!(a.step(0, s.id_of("C").unwrap()).unwrap(), (Sign::Plus, 1));
        assert_eq!(a.step(0, 42), Err(Error::ObservableOutOfRange(42)));
    }

    #[test]
    fn a3_runs() {
        let a = a3();
        let s = a.structure();
        let r = a.run(0, &ids(s, "gamma C c")).unwrap();
        assert_eq!(r.outputs, vec![Sign::Plus, Sign::Plus, Sign::Minus]);
        let r = a.run(0, &ids(s, "B C beta B")).unwrap();
        assert_eq!(r.outputs, vec![Sign::Plus, Sign::Plus, Sign::Minus, Sign::Minus]);
        assert_eq!(r.states, vec![0, 0, 1, 2, 2]);
        let r = a.run(1, &[]).unwrap();
        assert!(r.outputs.is_empty());
        assert_eq!(r.states, vec![1]);
    }

    #[test]
    fn run_composes_over_prefixes() {
        let a = a4();
        let s = a.structure();
        let xy = ids(s, "C alpha beta c gamma A a");
        let whole = a.run(0, &xy).unwrap();
        let first = a.run(0, &xy[..3]).unwrap();
        let rest = a.run(first.final_state(), &xy[3..]).unwrap();
        assert_eq!(whole.outputs, [first.outputs.clone(), rest.outputs.clone()].concat());
        assert_eq!(whole.final_state(), rest.final_state());
    }

    #[test]
    fn constructor_validates() {
        let k = StructureKind::Pm;
        assert!(MealyAutomaton::new(k, vec![Sign::Plus; 9], vec![1; 9], 0).is_err());
        assert!(MealyAutomaton::new(k, vec![Sign::Plus; 8], vec![0; 8], 0).is_err());
        assert!(MealyAutomaton::new(k, vec![Sign::Plus; 9], vec![0; 9], 1).is_err());
    }

    #[test]
    fn relabel_round_trip() {
        let a = a4();
        let perm = [2, 0, 3, 1];
        let mut inverse = [0; 4];
        for (i, &p) in perm.iter().enumerate() {
            inverse[p] = i;
        }
        assert_eq!(a.relabel(&perm).relabel(&inverse), a);
    }
}
