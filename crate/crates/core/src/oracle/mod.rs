//! Exact quantum predictions for sequential two-qubit Pauli measurements.
//!
//! The knowledge state is a stabilizer group: a signed, commuting subgroup
//! of the Pauli group that never contains `-𝟙`. The completely mixed state
//! is the trivial group. Only possibility and certainty are tracked, never
//! probabilities.

mod dense;
mod space;

use std::collections::{HashSet, VecDeque};
use std::fmt;

pub use dense::{dense_oracle_check, matmul, pauli_matrix, DyadicWeight, Matrix4};
pub use space::StabilizerSpace;

use crate::error::{Error, Result};
use crate::observables::{ObsId, ObservableStructure, Pauli, Sign};

/// One measured observable and the outcome it returned.
pub type TraceItem = (Pauli, Sign);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MeasurementPrediction {
    Deterministic(Sign),
    Random,
}

/// A stabilizer state on two qubits, stored as the sorted list of the
/// non-identity elements of its stabilizer group (0, 1 or 3 entries).
/// Equal states therefore compare equal regardless of how they were reached.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StabilizerState {
    len: u8,
    // Unused slots hold (identity, +) so derived comparisons stay canonical.
    elements: [(Pauli, Sign); 3],
}

impl Default for StabilizerState {
    fn default() -> Self {
        StabilizerState { len: 0, elements: [(Pauli::IDENTITY, Sign::Plus); 3] }
    }
}

impl StabilizerState {
    pub fn mixed() -> StabilizerState {
        StabilizerState::default()
    }

    pub fn from_generators(generators: &[(Pauli, Sign)]) -> Result<StabilizerState> {
        if generators.len() > 2 {
            return Err(Error::InvalidGenerators("at most two generators on two qubits".into()));
        }
        for (i, &(p, _)) in generators.iter().enumerate() {
            if p.is_identity() {
                return Err(Error::IdentityObservable);
            }
            for &(q, _) in &generators[..i] {
                if !p.commutes_with(q) {
                    return Err(Error::InvalidGenerators(format!("{p} and {q} anticommute")));
                }
                if p == q {
                    return Err(Error::InvalidGenerators(format!("{p} repeated")));
                }
            }
        }
        Ok(StabilizerState::from_independent(generators))
    }

    /// The eigenstate with `first·ψ = s1·ψ` and `second·ψ = s2·ψ`.
    pub fn eigenstate(first: (Pauli, Sign), second: (Pauli, Sign)) -> Result<StabilizerState> {
        StabilizerState::from_generators(&[first, second])
    }

    fn from_independent(generators: &[(Pauli, Sign)]) -> StabilizerState {
        let mut state = StabilizerState::default();
        for (slot, &g) in state.elements.iter_mut().zip(generators) {
            *slot = g;
        }
        state.len = generators.len() as u8;
        if let [(p, s), (q, t)] = *generators {
            let (r, phase) = p.product(q);
            let sign = phase.as_sign().expect("commuting generators");
            state.elements[2] = (r, s * t * sign);
            state.len = 3;
        }
        state.elements[..state.len as usize].sort_unstable();
        state
    }

    pub fn rank(&self) -> usize {
        match self.len {
            0 => 0,
            1 => 1,
            _ => 2,
        }
    }

    pub fn is_pure(&self) -> bool {
        self.rank() == 2
    }

    /// A minimal generating set in normal form.
    pub fn generators(&self) -> &[(Pauli, Sign)] {
        &self.elements[..self.rank()]
    }

    /// Non-identity group elements with their signs.
    pub fn elements(&self) -> &[(Pauli, Sign)] {
        &self.elements[..self.len as usize]
    }

    pub fn predict(&self, p: Pauli) -> Result<MeasurementPrediction> {
        if p.is_identity() {
            return Err(Error::IdentityObservable);
        }
        Ok(self
            .elements()
            .iter()
            .find(|(q, _)| *q == p)
            .map_or(MeasurementPrediction::Random, |&(_, s)| MeasurementPrediction::Deterministic(s)))
    }

    pub fn collapse(&self, p: Pauli, outcome: Sign) -> Result<StabilizerState> {
        match self.predict(p)? {
            MeasurementPrediction::Deterministic(v) if v == outcome => Ok(*self),
            MeasurementPrediction::Deterministic(_) => {
                Err(Error::ContradictsCertainPrediction { label: p.to_string(), outcome: outcome.symbol() })
            }
            MeasurementPrediction::Random => {
                let mut gens: Vec<(Pauli, Sign)> = self.generators().to_vec();
                if let Some(pivot) = gens.iter().position(|&(g, _)| !g.commutes_with(p)) {
                    let (g, gs) = gens[pivot];
                    for h in gens.iter_mut().skip(pivot + 1) {
                        if !h.0.commutes_with(p) {
                            let (r, phase) = h.0.product(g);
                            *h = (r, h.1 * gs * phase.as_sign().expect("generators commute"));
                        }
                    }
                    gens.remove(pivot);
                }
                gens.push((p, outcome));
                Ok(StabilizerState::from_independent(&gens))
            }
        }
    }

    pub fn collapse_all(&self, trace: &[TraceItem]) -> Result<StabilizerState> {
        trace.iter().try_fold(*self, |s, &(p, v)| s.collapse(p, v))
    }

    pub fn outcome_possible(&self, p: Pauli, outcome: Sign) -> Result<bool> {
        Ok(self.predict(p)? != MeasurementPrediction::Deterministic(-outcome))
    }
}

impl fmt::Display for StabilizerState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len == 0 {
            return f.write_str("<mixed>");
        }
        let gens: Vec<String> = self.generators().iter().map(|(p, s)| format!("{s}{p}")).collect();
        write!(f, "<{}>", gens.join(","))
    }
}

pub fn predict(s: &StabilizerState, p: Pauli) -> Result<MeasurementPrediction> {
    s.predict(p)
}

pub fn collapse(s: &StabilizerState, p: Pauli, outcome: Sign) -> Result<StabilizerState> {
    s.collapse(p, outcome)
}

/// Whether every outcome in `trace` can occur in sequence starting from `start`.
pub fn trace_possible(start: &StabilizerState, trace: &[TraceItem]) -> bool {
    start.collapse_all(trace).is_ok()
}

/// Size of the closure of `start` under measuring any observable of `obs`
/// with any possible outcome.
pub fn reachable_pure_count(start: &StabilizerState, obs: &ObservableStructure) -> Result<usize> {
    if !start.is_pure() {
        return Err(Error::NotPure(start.rank()));
    }
    Ok(reachable_states(start, obs).len())
}

/// Breadth-first closure of `start`, in discovery order.
pub fn reachable_states(start: &StabilizerState, obs: &ObservableStructure) -> Vec<StabilizerState> {
    let mut seen: HashSet<StabilizerState> = HashSet::from([*start]);
    let mut order = vec![*start];
    let mut queue = VecDeque::from([*start]);
    while let Some(s) = queue.pop_front() {
        for o in obs.observables() {
            for v in Sign::BOTH {
                if let Ok(t) = s.collapse(o.pauli, v) {
                    if seen.insert(t) {
                        order.push(t);
                        queue.push_back(t);
                    }
                }
            }
        }
    }
    order
}

/// Parses `A+,B+,C-` into `(observable, outcome)` pairs of `s`.
pub fn parse_trace(s: &ObservableStructure, text: &str) -> Result<Vec<(ObsId, Sign)>> {
    text.split(',')
        .map(str::trim)
        .filter(|item| !item.is_empty())
        .map(|item| {
            let sign_char = item.chars().last().unwrap();
            let sign = Sign::from_symbol(sign_char)
                .ok_or_else(|| Error::TraceSyntax(format!("`{item}` must end in + or -")))?;
            let label = &item[..item.len() - sign_char.len_utf8()];
            let id = s.id_of(label).ok_or_else(|| Error::UnknownObservable(label.to_string()))?;
            Ok((id, sign))
        })
        .collect()
}

pub fn format_trace(s: &ObservableStructure, trace: &[(ObsId, Sign)]) -> String {
    trace.iter().map(|&(o, v)| format!("{}{}", s.label(o), v)).collect::<Vec<_>>().join(",")
}

pub fn to_pauli_trace(s: &ObservableStructure, trace: &[(ObsId, Sign)]) -> Vec<TraceItem> {
    trace.iter().map(|&(o, v)| (s.pauli(o), v)).collect()
}
