use std::collections::HashMap;

use super::{MeasurementPrediction, StabilizerState};
use crate::observables::{ObsId, ObservableStructure, Sign};

const IMPOSSIBLE: u32 = u32::MAX;

/// Every stabilizer state reachable from a start state by measuring the
/// observables of one structure, with a precomputed transition table.
/// State 0 is the start.
#[derive(Clone, Debug)]
pub struct StabilizerSpace {
    n: usize,
    states: Vec<StabilizerState>,
    succ: Vec<u32>,
}

impl StabilizerSpace {
    pub fn closure(start: StabilizerState, s: &ObservableStructure) -> StabilizerSpace {
        let n = s.len();
        let mut states = vec![start];
        let mut index = HashMap::from([(start, 0u32)]);
        let mut succ = Vec::new();
        let mut i = 0;
        while i < states.len() {
            let state = states[i];
            for o in s.observables() {
                for v in Sign::BOTH {
                    let id = match state.collapse(o.pauli, v) {
                        Ok(t) => *index.entry(t).or_insert_with(|| {
                            states.push(t);
                            (states.len() - 1) as u32
                        }),
                        Err(_) => IMPOSSIBLE,
                    };
                    succ.push(id);
                }
            }
            i += 1;
        }
        debug_assert_eq!(succ.len(), states.len() * n * 2);
        StabilizerSpace { n, states, succ }
    }

    pub fn from_mixed(s: &ObservableStructure) -> StabilizerSpace {
        StabilizerSpace::closure(StabilizerState::mixed(), s)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, i: usize) -> &StabilizerState {
        &self.states[i]
    }

    /// The state after observing `outcome` for `obs`, or `None` if that
    /// outcome has probability zero.
    pub fn successor(&self, i: usize, obs: ObsId, outcome: Sign) -> Option<usize> {
        let id = self.succ[(i * self.n + obs) * 2 + usize::from(outcome.is_minus())];
        (id != IMPOSSIBLE).then_some(id as usize)
    }

    pub fn prediction(&self, i: usize, obs: ObsId) -> MeasurementPrediction {
        match (self.successor(i, obs, Sign::Plus), self.successor(i, obs, Sign::Minus)) {
            (Some(_), Some(_)) => MeasurementPrediction::Random,
            (Some(_), None) => MeasurementPrediction::Deterministic(Sign::Plus),
            _ => MeasurementPrediction::Deterministic(Sign::Minus),
        }
    }
}
