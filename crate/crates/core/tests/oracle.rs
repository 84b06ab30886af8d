//! The stabilizer oracle against the dense 4×4 simulation.

use cmlab_core::oracle::{dense_oracle_check, DyadicWeight, TraceItem};
use cmlab_core::{MeasurementPrediction, Sign, StabilizerState, StructureKind};
use proptest::collection::vec;
use proptest::prelude::*;

mod common;

/// Weight of a trace computed from stabilizer predictions alone: each random
/// outcome halves it, each contradicted certainty zeroes it.
fn stabilizer_weight(trace: &[TraceItem]) -> DyadicWeight {
    let mut state = StabilizerState::mixed();
    let mut halvings = 0;
    for &(p, outcome) in trace {
        match state.predict(p).unwrap() {
            MeasurementPrediction::Deterministic(v) if v != outcome => {
                return DyadicWeight { numerator: 0, denominator_log2: 0 };
            }
            MeasurementPrediction::Deterministic(_) => {}
            MeasurementPrediction::Random => halvings += 1,
        }
        state = state.collapse(p, outcome).unwrap();
    }
    DyadicWeight { numerator: 1, denominator_log2: halvings }
}

fn extended_trace(max_len: usize) -> impl Strategy<Value = Vec<TraceItem>> {
    let s = StructureKind::Extended15.structure();
    vec((0..s.len(), any::<bool>()), 0..=max_len)
        .prop_map(move |items| items.into_iter().map(|(x, m)| (s.pauli(x), common::sign(m))).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn stabilizer_weights_match_the_dense_simulation(trace in extended_trace(12)) {
        prop_assert_eq!(stabilizer_weight(&trace), dense_oracle_check(&trace));
    }

    #[test]
    fn a_collapsed_outcome_repeats(trace in extended_trace(8), x in 0usize..15, m in any::<bool>()) {
        let s = StructureKind::Extended15.structure();
        let Ok(state) = StabilizerState::mixed().collapse_all(&trace) else { return Ok(()) };
        if !state.outcome_possible(s.pauli(x), common::sign(m)).unwrap() {
            return Ok(());
        }
        let after = state.collapse(s.pauli(x), common::sign(m)).unwrap();
        prop_assert_eq!(after.predict(s.pauli(x)).unwrap(), MeasurementPrediction::Deterministic(common::sign(m)));
        prop_assert!(after.rank() >= state.rank());
    }

    #[test]
    fn both_outcomes_of_a_random_measurement_are_possible(trace in extended_trace(8), x in 0usize..15) {
        let s = StructureKind::Extended15.structure();
        let Ok(state) = StabilizerState::mixed().collapse_all(&trace) else { return Ok(()) };
        let p = s.pauli(x);
        let possible = Sign::BOTH.map(|v| state.outcome_possible(p, v).unwrap());
        match state.predict(p).unwrap() {
            MeasurementPrediction::Random => prop_assert_eq!(possible, [true, true]),
            MeasurementPrediction::Deterministic(v) => prop_assert_eq!(possible, [v == Sign::Plus, v == Sign::Minus]),
        }
    }
}

#[test]
fn frozen_dense_weights() {
    let s = StructureKind::Pm.structure();
    let item = |l: &str, v| (s.pauli(s.id_of(l).unwrap()), v);
    // Computed by hand: two random outcomes on commuting observables, then a certainty.
    let trace = [item("A", Sign::Plus), item("B", Sign::Plus), item("C", Sign::Plus)];
    assert_eq!(dense_oracle_check(&trace), DyadicWeight { numerator: 1, denominator_log2: 2 });
    let trace = [item("C", Sign::Plus), item("c", Sign::Plus), item("gamma", Sign::Plus)];
    assert_eq!(dense_oracle_check(&trace), DyadicWeight { numerator: 0, denominator_log2: 0 });
    // Anticommuting pair: each outcome of the second is equally likely.
    let trace = [item("A", Sign::Plus), item("b", Sign::Minus), item("A", Sign::Minus)];
    assert_eq!(dense_oracle_check(&trace), DyadicWeight { numerator: 1, denominator_log2: 3 });
}
