#![allow(dead_code)]

use cmlab_core::{MealyAutomaton, Sign, StructureKind};
use proptest::collection::vec;
use proptest::prelude::*;

pub fn sign(minus: bool) -> Sign {
    if minus {
        Sign::Minus
    } else {
        Sign::Plus
    }
}

/// Square machines with `states` states, initial state 0.
pub fn automaton_with(states: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = MealyAutomaton> {
    states.prop_flat_map(|k| (vec(any::<bool>(), 9 * k), vec(0..k, 9 * k))).prop_map(|(values, next)| {
        let values = values.into_iter().map(sign).collect();
        MealyAutomaton::new(StructureKind::Pm, values, next, 0).unwrap()
    })
}

pub fn automaton() -> impl Strategy<Value = MealyAutomaton> {
    automaton_with(1..=4)
}

/// A permutation of `0..k` as a shuffled vector.
pub fn permutation(k: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..k).collect::<Vec<_>>()).prop_shuffle()
}
