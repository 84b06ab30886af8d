use super::MealyAutomaton;
use crate::error::{Error, Result};
use crate::observables::{Sign, StructureKind};
use crate::oracle::{MeasurementPrediction, StabilizerState};

// One row per state, entries in square order. `+` keeps the state, `-3`
// answers -1 and moves to state 3 (1-based).
const A3_TABLES: [&str; 3] = ["+ + +2  + + +3  + + +", "+ +1 +  - + -  - -3 +", "+ - -  +1 + +  -2 - +"];

const A4_TABLES: [&str; 4] =
    ["+ + +2  + + +3  + + +", "+ + +  - + -  -4 +1 +", "+ - -  + + +  +1 -4 +", "+ - -3  - + -2  - - +"];

fn from_rows(rows: &[&str]) -> MealyAutomaton {
    let mut values = Vec::new();
    let mut next = Vec::new();
    for (q, row) in rows.iter().enumerate() {
        for token in row.split_whitespace() {
            let mut chars = token.chars();
            values.push(Sign::from_symbol(chars.next().unwrap()).unwrap());
            let target: String = chars.collect();
            next.push(if target.is_empty() { q } else { target.parse::<usize>().unwrap() - 1 });
        }
    }
    MealyAutomaton::new(StructureKind::Pm, values, next, 0).expect("built-in table is valid")
}

/// The three-state machine obeying the sequential contextuality constraints.
pub fn a3() -> MealyAutomaton {
    from_rows(&A3_TABLES)
}

/// The four-state machine obeying contextuality and compatibility constraints.
pub fn a4() -> MealyAutomaton {
    from_rows(&A4_TABLES)
}

/// `A3`, `A4` or `A10`; initial state 1.
pub fn builtin(name: &str) -> Result<MealyAutomaton> {
    match name {
        "A3" => Ok(a3()),
        "A4" => Ok(a4()),
        "A10" => Ok(build_ten_state()?.automaton),
        other => Err(Error::UnknownBuiltin(other.to_string())),
    }
}

/// The ten memory states as `(X, sign, Y, sign)` eigenstates of two compatible
/// square observables, in the order used for state ids.
pub const TEN_STATE_EIGENSTATES: [(&str, Sign, &str, Sign); 10] = [
    ("A", Sign::Plus, "B", Sign::Plus),
    ("A", Sign::Minus, "B", Sign::Plus),
    ("C", Sign::Plus, "c", Sign::Plus),
    ("C", Sign::Minus, "c", Sign::Plus),
    ("gamma", Sign::Plus, "beta", Sign::Plus),
    ("gamma", Sign::Minus, "beta", Sign::Plus),
    ("alpha", Sign::Plus, "a", Sign::Plus),
    ("alpha", Sign::Minus, "a", Sign::Plus),
    ("a", Sign::Plus, "b", Sign::Plus),
    ("B", Sign::Plus, "b", Sign::Plus),
];

#[derive(Clone, Debug)]
pub struct TenStateConstruction {
    pub automaton: MealyAutomaton,
    pub states: Vec<StabilizerState>,
    /// Random measurements where only the `-1` branch stayed in the set.
    pub minus_branch_choices: usize,
    /// Random measurements where both branches stayed in the set.
    pub both_branches_in_set: usize,
}

/// Quantum-guided machine over the ten eigenstates: certain outcomes are
/// reproduced, random ones pick the branch whose post-measurement state is
/// among the ten, preferring `+1` when both are.
pub fn build_ten_state() -> Result<TenStateConstruction> {
    let s = StructureKind::Pm.structure();
    let pauli = |label: &str| s.pauli(s.id_of(label).expect("square label"));
    let states = TEN_STATE_EIGENSTATES
        .iter()
        .map(|&(x, sx, y, sy)| StabilizerState::eigenstate((pauli(x), sx), (pauli(y), sy)))
        .collect::<Result<Vec<_>>>()?;
    let index = |t: &StabilizerState| states.iter().position(|u| u == t);
    let mut values = Vec::with_capacity(90);
    let mut next = Vec::with_capacity(90);
    let mut minus_branch_choices = 0;
    let mut both_branches_in_set = 0;
    for (q, state) in states.iter().enumerate() {
        for o in s.observables() {
            let (v, target) = match state.predict(o.pauli)? {
                MeasurementPrediction::Deterministic(v) => (v, q),
                MeasurementPrediction::Random => {
                    let plus = index(&state.collapse(o.pauli, Sign::Plus)?);
                    let minus = index(&state.collapse(o.pauli, Sign::Minus)?);
                    match (plus, minus) {
                        (Some(t), other) => {
                            both_branches_in_set += usize::from(other.is_some());
                            (Sign::Plus, t)
                        }
                        (None, Some(t)) => {
                            minus_branch_choices += 1;
                            (Sign::Minus, t)
                        }
                        (None, None) => {
                            return Err(Error::ConstructionEscapesStateSet(format!(
                                "state {} measuring {}",
                                q + 1,
                                o.label
                            )))
                        }
                    }
                }
            };
            values.push(v);
            next.push(target);
        }
    }
    let automaton = MealyAutomaton::new(StructureKind::Pm, values, next, 0)?;
    Ok(TenStateConstruction { automaton, states, minus_branch_choices, both_branches_in_set })
}
