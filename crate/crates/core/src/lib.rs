//! Memory cost of simulating quantum contextuality with finite automata.
//!
//! The crate decides whether deterministic Mealy machines reproduce the
//! certain predictions of sequential two-qubit Pauli measurements on the
//! Peres–Mermin square (and its 15-observable extension), and searches for
//! the machines with the fewest internal states.
//!
//! * [`observables`]: exact Pauli algebra, the square and the extended square.
//! * [`oracle`]: stabilizer-state predictions plus a dense reference simulation.
//! * [`automaton`]: Mealy machines, their text format and the built-in machines.
//! * [`checker`]: obedience decision procedures with shortest counterexamples.
//! * [`search`]: symmetry-reduced backtracking over k-state machines.
//! * [`inequality`]: noncontextuality inequalities and the embedded-square lemma.
//! * [`reproduce`]: the numbered reproduction criteria with their time limits.

pub mod automaton;
pub mod checker;
pub mod error;
pub mod inequality;
pub mod observables;
pub mod oracle;
pub mod reproduce;
pub mod search;

pub use automaton::{MealyAutomaton, RunRecord};
pub use checker::{Family, Verdict};
pub use error::{Error, Result};
pub use observables::{ObsId, ObservableStructure, Pauli, Sign, StructureKind};
pub use oracle::{MeasurementPrediction, StabilizerState};
pub use search::{SearchOutcome, SearchProblem, SearchStatus};
