//! Obedience decision procedures.
//!
//! Each family is decided exactly by breadth-first search over the product
//! of the automaton with a finite monitor, so arbitrarily long sequences are
//! covered and every counterexample is a shortest one. Ties are broken by
//! start state order, then context or observable order, then by the
//! lexicographic order of the input sequence.

mod bruteforce;

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

pub use bruteforce::bounded_bruteforce;

use crate::automaton::{MealyAutomaton, RunRecord};
use crate::error::Error;
use crate::observables::{ObsId, ObservableStructure, Sign};
use crate::oracle::{format_trace, MeasurementPrediction, StabilizerSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Rc,
    Repeat,
    Context,
    Compat,
    ContextPrime,
    CompatPrime,
    All,
    AllPrime,
}

impl Family {
    pub const EVERY: [Family; 8] = [
        Family::Rc,
        Family::Repeat,
        Family::Context,
        Family::Compat,
        Family::ContextPrime,
        Family::CompatPrime,
        Family::All,
        Family::AllPrime,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Rc => "rc",
            Family::Repeat => "repeat",
            Family::Context => "context",
            Family::Compat => "compat",
            Family::ContextPrime => "context'",
            Family::CompatPrime => "compat'",
            Family::All => "all",
            Family::AllPrime => "all'",
        }
    }

    /// Primed families allow an arbitrary ignored preparation sequence first.
    pub fn is_prime(self) -> bool {
        matches!(self, Family::ContextPrime | Family::CompatPrime | Family::AllPrime)
    }

    /// The family with the preparation dropped.
    pub fn base(self) -> Family {
        match self {
            Family::ContextPrime => Family::Context,
            Family::CompatPrime => Family::Compat,
            Family::AllPrime => Family::All,
            other => other,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Family, Error> {
        Family::EVERY
            .into_iter()
            .find(|f| f.name() == s || f.name().replace('\'', "-prime") == s)
            .ok_or_else(|| Error::InvalidProblem(format!("unknown family `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    /// State the violating sequence starts from.
    pub start: usize,
    /// Ignored inputs leading from the initial state to `start` (primed families).
    pub preparation: Vec<ObsId>,
    pub run: RunRecord,
    pub violation: String,
}

impl Counterexample {
    /// Total number of measurements, preparation included.
    pub fn len(&self) -> usize {
        self.preparation.len() + self.run.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The violating part as a trace string such as `B+,C+,beta-,B-`.
    pub fn trace_string(&self, s: &ObservableStructure) -> String {
        format_trace(s, &self.run.trace())
    }

    pub fn preparation_string(&self, s: &ObservableStructure) -> String {
        self.preparation.iter().map(|&x| s.label(x)).collect::<Vec<_>>().join(",")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub family: Family,
    pub obeys: bool,
    pub counterexample: Option<Counterexample>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CheckOptions {
    /// Quantify over every state as the initial one.
    pub all_initial_states: bool,
}

/// States reachable from the initial state, ascending.
pub fn reachable(a: &MealyAutomaton) -> Vec<usize> {
    let prep = preparations(a, a.initial());
    (0..a.num_states()).filter(|&q| prep[q].is_some()).collect()
}

/// Shortest (then lexicographically first) input sequence from `from` to
/// every state, `None` for unreachable states.
pub(crate) fn preparations(a: &MealyAutomaton, from: usize) -> Vec<Option<Vec<ObsId>>> {
    let mut paths: Vec<Option<Vec<ObsId>>> = vec![None; a.num_states()];
    paths[from] = Some(Vec::new());
    let mut queue = VecDeque::from([from]);
    while let Some(q) = queue.pop_front() {
        for x in 0..a.num_observables() {
            let t = a.next(q, x);
            if paths[t].is_none() {
                let mut p = paths[q].clone().unwrap();
                p.push(x);
                paths[t] = Some(p);
                queue.push_back(t);
            }
        }
    }
    paths
}

/// Start states with their preparation sequences, in state order.
pub(crate) fn start_points(a: &MealyAutomaton, family: Family, opts: CheckOptions) -> Vec<(usize, Vec<ObsId>)> {
    if opts.all_initial_states {
        return (0..a.num_states()).map(|q| (q, Vec::new())).collect();
    }
    if family.is_prime() {
        preparations(a, a.initial()).into_iter().enumerate().filter_map(|(q, p)| p.map(|p| (q, p))).collect()
    } else {
        vec![(a.initial(), Vec::new())]
    }
}

pub fn check(a: &MealyAutomaton, family: Family) -> Verdict {
    check_with(a, family, CheckOptions::default())
}

pub fn check_with(a: &MealyAutomaton, family: Family, opts: CheckOptions) -> Verdict {
    let base = family.base();
    let space = (base == Family::All).then(|| StabilizerSpace::from_mixed(a.structure()));
    let mut best: Option<Counterexample> = None;
    for (start, preparation) in start_points(a, family, opts) {
        if let Some((inputs, violation)) = witness(a, base, start, space.as_ref()) {
            let run = a.run(start, &inputs).expect("witness inputs are valid");
            let candidate = Counterexample { start, preparation, run, violation };
            if best.as_ref().is_none_or(|b| candidate.len() < b.len()) {
                best = Some(candidate);
            }
        }
    }
    Verdict { family, obeys: best.is_none(), counterexample: best }
}

/// Cheaper yes/no variant of [`check_with`] that stops at the first violation.
pub fn obeys(a: &MealyAutomaton, family: Family, opts: CheckOptions) -> bool {
    let base = family.base();
    let space = (base == Family::All).then(|| StabilizerSpace::from_mixed(a.structure()));
    start_points(a, family, opts).into_iter().all(|(start, _)| witness(a, base, start, space.as_ref()).is_none())
}

pub fn check_context(a: &MealyAutomaton, prime: bool) -> Verdict {
    check(a, if prime { Family::ContextPrime } else { Family::Context })
}

pub fn check_compat(a: &MealyAutomaton, prime: bool) -> Verdict {
    check(a, if prime { Family::CompatPrime } else { Family::Compat })
}

pub fn check_rc(a: &MealyAutomaton) -> Verdict {
    check(a, Family::Rc)
}

pub fn check_repeat(a: &MealyAutomaton) -> Verdict {
    check(a, Family::Repeat)
}

pub fn check_all(a: &MealyAutomaton, prime: bool) -> Verdict {
    check(a, if prime { Family::AllPrime } else { Family::All })
}

pub(crate) const ORDERS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

type Witness = Option<(Vec<ObsId>, String)>;

fn witness(a: &MealyAutomaton, base: Family, start: usize, space: Option<&StabilizerSpace>) -> Witness {
    match base {
        Family::Rc => rc_witness(a, start),
        Family::Repeat => repeat_witness(a, start),
        Family::Context => shortest_of(a.structure().contexts().iter().map(|c| context_witness(a, start, c))),
        Family::Compat => shortest_of((0..a.num_observables()).map(|y| compat_witness(a, start, y))),
        Family::All => all_witness(a, start, space.expect("stabilizer space for the all family")),
        _ => unreachable!("base family"),
    }
}

fn shortest_of(candidates: impl Iterator<Item = Witness>) -> Witness {
    candidates.flatten().fold(None, |best: Witness, w| match best {
        Some(b) if b.0.len() <= w.0.len() => Some(b),
        _ => Some(w),
    })
}

fn members_text(s: &ObservableStructure, members: &[ObsId]) -> String {
    members.iter().map(|&x| s.label(x)).collect::<Vec<_>>().join(",")
}

fn rc_witness(a: &MealyAutomaton, start: usize) -> Witness {
    let s = a.structure();
    for ctx in s.contexts() {
        for order in ORDERS {
            let seq: Vec<ObsId> = order.iter().map(|&i| ctx.members[i]).collect();
            let run = a.run(start, &seq).expect("valid ids");
            let product = Sign::product(run.outputs.iter().copied());
            if product != ctx.parity {
                let msg = format!(
                    "context {{{}}} multiplied to {product} but requires {}",
                    members_text(s, &ctx.members),
                    ctx.parity
                );
                return Some((seq, msg));
            }
        }
    }
    None
}

fn repeat_witness(a: &MealyAutomaton, start: usize) -> Witness {
    let s = a.structure();
    (0..a.num_observables()).find_map(|x| {
        let run = a.run(start, &[x, x]).expect("valid ids");
        (run.outputs[0] != run.outputs[1])
            .then(|| (vec![x, x], format!("{} answered {} then {}", s.label(x), run.outputs[0], run.outputs[1])))
    })
}

enum Edge<N> {
    To(N),
    Violation(String),
}

/// Breadth-first search for the shortest input path ending in a violating edge.
fn shortest_violation<N, F>(start: N, mut expand: F) -> Witness
where
    N: Copy + Eq + Hash,
    F: FnMut(N, &mut Vec<(ObsId, Edge<N>)>),
{
    let mut nodes: Vec<(N, usize, ObsId)> = vec![(start, usize::MAX, 0)];
    let mut seen = HashMap::from([(start, 0usize)]);
    let mut edges = Vec::new();
    let mut i = 0;
    while i < nodes.len() {
        edges.clear();
        expand(nodes[i].0, &mut edges);
        for (x, edge) in edges.drain(..) {
            match edge {
                Edge::Violation(msg) => {
                    let mut path = vec![x];
                    let mut j = i;
                    while j != 0 {
                        path.push(nodes[j].2);
                        j = nodes[j].1;
                    }
                    path.reverse();
                    return Some((path, msg));
                }
                Edge::To(n) => {
                    if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(n) {
                        e.insert(nodes.len());
                        nodes.push((n, i, x));
                    }
                }
            }
        }
        i += 1;
    }
    None
}

fn context_witness(a: &MealyAutomaton, start: usize, ctx: &crate::observables::Context) -> Witness {
    let s = a.structure();
    // Monitor: recorded outcome per member (None = not yet measured).
    shortest_violation((start, [None::<Sign>; 3]), |(q, rec), out| {
        for (j, &x) in ctx.members.iter().enumerate() {
            let (v, t) = (a.value(q, x), a.next(q, x));
            let edge = match rec[j] {
                Some(old) if old != v => {
                    Edge::Violation(format!("{} answered {v} after answering {old} in the same context", s.label(x)))
                }
                _ => {
                    let mut r = rec;
                    r[j] = Some(v);
                    match r {
                        [Some(p), Some(q2), Some(w)] if p * q2 * w != ctx.parity => Edge::Violation(format!(
                            "context {{{}}} multiplied to {} but requires {}",
                            members_text(s, &ctx.members),
                            p * q2 * w,
                            ctx.parity
                        )),
                        _ => Edge::To((t, r)),
                    }
                }
            };
            out.push((x, edge));
        }
    })
}

fn compat_witness(a: &MealyAutomaton, start: usize, y: ObsId) -> Witness {
    let s = a.structure();
    let (v, s1) = (a.value(start, y), a.next(start, y));
    let msg = |w: Sign| format!("{} answered {v} then {w} with only compatible observables between", s.label(y));
    if a.value(s1, y) != v {
        return Some((vec![y, y], msg(a.value(s1, y))));
    }
    let fillers: Vec<ObsId> = (0..a.num_observables()).filter(|&x| s.compatible(x, y)).collect();
    let (mut path, text) = shortest_violation(s1, |q, out| {
        for &x in &fillers {
            let t = a.next(q, x);
            let w = a.value(t, y);
            out.push((x, if w != v { Edge::Violation(msg(w)) } else { Edge::To(t) }));
        }
    })?;
    path.insert(0, y);
    path.push(y);
    Some((path, text))
}

fn all_witness(a: &MealyAutomaton, start: usize, space: &StabilizerSpace) -> Witness {
    let s = a.structure();
    shortest_violation((start, 0usize), |(q, k), out| {
        for x in 0..a.num_observables() {
            let v = a.value(q, x);
            let edge = match space.successor(k, x, v) {
                Some(k2) => Edge::To((a.next(q, x), k2)),
                None => {
                    let MeasurementPrediction::Deterministic(w) = space.prediction(k, x) else { unreachable!() };
                    Edge::Violation(format!("{} answered {v} but the outcome {w} is certain", s.label(x)))
                }
            };
            out.push((x, edge));
        }
    })
}
