//! Exhaustive search over k-state machines.
//!
//! State 0 is the initial state and only machines whose states are all
//! reachable from it are produced: a machine with unreachable states obeys
//! a family exactly when its reachable part does, which has fewer states.
//!
//! When the primed contextuality or quantum family is requested, all value
//! tables are filled first, the non-initial ones in increasing order, so the
//! table rules can prune before any transition is chosen; transitions
//! follow, most constrained cell first. Otherwise cells are filled in the
//! order the partial checks ask for them and every other state is
//! introduced as the lowest unused id the first time a transition points
//! to it, so each machine is produced once up to relabeling.
//!
//! In both modes the initial value table is restricted to orbit
//! representatives of the symmetry group, and every complete candidate is
//! confirmed by the checker before being reported.

mod monitor;
mod partial;
mod propagate;
mod symmetry;

use std::collections::BTreeSet;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rayon::prelude::*;

pub use partial::{probe, PartialAutomaton, Probe};
pub use propagate::{propagate, Propagation, Rule};
pub use symmetry::{
    canonical_form, equivalence_classes, symmetry_group, table_orbit_representatives, Symmetry, SymmetryFlags,
};

use crate::automaton::MealyAutomaton;
use crate::checker::{self, CheckOptions, Family};
use crate::error::{Error, Result};
use crate::inequality::violated_mask;
use crate::observables::{ObservableStructure, Sign, StructureKind};
use crate::oracle::StabilizerSpace;

/// Extra condition a reported machine must satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Restriction {
    /// Some value table violates three or more contexts.
    ThreeContradictions,
}

impl FromStr for Restriction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Restriction> {
        match s {
            "three-contradictions" => Ok(Restriction::ThreeContradictions),
            other => Err(Error::InvalidProblem(format!("unknown restriction `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchProblem {
    pub structure: StructureKind,
    pub states: usize,
    pub families: Vec<Family>,
    pub symmetry: SymmetryFlags,
    pub restriction: Option<Restriction>,
    /// Report every equivalence class instead of stopping at the first machine.
    pub find_all: bool,
    /// Narrow domains with the table rules (only when they apply).
    pub use_rules: bool,
    /// Worker threads; 0 picks the number of available cores.
    pub jobs: usize,
    /// Give up with [`SearchStatus::Unfinished`] after this many nodes.
    pub node_budget: Option<u64>,
}

impl SearchProblem {
    pub fn new(structure: StructureKind, states: usize, families: &[Family]) -> SearchProblem {
        SearchProblem {
            structure,
            states,
            families: families.to_vec(),
            symmetry: SymmetryFlags::DECLARED,
            restriction: None,
            find_all: false,
            use_rules: true,
            jobs: 0,
            node_budget: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.families.is_empty() {
            return Err(Error::InvalidProblem("at least one family is required".into()));
        }
        if !(1..=16).contains(&self.states) {
            return Err(Error::InvalidProblem(format!("state count {} outside 1..=16", self.states)));
        }
        Ok(())
    }

    /// With only primed families the initial state is just one more
    /// preparation, so equivalence ignores it.
    pub fn ignores_initial_state(&self) -> bool {
        self.families.iter().all(|f| f.is_prime())
    }

    fn rules_apply(&self) -> bool {
        self.use_rules && self.families.iter().any(|f| matches!(f, Family::ContextPrime | Family::AllPrime))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SearchStatus {
    /// Canonical representatives, sorted.
    Found(Vec<MealyAutomaton>),
    Exhausted,
    Unfinished,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOutcome {
    pub status: SearchStatus,
    pub states: usize,
    pub nodes_explored: u64,
}

impl SearchOutcome {
    pub fn status_name(&self) -> &'static str {
        match self.status {
            SearchStatus::Found(_) => "found",
            SearchStatus::Exhausted => "exhausted",
            SearchStatus::Unfinished => "unfinished",
        }
    }

    pub fn found(&self) -> &[MealyAutomaton] {
        match &self.status {
            SearchStatus::Found(list) => list,
            _ => &[],
        }
    }

    /// `log2(k)` when a machine was found.
    pub fn memory_cost(&self) -> Option<f64> {
        matches!(self.status, SearchStatus::Found(_)).then(|| (self.states as f64).log2())
    }
}

/// Number of contexts whose product under `table` differs from the parity.
pub fn contradiction_count(table: &[Sign], s: &ObservableStructure) -> Result<usize> {
    if table.len() != s.len() {
        return Err(Error::IncompleteTable);
    }
    let mask = table.iter().enumerate().map(|(x, v)| u32::from(v.is_minus()) << x).sum();
    Ok(violated_mask(s, mask).count_ones() as usize)
}

/// Nodes expanded before splitting the tree across workers.
const SPLIT_TARGET: usize = 256;

struct Engine<'a> {
    problem: &'a SearchProblem,
    structure: &'static ObservableStructure,
    group: Vec<Symmetry>,
    reps: Vec<u32>,
    space: Option<StabilizerSpace>,
    rules: bool,
    monitors: monitor::Monitors,
    /// Fill every value table before any transition, labeling the
    /// non-initial states by increasing table instead of by creation order.
    values_first: bool,
    budget: u64,
    counter: AtomicU64,
    aborted: AtomicBool,
}

enum Step {
    Dead,
    Leaf(Vec<u8>),
    Branch(Vec<PartialAutomaton>),
}

enum Item {
    Open(PartialAutomaton),
    Leaf(Vec<u8>),
}

#[derive(Default)]
struct Harvest {
    found: BTreeSet<Vec<u8>>,
    nodes: u64,
}

impl Engine<'_> {
    fn expand(&self, p: PartialAutomaton, nodes: &mut u64) -> Step {
        *nodes += 1;
        if self.counter.fetch_add(1, Ordering::Relaxed) >= self.budget {
            self.aborted.store(true, Ordering::Relaxed);
            return Step::Dead;
        }
        let mut p = p;
        if !self.narrow(&mut p) {
            return Step::Dead;
        }
        if self.values_first {
            if let Some((q, x)) = first_open_value(&p) {
                let branches = Sign::BOTH
                    .into_iter()
                    .filter_map(|v| {
                        let mut child = p.clone();
                        child.restrict_value(q, x, partial::sign_bit(v)).then_some(child)
                    })
                    .collect();
                return Step::Branch(branches);
            }
        }
        let cell = match probe(&p, &self.problem.families, self.space.as_ref()) {
            Probe::Violation => return Step::Dead,
            Probe::Needs(..) if self.values_first => smallest_open(&p),
            Probe::Needs(q, x) => Some((q, x)),
            Probe::Clear => (0..p.created())
                .flat_map(|q| (0..p.num_observables()).map(move |x| (q, x)))
                .find(|&(q, x)| !p.is_fixed(q, x)),
        };
        match cell {
            Some((q, x)) => Step::Branch(children(&p, q, x)),
            None if p.created() < p.num_states() => Step::Dead,
            None => self.leaf(&p).map_or(Step::Dead, Step::Leaf),
        }
    }

    fn narrow(&self, p: &mut PartialAutomaton) -> bool {
        if self.group.len() > 1 && !self.narrow_initial_table(p) {
            return false;
        }
        if self.rules && propagate::narrow(p).is_err() {
            return false;
        }
        if !self.monitors.is_empty() && !self.monitors.narrow(p) {
            return false;
        }
        // A transition pinned by the rules to the next unused id introduces it.
        let mut created = p.created();
        for q in 0..p.num_states() {
            for x in 0..p.num_observables() {
                if let Some(t) = p.next(q, x) {
                    created = created.max(t + 1);
                }
            }
        }
        p.set_created(created);
        let open = (0..created)
            .flat_map(|q| (0..p.num_observables()).map(move |x| (q, x)))
            .filter(|&(q, x)| p.next(q, x).is_none())
            .count();
        if open < p.num_states() - created || !possibly_trim(p) {
            return false;
        }
        if self.values_first && !tables_sorted(p) {
            return false;
        }
        if self.problem.restriction == Some(Restriction::ThreeContradictions) {
            let tables: Option<Vec<u32>> = (0..p.num_states()).map(|q| p.table_mask(q)).collect();
            if let Some(tables) = tables {
                if !tables.iter().any(|&t| violated_mask(self.structure, t).count_ones() >= 3) {
                    return false;
                }
            }
        }
        true
    }

    /// Keeps the initial table inside the set of orbit representatives.
    fn narrow_initial_table(&self, p: &mut PartialAutomaton) -> bool {
        let n = p.num_observables();
        let (mut fixed, mut fixed_bits) = (0u32, 0u32);
        for x in 0..n {
            if let Some(v) = p.value(0, x) {
                fixed |= 1 << x;
                fixed_bits |= u32::from(v.is_minus()) << x;
            }
        }
        let (mut may_plus, mut may_minus) = (0u32, 0u32);
        for &r in self.reps.iter().filter(|&&r| r & fixed == fixed_bits) {
            may_minus |= r;
            may_plus |= !r;
        }
        (0..n).all(|x| {
            let mask = (u8::from(may_plus >> x & 1 == 1)) | (u8::from(may_minus >> x & 1 == 1) << 1);
            p.restrict_value(0, x, mask)
        })
    }

    fn leaf(&self, p: &PartialAutomaton) -> Option<Vec<u8>> {
        let a = p.to_automaton()?;
        let obeys = self.problem.families.iter().all(|&f| checker::obeys(&a, f, CheckOptions::default()));
        let restricted = match self.problem.restriction {
            Some(Restriction::ThreeContradictions) => {
                (0..a.num_states()).any(|q| contradiction_count(a.table(q), self.structure).unwrap() >= 3)
            }
            None => true,
        };
        if !(obeys && restricted) {
            return None;
        }
        let canonical = canonical_form(&a, &self.group, self.problem.ignores_initial_state())?;
        Some(symmetry::encoding(&canonical))
    }

    fn subtree(&self, root: PartialAutomaton) -> Harvest {
        let mut harvest = Harvest::default();
        let mut stack = vec![root];
        while let Some(p) = stack.pop() {
            if self.aborted.load(Ordering::Relaxed) {
                break;
            }
            match self.expand(p, &mut harvest.nodes) {
                Step::Dead => {}
                Step::Leaf(code) => {
                    harvest.found.insert(code);
                    if !self.problem.find_all {
                        break;
                    }
                }
                Step::Branch(children) => stack.extend(children.into_iter().rev()),
            }
        }
        harvest
    }
}

/// The open cell with the fewest candidate targets.
fn smallest_open(p: &PartialAutomaton) -> Option<(usize, usize)> {
    (0..p.num_states())
        .flat_map(|q| (0..p.num_observables()).map(move |x| (q, x)))
        .filter(|&(q, x)| !p.is_fixed(q, x))
        .min_by_key(|&(q, x)| p.next_domain(q, x).count_ones())
}

fn first_open_value(p: &PartialAutomaton) -> Option<(usize, usize)> {
    (0..p.num_states())
        .flat_map(|q| (0..p.num_observables()).map(move |x| (q, x)))
        .find(|&(q, x)| p.value(q, x).is_none())
}

/// Whether every state can still be reached from state 0.
fn possibly_trim(p: &PartialAutomaton) -> bool {
    let k = p.num_states();
    let mut seen = 1u32;
    let mut stack = vec![0];
    while let Some(q) = stack.pop() {
        for x in 0..p.num_observables() {
            let fresh = p.next_domain(q, x) & !seen;
            seen |= fresh;
            stack.extend((0..k).filter(|&t| fresh >> t & 1 == 1));
        }
    }
    seen.count_ones() as usize == k
}

/// Non-initial states carry value tables in increasing order, comparing
/// observables in id order with `+1` first. Tables fill in that order, so
/// a prefix already below its predecessor is cut.
fn tables_sorted(p: &PartialAutomaton) -> bool {
    (2..p.num_states()).all(|q| {
        for x in 0..p.num_observables() {
            match (p.value(q - 1, x), p.value(q, x)) {
                (Some(a), Some(b)) if a == b => continue,
                (Some(a), Some(b)) => return a < b,
                _ => return true,
            }
        }
        true
    })
}

fn children(p: &PartialAutomaton, q: usize, x: usize) -> Vec<PartialAutomaton> {
    let newest = p.created().min(p.num_states() - 1);
    let mut out = Vec::new();
    for v in Sign::BOTH {
        if p.value_domain(q, x) & partial::sign_bit(v) == 0 {
            continue;
        }
        for t in (0..=newest).filter(|&t| p.next_domain(q, x) >> t & 1 == 1) {
            let mut child = p.clone();
            child.assign(q, x, v, t);
            out.push(child);
        }
    }
    out
}

pub fn search(problem: &SearchProblem) -> Result<SearchOutcome> {
    problem.validate()?;
    let structure = problem.structure.structure();
    let group = symmetry_group(structure, problem.symmetry);
    let reps = table_orbit_representatives(structure.len(), &group);
    let needs_space = problem.families.iter().any(|f| f.base() == Family::All);
    let engine = Engine {
        problem,
        structure,
        group,
        reps,
        space: needs_space.then(|| StabilizerSpace::from_mixed(structure)),
        rules: problem.rules_apply(),
        monitors: monitor::Monitors::new(structure, &problem.families),
        values_first: problem.families.iter().any(|f| matches!(f, Family::ContextPrime | Family::AllPrime)),
        budget: problem.node_budget.unwrap_or(u64::MAX),
        counter: AtomicU64::new(0),
        aborted: AtomicBool::new(false),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(problem.jobs)
        .build()
        .map_err(|e| Error::InvalidProblem(e.to_string()))?;
    let (found, nodes) = pool.install(|| run(&engine));
    let status = if engine.aborted.load(Ordering::Relaxed) {
        SearchStatus::Unfinished
    } else if found.is_empty() {
        SearchStatus::Exhausted
    } else {
        let template = MealyAutomaton::constant(problem.structure, &vec![Sign::Plus; structure.len()])?;
        SearchStatus::Found(found.iter().map(|code| decode(&template, code)).collect())
    };
    let nodes = match status {
        SearchStatus::Unfinished => engine.budget,
        _ => nodes,
    };
    Ok(SearchOutcome { status, states: problem.states, nodes_explored: nodes })
}

fn decode(template: &MealyAutomaton, code: &[u8]) -> MealyAutomaton {
    let values = code.chunks(2).map(|p| if p[0] == 1 { Sign::Minus } else { Sign::Plus }).collect();
    let next = code.chunks(2).map(|p| p[1] as usize).collect();
    MealyAutomaton::new(template.kind(), values, next, 0).expect("encoded machine is valid")
}

/// Expands breadth-first until the frontier is wide enough, then explores
/// the subtrees in parallel. Results are merged in frontier order, so they
/// do not depend on the number of workers.
fn run(engine: &Engine<'_>) -> (BTreeSet<Vec<u8>>, u64) {
    let mut root = PartialAutomaton::new(engine.problem.structure, engine.problem.states);
    if engine.values_first {
        root.set_created(engine.problem.states);
    }
    let mut items = vec![Item::Open(root)];
    let mut nodes = 0u64;
    while items.len() < SPLIT_TARGET && items.iter().any(|i| matches!(i, Item::Open(_))) {
        let mut next_level = Vec::new();
        for item in items {
            match item {
                Item::Leaf(code) => next_level.push(Item::Leaf(code)),
                Item::Open(p) => match engine.expand(p, &mut nodes) {
                    Step::Dead => {}
                    Step::Leaf(code) => next_level.push(Item::Leaf(code)),
                    Step::Branch(children) => next_level.extend(children.into_iter().map(Item::Open)),
                },
            }
        }
        items = next_level;
        if engine.aborted.load(Ordering::Relaxed) {
            return (BTreeSet::new(), nodes);
        }
    }
    let mut found = BTreeSet::new();
    let chunk = if engine.problem.find_all { items.len().max(1) } else { 4 * rayon::current_num_threads() };
    let mut items = items.into_iter();
    loop {
        let batch: Vec<Item> = items.by_ref().take(chunk).collect();
        if batch.is_empty() {
            break;
        }
        let harvests: Vec<Harvest> = batch
            .into_par_iter()
            .map(|item| match item {
                Item::Leaf(code) => Harvest { found: BTreeSet::from([code]), nodes: 0 },
                Item::Open(p) => engine.subtree(p),
            })
            .collect();
        for h in harvests {
            nodes += h.nodes;
            found.extend(h.found);
            if !engine.problem.find_all && !found.is_empty() {
                return (found, nodes);
            }
        }
    }
    (found, nodes)
}

#[derive(Clone, Debug, PartialEq)]
pub enum MemoryCost {
    /// Fewest states of an obeying machine, and `log2` of it.
    Exact {
        states: usize,
        bits: f64,
    },
    NoneUpTo(usize),
    /// The budget ran out while searching with this many states.
    Unfinished(usize),
}

/// Increases the state count until the search finds a machine.
pub fn memory_cost(structure: StructureKind, families: &[Family], k_max: usize) -> Result<MemoryCost> {
    memory_cost_with(&SearchProblem::new(structure, 1, families), k_max)
}

/// As [`memory_cost`], taking every other setting from `template`.
pub fn memory_cost_with(template: &SearchProblem, k_max: usize) -> Result<MemoryCost> {
    if k_max == 0 {
        return Err(Error::InvalidProblem("k_max must be at least 1".into()));
    }
    for k in 1..=k_max {
        let problem = SearchProblem { states: k, find_all: false, ..template.clone() };
        match search(&problem)?.status {
            SearchStatus::Found(_) => return Ok(MemoryCost::Exact { states: k, bits: (k as f64).log2() }),
            SearchStatus::Exhausted => {}
            SearchStatus::Unfinished => return Ok(MemoryCost::Unfinished(k)),
        }
    }
    Ok(MemoryCost::NoneUpTo(k_max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{a3, a4};

    fn pm() -> &'static ObservableStructure {
        StructureKind::Pm.structure()
    }

    #[test]
    fn contradiction_counts() {
        assert_eq!(contradiction_count(&[Sign::Plus; 9], pm()).unwrap(), 1);
        assert_eq!(contradiction_count(&[Sign::Plus; 8], pm()), Err(Error::IncompleteTable));
        assert_eq!(contradiction_count(a3().table(1), pm()).unwrap() % 2, 1);
        for t in 0..512u32 {
            let table: Vec<Sign> = (0..9).map(|x| if t >> x & 1 == 1 { Sign::Minus } else { Sign::Plus }).collect();
            assert!([1, 3, 5].contains(&contradiction_count(&table, pm()).unwrap()));
        }
    }

    #[test]
    fn two_states_cannot_obey_rc_and_repeat() {
        let p = SearchProblem::new(StructureKind::Pm, 2, &[Family::Rc, Family::Repeat]);
        assert_eq!(search(&p).unwrap().status, SearchStatus::Exhausted);
    }

    #[test]
    fn repeat_alone_needs_one_state() {
        let cost = memory_cost(StructureKind::Pm, &[Family::Repeat], 3).unwrap();
        assert_eq!(cost, MemoryCost::Exact { states: 1, bits: 0.0 });
    }

    #[test]
    fn three_states_for_primed_context() {
        let p = SearchProblem { find_all: true, ..SearchProblem::new(StructureKind::Pm, 3, &[Family::ContextPrime]) };
        let out = search(&p).unwrap();
        let group = symmetry_group(pm(), SymmetryFlags::DECLARED);
        let a3c = canonical_form(&a3(), &group, true).unwrap();
        assert!(out.found().contains(&a3c));
        for a in out.found() {
            assert!(checker::check(a, Family::ContextPrime).obeys);
        }
    }

    #[test]
    fn budget_reports_unfinished() {
        let p = SearchProblem {
            node_budget: Some(10),
            ..SearchProblem::new(StructureKind::Pm, 3, &[Family::ContextPrime, Family::CompatPrime])
        };
        let out = search(&p).unwrap();
        assert_eq!(out.status, SearchStatus::Unfinished);
        assert_eq!(out.nodes_explored, 10);
    }

    #[test]
    fn invalid_problems() {
        assert!(search(&SearchProblem::new(StructureKind::Pm, 0, &[Family::Rc])).is_err());
        assert!(search(&SearchProblem::new(StructureKind::Pm, 2, &[])).is_err());
        assert!(a4().num_states() == 4);
    }
}
