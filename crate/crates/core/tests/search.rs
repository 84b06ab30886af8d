//! The backtracking search against naive enumeration and against itself
//! under settings that must not change its answer.

use std::collections::BTreeSet;
use std::time::Instant;

use cmlab_core::checker::{check, reachable, CheckOptions};
use cmlab_core::search::{
    canonical_form, equivalence_classes, memory_cost, search, symmetry_group, MemoryCost, SymmetryFlags,
};
use cmlab_core::{Family, MealyAutomaton, SearchProblem, SearchStatus, Sign, StructureKind};

fn pm_group(flags: SymmetryFlags) -> Vec<cmlab_core::search::Symmetry> {
    symmetry_group(StructureKind::Pm.structure(), flags)
}

fn single_state_machines() -> Vec<MealyAutomaton> {
    (0..1u32 << 9)
        .map(|t| {
            let values: Vec<Sign> = (0..9).map(|x| if t >> x & 1 == 1 { Sign::Minus } else { Sign::Plus }).collect();
            MealyAutomaton::constant(StructureKind::Pm, &values).unwrap()
        })
        .collect()
}

fn find_all(states: usize, families: &[Family], symmetry: SymmetryFlags) -> Vec<MealyAutomaton> {
    let problem = SearchProblem { find_all: true, symmetry, ..SearchProblem::new(StructureKind::Pm, states, families) };
    let outcome = search(&problem).unwrap();
    assert_ne!(outcome.status, SearchStatus::Unfinished);
    outcome.found().to_vec()
}

#[test]
fn single_state_search_matches_enumeration() {
    let all = single_state_machines();
    for flags in [SymmetryFlags::NONE, SymmetryFlags::DECLARED] {
        let group = pm_group(flags);
        for family in Family::EVERY {
            let obeying: Vec<MealyAutomaton> = all.iter().filter(|a| check(a, family).obeys).cloned().collect();
            let expected = equivalence_classes(&obeying, &group, family.is_prime());
            assert_eq!(find_all(1, &[family], flags), expected, "{family} {flags:?}");
        }
    }
}

#[test]
fn single_state_counts() {
    // Every constant machine repeats its answers; none satisfies all six parities.
    assert_eq!(find_all(1, &[Family::Repeat], SymmetryFlags::NONE).len(), 512);
    assert_eq!(find_all(1, &[Family::Compat], SymmetryFlags::NONE).len(), 512);
    for family in [Family::Rc, Family::Context, Family::ContextPrime, Family::All, Family::AllPrime] {
        assert!(find_all(1, &[family], SymmetryFlags::NONE).is_empty(), "{family}");
    }
}

/// No two-state machine can be enumerated outright (2^36 tables), so the
/// two-state census is checked for closure instead: every trim neighbour
/// one cell away that obeys must already be represented.
#[test]
fn two_state_rc_census_is_closed_under_single_cell_edits() {
    let group = pm_group(SymmetryFlags::DECLARED);
    let found = find_all(2, &[Family::Rc], SymmetryFlags::DECLARED);
    assert_eq!(found.len(), 5439);
    let known: BTreeSet<String> = found.iter().map(|a| format!("{a:?}")).collect();
    let start = Instant::now();
    let mut neighbours = 0;
    for a in found.iter().step_by(7) {
        assert!(check(a, Family::Rc).obeys);
        assert!(!check(a, Family::Repeat).obeys, "Rc and Repeat together need more states:\n{a:?}");
        for q in 0..2 {
            for x in 0..9 {
                let (mut values, mut next) = (a.values().to_vec(), a.transitions().to_vec());
                values[9 * q + x] = -values[9 * q + x];
                let flipped = MealyAutomaton::new(a.kind(), values, a.transitions().to_vec(), 0).unwrap();
                next[9 * q + x] = 1 - next[9 * q + x];
                let moved = MealyAutomaton::new(a.kind(), a.values().to_vec(), next, 0).unwrap();
                for b in [flipped, moved] {
                    if reachable(&b).len() == 2 && check(&b, Family::Rc).obeys {
                        neighbours += 1;
                        let c = canonical_form(&b, &group, false).unwrap();
                        assert!(known.contains(&format!("{c:?}")), "missing neighbour\n{b:?}");
                    }
                }
            }
        }
    }
    assert!(neighbours > 0);
    eprintln!("{neighbours} obeying neighbours checked in {:?}", start.elapsed());
}

#[test]
fn rules_do_not_change_the_answer() {
    for families in [&[Family::ContextPrime][..], &[Family::ContextPrime, Family::CompatPrime]] {
        let run = |use_rules| {
            let problem =
                SearchProblem { find_all: true, use_rules, ..SearchProblem::new(StructureKind::Pm, 3, families) };
            search(&problem).unwrap()
        };
        let (with, without) = (run(true), run(false));
        assert_eq!(with.status, without.status, "{families:?}");
        assert!(with.nodes_explored <= without.nodes_explored);
    }
}

#[test]
fn worker_count_does_not_change_the_answer() {
    for (k, families) in [(3, vec![Family::ContextPrime]), (2, vec![Family::Rc])] {
        let run = |jobs| {
            let problem = SearchProblem { find_all: true, jobs, ..SearchProblem::new(StructureKind::Pm, k, &families) };
            search(&problem).unwrap().status
        };
        assert_eq!(run(1), run(2), "{families:?}");
    }
}

#[test]
fn three_state_context_prime_classes() {
    let found = find_all(3, &[Family::ContextPrime], SymmetryFlags::DECLARED);
    assert_eq!(found.len(), 2);
    let group = pm_group(SymmetryFlags::DECLARED);
    let a3 = canonical_form(&cmlab_core::automaton::a3(), &group, true).unwrap();
    assert!(found.contains(&a3));
    for a in &found {
        assert!(check(a, Family::ContextPrime).obeys);
        assert_eq!(reachable(a).len(), 3);
        // Any state may serve as the initial one.
        assert!(cmlab_core::checker::obeys(a, Family::Context, CheckOptions { all_initial_states: true }));
    }
}

#[test]
fn found_machines_obey_after_any_declared_symmetry() {
    let group = pm_group(SymmetryFlags::DECLARED);
    for a in find_all(3, &[Family::ContextPrime], SymmetryFlags::DECLARED) {
        for g in group.iter().step_by(5) {
            assert!(check(&g.apply(&a), Family::ContextPrime).obeys);
        }
    }
}

#[test]
fn budgets_are_honoured() {
    let problem =
        SearchProblem { node_budget: Some(10), ..SearchProblem::new(StructureKind::Pm, 3, &[Family::ContextPrime]) };
    let outcome = search(&problem).unwrap();
    assert_eq!(outcome.status, SearchStatus::Unfinished);
    assert!(outcome.nodes_explored <= 10);
}

#[test]
fn invalid_problems_are_rejected() {
    assert!(search(&SearchProblem::new(StructureKind::Pm, 0, &[Family::Rc])).is_err());
    assert!(search(&SearchProblem::new(StructureKind::Pm, 2, &[])).is_err());
    assert!(memory_cost(StructureKind::Pm, &[Family::Rc], 0).is_err());
}

#[test]
fn memory_costs() {
    let cost = |families: &[Family]| memory_cost(StructureKind::Pm, families, 4).unwrap();
    assert_eq!(cost(&[Family::Repeat]), MemoryCost::Exact { states: 1, bits: 0.0 });
    assert_eq!(cost(&[Family::Rc]), MemoryCost::Exact { states: 2, bits: 1.0 });
    assert_eq!(cost(&[Family::ContextPrime]), MemoryCost::Exact { states: 3, bits: 3f64.log2() });
    assert_eq!(cost(&[Family::ContextPrime, Family::CompatPrime]), MemoryCost::Exact { states: 4, bits: 2.0 });
}
