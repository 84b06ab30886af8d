//! Exact obedience decisions against exhaustive enumeration and under
//! transformations that cannot change them.

use cmlab_core::automaton::{a3, a4, build_ten_state};
use cmlab_core::checker::{bounded_bruteforce, check, check_with, reachable, CheckOptions};
use cmlab_core::search::{symmetry_group, SymmetryFlags};
use cmlab_core::{Family, MealyAutomaton, StructureKind};
use proptest::prelude::*;

mod common;

const DEPTH: usize = 6;

fn inverse(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn exact_check_agrees_with_bounded_enumeration(a in common::automaton()) {
        for family in Family::EVERY {
            let exact = check(&a, family);
            let brute = bounded_bruteforce(&a, family, DEPTH);
            match &exact.counterexample {
                // Shortest counterexamples within the depth are found by both.
                Some(cx) if cx.len() <= DEPTH => {
                    prop_assert!(!brute.obeys, "{family}: enumeration missed {cx:?}");
                    prop_assert_eq!(brute.counterexample.as_ref().unwrap().len(), cx.len());
                }
                _ => prop_assert!(brute.obeys, "{family}: enumeration found {:?}", brute.counterexample),
            }
        }
    }

    #[test]
    fn counterexamples_replay_on_the_machine(a in common::automaton()) {
        for family in Family::EVERY {
            let Some(cx) = check(&a, family).counterexample else { continue };
            let prep = a.run(a.initial(), &cx.preparation).unwrap();
            prop_assert_eq!(prep.final_state(), cx.start);
            prop_assert_eq!(&a.run(cx.start, &cx.run.inputs).unwrap(), &cx.run);
            if !family.is_prime() {
                prop_assert!(cx.preparation.is_empty());
                prop_assert_eq!(cx.start, a.initial());
            }
        }
    }

    #[test]
    fn verdicts_ignore_state_names(a in common::automaton_with(2..=4), seed in any::<u64>()) {
        let k = a.num_states();
        let mut perm: Vec<usize> = (0..k).collect();
        perm.rotate_left(seed as usize % k);
        perm.swap(0, (seed >> 8) as usize % k);
        let b = a.relabel(&perm);
        prop_assert_eq!(b.relabel(&inverse(&perm)), a.clone());
        for family in Family::EVERY {
            let (va, vb) = (check(&a, family), check(&b, family));
            prop_assert_eq!(va.obeys, vb.obeys);
            prop_assert_eq!(va.counterexample.map(|c| c.len()), vb.counterexample.map(|c| c.len()));
        }
    }

    #[test]
    fn declared_symmetries_preserve_verdicts(a in common::automaton(), pick in any::<prop::sample::Index>()) {
        let group = symmetry_group(StructureKind::Pm.structure(), SymmetryFlags::EXTENDED);
        let g = &group[pick.index(group.len())];
        let b = g.apply(&a);
        for family in Family::EVERY {
            prop_assert_eq!(check(&a, family).obeys, check(&b, family).obeys, "{}", family);
        }
    }

    #[test]
    fn every_initial_state_means_every_start(a in common::automaton()) {
        let opts = CheckOptions { all_initial_states: true };
        for family in Family::EVERY {
            let each = (0..a.num_states()).all(|q| check(&a.with_initial(q).unwrap(), family).obeys);
            prop_assert_eq!(check_with(&a, family, opts).obeys, each);
        }
    }

    #[test]
    fn primed_families_see_every_reachable_start(a in common::automaton()) {
        let reach = reachable(&a);
        for family in [Family::ContextPrime, Family::CompatPrime, Family::AllPrime] {
            let each = reach.iter().all(|&q| check(&a.with_initial(q).unwrap(), family.base()).obeys);
            prop_assert_eq!(check(&a, family).obeys, each);
        }
    }
}

/// The 2×2 sub-squares: two rows crossed with two columns.
fn sub_squares() -> Vec<Vec<usize>> {
    let pairs = [(0, 1), (0, 2), (1, 2)];
    pairs
        .iter()
        .flat_map(|&(r1, r2)| {
            pairs.iter().map(move |&(c1, c2)| vec![3 * r1 + c1, 3 * r1 + c2, 3 * r2 + c1, 3 * r2 + c2])
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// A sub-square meets every row and column in zero or two observables,
    /// so negating it on every state keeps each context product. Only the
    /// unrestricted families, which compare values across contexts and
    /// repeats, can tell.
    #[test]
    fn sub_square_flips_keep_context_verdicts(a in common::automaton()) {
        for set in sub_squares() {
            let b = a.flip_signs(&set);
            for family in Family::EVERY.into_iter().filter(|f| f.base() != Family::All) {
                let (va, vb) = (check(&a, family), check(&b, family));
                prop_assert_eq!(va.obeys, vb.obeys, "{}", family);
                prop_assert_eq!(va.counterexample.map(|c| c.len()), vb.counterexample.map(|c| c.len()));
            }
        }
    }
}

/// Verdicts of the named machines, as stated for them.
#[test]
fn named_machines() {
    let a3 = a3();
    assert!(check(&a3, Family::Rc).obeys);
    assert!(check(&a3, Family::ContextPrime).obeys);
    assert!(!check(&a3, Family::CompatPrime).obeys);
    let a4 = a4();
    assert!(check(&a4, Family::ContextPrime).obeys);
    assert!(check(&a4, Family::CompatPrime).obeys);
    assert!(!check(&a4, Family::All).obeys);
    let a10 = build_ten_state().unwrap().automaton;
    assert_eq!(a10.num_states(), 10);
    for family in Family::EVERY {
        assert!(check(&a10, family).obeys, "{family}");
    }
}

#[test]
fn constant_machines_fail_rc_by_parity() {
    // Any fixed assignment violates an odd number of contexts.
    let plus = MealyAutomaton::constant(StructureKind::Pm, &[cmlab_core::Sign::Plus; 9]).unwrap();
    let v = check(&plus, Family::Rc);
    assert!(!v.obeys);
    assert_eq!(v.counterexample.unwrap().len(), 3);
}
