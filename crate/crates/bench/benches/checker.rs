use std::hint::black_box;

use cmlab_core::automaton::{a3, a4, build_ten_state};
use cmlab_core::checker::{bounded_bruteforce, check};
use cmlab_core::oracle::{reachable_states, StabilizerSpace};
use cmlab_core::{Family, StabilizerState, StructureKind};
use criterion::{criterion_group, criterion_main, Criterion};

fn checker(c: &mut Criterion) {
    let a10 = build_ten_state().unwrap().automaton;
    let mut g = c.benchmark_group("check");
    for family in Family::EVERY {
        g.bench_function(format!("a4/{family}"), |b| b.iter(|| check(black_box(&a4()), family)));
    }
    g.bench_function("a10/all'", |b| b.iter(|| check(black_box(&a10), Family::AllPrime)));
    g.finish();

    c.bench_function("bruteforce/a3/context'/depth6", |b| {
        b.iter(|| bounded_bruteforce(black_box(&a3()), Family::ContextPrime, 6))
    });
}

fn oracle(c: &mut Criterion) {
    let pm = StructureKind::Pm.structure();
    c.bench_function("oracle/reachable-from-mixed", |b| b.iter(|| reachable_states(&StabilizerState::mixed(), pm)));
    c.bench_function("oracle/space-closure", |b| b.iter(|| StabilizerSpace::from_mixed(black_box(pm))));
}

criterion_group!(benches, checker, oracle);
criterion_main!(benches);
