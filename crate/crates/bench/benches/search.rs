use std::time::Duration;

use cmlab_core::search::{search, symmetry_group, SymmetryFlags};
use cmlab_core::{Family, SearchProblem, StructureKind};
use criterion::{criterion_group, criterion_main, Criterion};

fn problem(states: usize, families: &[Family], find_all: bool) -> SearchProblem {
    SearchProblem { find_all, jobs: 1, ..SearchProblem::new(StructureKind::Pm, states, families) }
}

fn searches(c: &mut Criterion) {
    let mut g = c.benchmark_group("search");
    g.sample_size(10).measurement_time(Duration::from_secs(10));
    let cases = [
        ("k2/rc+repeat", problem(2, &[Family::Rc, Family::Repeat], false)),
        ("k3/context'/find-all", problem(3, &[Family::ContextPrime], true)),
        ("k3/context'+compat'", problem(3, &[Family::ContextPrime, Family::CompatPrime], false)),
        ("k3/context'/no-rules", SearchProblem { use_rules: false, ..problem(3, &[Family::ContextPrime], false) }),
    ];
    for (name, p) in cases {
        g.bench_function(name, |b| b.iter(|| search(&p).unwrap()));
    }
    g.finish();
}

fn groups(c: &mut Criterion) {
    let ext = StructureKind::Extended15.structure();
    c.bench_function("symmetry/extended15", |b| b.iter(|| symmetry_group(ext, SymmetryFlags::DECLARED)));
}

criterion_group!(benches, searches, groups);
criterion_main!(benches);
