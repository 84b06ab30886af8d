//! The numbered reproduction criteria, each with a pinned time limit.
//!
//! Every criterion recomputes its claim from scratch and reports what it
//! saw. Randomized parts draw from a fixed seed, so reports are identical
//! across runs apart from the timings.

use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automaton::{a3, a4, build_ten_state, parse, serialize, MealyAutomaton};
use crate::checker::{self, bounded_bruteforce, Family, Verdict};
use crate::inequality::{chi_automaton, noncontextual_max, three_contradiction_square_lemma};
use crate::observables::{context_product, ObsId, Pauli, Sign, StructureKind};
use crate::oracle::{
    dense_oracle_check, matmul, pauli_matrix, reachable_pure_count, DyadicWeight, MeasurementPrediction,
    StabilizerState, TraceItem,
};
use crate::search::{
    canonical_form, contradiction_count, equivalence_classes, search, symmetry_group, Restriction, SearchProblem,
    SearchStatus, SymmetryFlags,
};

pub const CRITERIA: usize = 11;

/// Seed of every randomized criterion.
pub const SEED: u64 = 0x5eed_c0de;

/// Depth of the brute-force cross-check of the checker.
pub const BRUTEFORCE_DEPTH: usize = 8;

const RANDOM_TRACES: usize = 10_000;
const RANDOM_AUTOMATA: usize = 500;

#[derive(Clone, Copy, Debug, Default)]
pub struct ReproduceOptions {
    /// Leave out the full census of four-state machines.
    pub skip_census: bool,
    /// Search workers; 0 picks the number of available cores.
    pub jobs: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug)]
pub struct CriterionReport {
    pub id: usize,
    pub name: &'static str,
    pub outcome: Outcome,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Duration,
}

impl CriterionReport {
    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.outcome {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::Skipped => "SKIP",
        };
        write!(
            f,
            "{tag} {:>2} {} [{:.3}s, limit {}s] {}",
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.limit.as_secs(),
            self.detail
        )
    }
}

pub fn criterion_name(id: usize) -> &'static str {
    match id {
        1 => "pauli-contexts",
        2 => "oracle-equivalence",
        3 => "inequality-bounds",
        4 => "a3-behavior",
        5 => "context-memory",
        6 => "context-compat-memory",
        7 => "a4-uniqueness",
        8 => "extended-square-chain",
        9 => "quantum-family-bracket",
        10 => "reachable-pure-states",
        11 => "property-suites",
        _ => "unknown",
    }
}

fn limit(id: usize) -> Duration {
    Duration::from_secs(match id {
        1 | 3 | 4 | 10 => 1,
        2 | 9 => 60,
        5 | 6 | 8 => 600,
        7 => 4 * 3600,
        11 => 300,
        _ => 0,
    })
}

/// Runs one criterion; `None` for an id outside `1..=CRITERIA`.
pub fn run_criterion(id: usize, opts: ReproduceOptions) -> Option<CriterionReport> {
    if !(1..=CRITERIA).contains(&id) {
        return None;
    }
    let name = criterion_name(id);
    if id == 7 && opts.skip_census {
        return Some(CriterionReport {
            id,
            name,
            outcome: Outcome::Skipped,
            detail: "census skipped on request".into(),
            elapsed: Duration::ZERO,
            limit: limit(id),
        });
    }
    let start = Instant::now();
    let (ok, detail) = match id {
        1 => pauli_contexts(),
        2 => oracle_equivalence(),
        3 => inequality_bounds(),
        4 => a3_behavior(),
        5 => context_memory(opts),
        6 => context_compat_memory(opts),
        7 => a4_uniqueness(opts),
        8 => extended_square_chain(opts),
        9 => quantum_family_bracket(),
        10 => reachable_pure_states(),
        _ => property_suites(),
    };
    let elapsed = start.elapsed();
    let within = elapsed <= limit(id);
    let detail = if within { detail } else { format!("{detail}; over the time limit") };
    Some(CriterionReport {
        id,
        name,
        outcome: if ok && within { Outcome::Pass } else { Outcome::Fail },
        detail,
        elapsed,
        limit: limit(id),
    })
}

/// Runs every criterion in order, calling `report` as each one finishes.
pub fn reproduce(opts: ReproduceOptions, mut report: impl FnMut(&CriterionReport)) -> Vec<CriterionReport> {
    (1..=CRITERIA)
        .map(|id| {
            let r = run_criterion(id, opts).expect("criterion id in range");
            report(&r);
            r
        })
        .collect()
}

type Check = (bool, String);

fn problem(k: usize, families: &[Family], opts: ReproduceOptions) -> SearchProblem {
    SearchProblem { jobs: opts.jobs, ..SearchProblem::new(StructureKind::Pm, k, families) }
}

fn pauli_contexts() -> Check {
    let mut ok = true;
    let mut minus = [0; 2];
    for (i, kind) in [StructureKind::Pm, StructureKind::Extended15].into_iter().enumerate() {
        let s = kind.structure();
        for c in s.contexts() {
            let (p, phase) = context_product(s, c);
            // Cross-check the symplectic product against explicit matrices.
            let dense =
                c.members.iter().fold(pauli_matrix(Pauli::IDENTITY), |m, &x| matmul(&m, &pauli_matrix(s.pauli(x))));
            let mut expected = pauli_matrix(Pauli::IDENTITY);
            for (r, row) in expected.iter_mut().enumerate() {
                row[r] *= i64::from(c.parity.as_i32());
            }
            ok &= p == Pauli::IDENTITY && phase.as_sign() == Some(c.parity) && dense == expected;
            minus[i] += usize::from(c.parity == Sign::Minus);
        }
    }
    let (pm, ext) = (StructureKind::Pm.structure(), StructureKind::Extended15.structure());
    ok &= pm.contexts().len() == 6 && ext.contexts().len() == 15 && minus == [1, 3];
    (
        ok,
        format!(
            "{} square and {} extended contexts multiply to their parities; parity -1 trios: {} and {}",
            pm.contexts().len(),
            ext.contexts().len(),
            minus[0],
            minus[1]
        ),
    )
}

/// Exact weight of `trace` on the maximally mixed state from the stabilizer
/// oracle: `2^-r` for `r` random outcomes, zero once an outcome is impossible.
fn stabilizer_weight(trace: &[TraceItem]) -> DyadicWeight {
    let mut state = StabilizerState::mixed();
    let mut random = 0;
    for &(p, v) in trace {
        match state.predict(p).expect("square observables are not the identity") {
            MeasurementPrediction::Deterministic(w) if w != v => {
                return DyadicWeight { numerator: 0, denominator_log2: 0 };
            }
            MeasurementPrediction::Deterministic(_) => {}
            MeasurementPrediction::Random => random += 1,
        }
        state = state.collapse(p, v).expect("outcome is possible");
    }
    DyadicWeight { numerator: 1, denominator_log2: random }
}

fn oracle_equivalence() -> Check {
    let pm = StructureKind::Pm.structure();
    let items: Vec<TraceItem> = (0..pm.len()).flat_map(|x| Sign::BOTH.map(|v| (pm.pauli(x), v))).collect();
    let mut level: Vec<Vec<TraceItem>> = vec![Vec::new()];
    let (mut exhaustive, mut mismatches, mut possible) = (0usize, 0usize, 0usize);
    for len in 0..=4 {
        for trace in &level {
            exhaustive += 1;
            let w = dense_oracle_check(trace);
            mismatches += usize::from(w != stabilizer_weight(trace));
            possible += usize::from(w.is_nonzero());
        }
        if len < 4 {
            level = level.iter().flat_map(|t| items.iter().map(move |&i| [t.as_slice(), &[i]].concat())).collect();
        }
    }
    let ext = StructureKind::Extended15.structure();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut random_possible = 0;
    for _ in 0..RANDOM_TRACES {
        let len = rng.gen_range(0..=8);
        let mut state = StabilizerState::mixed();
        let mut trace = Vec::with_capacity(len);
        for _ in 0..len {
            let p = ext.pauli(rng.gen_range(0..ext.len()));
            // Mostly follow the certain prediction so that long traces stay possible.
            let v = match state.predict(p).unwrap() {
                MeasurementPrediction::Deterministic(w) if rng.gen_bool(0.8) => w,
                _ => {
                    if rng.gen_bool(0.5) {
                        Sign::Plus
                    } else {
                        Sign::Minus
                    }
                }
            };
            trace.push((p, v));
            state = state.collapse(p, v).unwrap_or(state);
        }
        let w = dense_oracle_check(&trace);
        mismatches += usize::from(w != stabilizer_weight(&trace));
        random_possible += usize::from(w.is_nonzero());
    }
    (
        mismatches == 0,
        format!(
            "{exhaustive} square traces up to length 4 ({possible} possible) and {RANDOM_TRACES} random extended \
             traces ({random_possible} possible); exact weight mismatches: {mismatches}"
        ),
    )
}

fn inequality_bounds() -> Check {
    let pm = noncontextual_max(StructureKind::Pm.structure());
    let ext = noncontextual_max(StructureKind::Extended15.structure());
    (
        (pm.max, pm.quantum, ext.max, ext.quantum) == (4, 6, 9, 15),
        format!("square max={} quantum={}; extended max={} quantum={}", pm.max, pm.quantum, ext.max, ext.quantum),
    )
}

fn a3_behavior() -> Check {
    let a = a3();
    let chi: Vec<i32> = (0..a.num_states()).map(|s| chi_automaton(&a, s).map_or(i32::MIN, |r| r.value)).collect();
    let context = checker::check_context(&a, true);
    let compat = checker::check_compat(&a, true);
    let s = a.structure();
    let (pattern, shape) = match &compat.counterexample {
        Some(cx) => {
            let ends = cx.run.inputs.first() == cx.run.inputs.last() && cx.run.inputs.len() >= 2;
            (format!("{} (length {})", cx.trace_string(s), cx.len()), cx.len() <= 4 && ends)
        }
        None => ("none".into(), false),
    };
    (
        chi.iter().all(|&v| v == 6) && context.obeys && !compat.obeys && shape,
        format!("chi per initial state {chi:?}; context' obeys={}; compat' counterexample {pattern}", context.obeys),
    )
}

fn status_text(status: &SearchStatus) -> &'static str {
    match status {
        SearchStatus::Found(_) => "found",
        SearchStatus::Exhausted => "exhausted",
        SearchStatus::Unfinished => "unfinished",
    }
}

fn context_memory(opts: ReproduceOptions) -> Check {
    let two = match search(&problem(2, &[Family::Rc, Family::Repeat], opts)) {
        Ok(out) => out,
        Err(e) => return (false, e.to_string()),
    };
    let three = match search(&SearchProblem { find_all: true, ..problem(3, &[Family::ContextPrime], opts) }) {
        Ok(out) => out,
        Err(e) => return (false, e.to_string()),
    };
    let group = symmetry_group(StructureKind::Pm.structure(), SymmetryFlags::DECLARED);
    let a3c = canonical_form(&a3(), &group, true);
    let contains = a3c.is_some_and(|c| three.found().contains(&c));
    let ok = two.status == SearchStatus::Exhausted && contains;
    (
        ok,
        format!(
            "k=2 rc+repeat {} ({} nodes); k=3 context' {} with {} classes, A3 among them: {contains} ({} nodes); \
             M = log2(3) = {:.2}",
            two.status_name(),
            two.nodes_explored,
            three.status_name(),
            three.found().len(),
            three.nodes_explored,
            3f64.log2()
        ),
    )
}

fn context_compat_memory(opts: ReproduceOptions) -> Check {
    let out = match search(&problem(3, &[Family::ContextPrime, Family::CompatPrime], opts)) {
        Ok(out) => out,
        Err(e) => return (false, e.to_string()),
    };
    let a = a4();
    let (context, compat) = (checker::check_context(&a, true).obeys, checker::check_compat(&a, true).obeys);
    (
        out.status == SearchStatus::Exhausted && context && compat,
        format!(
            "k=3 context'+compat' {} ({} nodes); A4 context'={context} compat'={compat}; M = 2",
            status_text(&out.status),
            out.nodes_explored
        ),
    )
}

fn a4_uniqueness(opts: ReproduceOptions) -> Check {
    let p = SearchProblem { find_all: true, ..problem(4, &[Family::ContextPrime, Family::CompatPrime], opts) };
    let out = match search(&p) {
        Ok(out) => out,
        Err(e) => return (false, e.to_string()),
    };
    let s = StructureKind::Pm.structure();
    let declared = symmetry_group(s, SymmetryFlags::DECLARED);
    let extended = symmetry_group(s, SymmetryFlags::EXTENDED);
    let a4c = canonical_form(&a4(), &declared, true);
    let contains = a4c.is_some_and(|c| out.found().contains(&c));
    let with_transpose = equivalence_classes(out.found(), &extended, true).len();
    (
        out.found().len() == 1 && contains,
        format!(
            "k=4 context'+compat' {}: {} classes under the declared group, A4 among them: {contains}; {} class(es) \
             once transpose is added ({} nodes)",
            out.status_name(),
            out.found().len(),
            with_transpose,
            out.nodes_explored
        ),
    )
}

fn extended_square_chain(opts: ReproduceOptions) -> Check {
    let lemma_start = Instant::now();
    let lemma = three_contradiction_square_lemma();
    let lemma_time = lemma_start.elapsed();
    let p = SearchProblem {
        restriction: Some(Restriction::ThreeContradictions),
        ..problem(4, &[Family::ContextPrime, Family::CompatPrime], opts)
    };
    let out = match search(&p) {
        Ok(out) => out,
        Err(e) => return (false, e.to_string()),
    };
    let lemma_fast = lemma_time <= Duration::from_secs(1);
    (
        lemma.holds && lemma_fast && out.status == SearchStatus::Exhausted,
        format!(
            "lemma over {} assignments and {} embedded squares: {} in {:.3}s (limit 1s); k=4 restricted search {} \
             ({} nodes); hence M > 2 on the extended square",
            lemma.assignments,
            lemma.squares,
            lemma.holds,
            lemma_time.as_secs_f64(),
            status_text(&out.status),
            out.nodes_explored
        ),
    )
}

fn quantum_family_bracket() -> Check {
    let a4_all = checker::check_all(&a4(), false);
    let ten = match build_ten_state() {
        Ok(c) => c,
        Err(e) => return (false, format!("ten-state construction failed: {e}")),
    };
    let a = &ten.automaton;
    let in_set = a.transitions().len() == 90 && a.transitions().iter().all(|&t| t < 10);
    let (all, all_prime) = (checker::check_all(a, false).obeys, checker::check_all(a, true).obeys);
    (
        !a4_all.obeys && in_set && all && all_prime,
        format!(
            "A4 all obeys={}; ten-state machine built with {} transitions in the set ({} on the -1 branch); \
             A10 all={all} all'={all_prime}; 2 < M(all) <= log2(10) = {:.2}",
            a4_all.obeys,
            a.transitions().len(),
            ten.minus_branch_choices,
            10f64.log2()
        ),
    )
}

fn reachable_pure_states() -> Check {
    let s = StructureKind::Pm.structure();
    let label = |l: &str| s.pauli(s.id_of(l).expect("square label"));
    let count = StabilizerState::eigenstate((label("A"), Sign::Plus), (label("B"), Sign::Plus))
        .and_then(|start| reachable_pure_count(&start, s));
    match count {
        Ok(n) => (n == 24, format!("{n} pure states reachable from the A+ B+ eigenstate")),
        Err(e) => (false, e.to_string()),
    }
}

/// A uniformly random square machine with one to four states.
pub fn random_automaton(rng: &mut impl Rng) -> MealyAutomaton {
    let k = rng.gen_range(1..=4);
    let n = StructureKind::Pm.structure().len();
    let values = (0..k * n).map(|_| if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus }).collect();
    let next = (0..k * n).map(|_| rng.gen_range(0..k)).collect();
    MealyAutomaton::new(StructureKind::Pm, values, next, 0).expect("random tables are well formed")
}

/// Whether the bounded enumeration reproduces the checker's verdict: same
/// counterexample length when it is within reach, nothing otherwise.
fn bruteforce_agrees(exact: &Verdict, bounded: &Verdict) -> bool {
    let within = exact.counterexample.as_ref().map(|c| c.len()).filter(|&l| l <= BRUTEFORCE_DEPTH);
    within == bounded.counterexample.as_ref().map(|c| c.len()) && bounded.obeys == within.is_none()
}

/// The 2×2 sub-squares of the square: two rows and two columns.
fn sub_square_flips() -> Vec<Vec<ObsId>> {
    let pairs = [(0, 1), (0, 2), (1, 2)];
    let mut out = Vec::new();
    for (r1, r2) in pairs {
        for (c1, c2) in pairs {
            out.push(vec![3 * r1 + c1, 3 * r1 + c2, 3 * r2 + c1, 3 * r2 + c2]);
        }
    }
    out
}

fn verdict_key(v: &Verdict) -> (bool, Option<usize>) {
    (v.obeys, v.counterexample.as_ref().map(|c| c.len()))
}

fn property_suites() -> Check {
    let pm = StructureKind::Pm.structure();
    let parity_ok = (0..1u32 << pm.len()).all(|t| {
        let table: Vec<Sign> = (0..pm.len()).map(|x| if t >> x & 1 == 1 { Sign::Minus } else { Sign::Plus }).collect();
        contradiction_count(&table, pm).is_ok_and(|c| c % 2 == 1 && c <= 5)
    });

    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 1);
    let fixed = [a3(), a4(), build_ten_state().expect("ten-state construction").automaton];
    let randoms: Vec<MealyAutomaton> = (0..RANDOM_AUTOMATA).map(|_| random_automaton(&mut rng)).collect();
    let mut bruteforce_mismatches = 0;
    let mut comparisons = 0;
    for a in fixed.iter().chain(&randoms) {
        for f in Family::EVERY {
            comparisons += 1;
            let exact = checker::check(a, f);
            if !bruteforce_agrees(&exact, &bounded_bruteforce(a, f, BRUTEFORCE_DEPTH)) {
                bruteforce_mismatches += 1;
            }
        }
    }

    let flips = sub_square_flips();
    let mut flip_mismatches = 0;
    for a in fixed.iter().take(2).chain(randoms.iter().take(100)) {
        for f in Family::EVERY.into_iter().filter(|f| f.base() != Family::All) {
            let key = verdict_key(&checker::check(a, f));
            flip_mismatches +=
                flips.iter().filter(|set| verdict_key(&checker::check(&a.flip_signs(set), f)) != key).count();
        }
    }

    let round_trips = fixed.iter().chain(&randoms).all(|a| parse(&serialize(a)).as_ref() == Ok(a));
    (
        parity_ok && bruteforce_mismatches == 0 && flip_mismatches == 0 && round_trips,
        format!(
            "odd contradiction counts over 512 tables: {parity_ok}; checker vs depth-{BRUTEFORCE_DEPTH} enumeration: \
             {bruteforce_mismatches} mismatches in {comparisons}; sub-square flip mismatches: {flip_mismatches}; \
             round trips: {round_trips}"
        ),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_criteria_pass() {
        for id in [1, 3, 4, 10] {
            let r = run_criterion(id, ReproduceOptions::default()).unwrap();
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn ids_out_of_range() {
        assert!(run_criterion(0, ReproduceOptions::default()).is_none());
        assert!(run_criterion(12, ReproduceOptions::default()).is_none());
    }

    #[test]
    fn census_can_be_skipped() {
        let r = run_criterion(7, ReproduceOptions { skip_census: true, jobs: 1 }).unwrap();
        assert_eq!(r.outcome, Outcome::Skipped);
        assert!(r.to_string().starts_with("SKIP  7 a4-uniqueness"));
    }

    #[test]
    fn random_automata_are_reproducible() {
        let draw = |seed| random_automaton(&mut ChaCha8Rng::seed_from_u64(seed));
        assert_eq!(draw(3), draw(3));
    }
}
