//! Explicit enumeration of bounded-length sequences, judged by the
//! stabilizer oracle. Slow on purpose; it cross-checks the product searches.

use std::collections::VecDeque;

use super::{Counterexample, Family, Verdict, ORDERS};
use crate::automaton::MealyAutomaton;
use crate::observables::{ObsId, Sign};
use crate::oracle::{MeasurementPrediction, StabilizerState};

/// Checks every sequence of `family` with at most `depth` measurements
/// (preparation included for primed families).
///
/// A preparation only matters through the state it leaves behind, so each
/// start state is paired with one shortest preparation instead of all of them.
pub fn bounded_bruteforce(a: &MealyAutomaton, family: Family, depth: usize) -> Verdict {
    let mut best: Option<Counterexample> = None;
    for (start, preparation) in prefixes(a, family.is_prime()) {
        let bound = best.as_ref().map_or(depth + 1, |b| b.len());
        if preparation.len() >= bound {
            continue;
        }
        let budget = bound - 1 - preparation.len();
        let mut search = Enumeration { a, best: None, limit: budget };
        match family.base() {
            Family::Rc => search.rc(start),
            Family::Repeat => search.repeat(start),
            Family::Context => search.context(start),
            Family::Compat => search.compat(start),
            Family::All => search.all(start),
            _ => unreachable!(),
        }
        if let Some((inputs, violation)) = search.best {
            let run = a.run(start, &inputs).expect("valid inputs");
            best = Some(Counterexample { start, preparation, run, violation });
        }
    }
    Verdict { family, obeys: best.is_none(), counterexample: best }
}

fn prefixes(a: &MealyAutomaton, prime: bool) -> Vec<(usize, Vec<ObsId>)> {
    if !prime {
        return vec![(a.initial(), Vec::new())];
    }
    let mut found: Vec<Option<Vec<ObsId>>> = vec![None; a.num_states()];
    found[a.initial()] = Some(Vec::new());
    // Level by level over explicit sequences, keeping the first sequence per state.
    let mut frontier: VecDeque<(usize, Vec<ObsId>)> = VecDeque::from([(a.initial(), Vec::new())]);
    while let Some((q, seq)) = frontier.pop_front() {
        for x in 0..a.num_observables() {
            let t = a.next(q, x);
            if found[t].is_none() {
                let mut longer = seq.clone();
                longer.push(x);
                found[t] = Some(longer.clone());
                frontier.push_back((t, longer));
            }
        }
    }
    found.into_iter().enumerate().filter_map(|(q, p)| p.map(|p| (q, p))).collect()
}

struct Enumeration<'a> {
    a: &'a MealyAutomaton,
    best: Option<(Vec<ObsId>, String)>,
    /// Longest sequence still worth reporting.
    limit: usize,
}

impl Enumeration<'_> {
    fn offer(&mut self, seq: &[ObsId], why: String) {
        if seq.len() <= self.limit {
            self.limit = seq.len() - 1;
            self.best = Some((seq.to_vec(), why));
        }
    }

    fn impossible(&self, start: usize, seq: &[ObsId]) -> bool {
        let s = self.a.structure();
        let run = self.a.run(start, seq).expect("valid inputs");
        let trace: Vec<_> = run.trace().iter().map(|&(x, v)| (s.pauli(x), v)).collect();
        StabilizerState::mixed().collapse_all(&trace).is_err()
    }

    fn rc(&mut self, start: usize) {
        for ctx in self.a.structure().contexts() {
            for order in ORDERS {
                let seq: Vec<ObsId> = order.iter().map(|&i| ctx.members[i]).collect();
                if self.impossible(start, &seq) {
                    self.offer(&seq, "impossible row or column outcome".into());
                }
            }
        }
    }

    fn repeat(&mut self, start: usize) {
        for x in 0..self.a.num_observables() {
            if self.impossible(start, &[x, x]) {
                self.offer(&[x, x], "repetition changed its outcome".into());
            }
        }
    }

    fn context(&mut self, start: usize) {
        for ctx in self.a.structure().contexts() {
            let mut seq = Vec::new();
            self.dfs(start, StabilizerState::mixed(), &ctx.members, &mut seq);
        }
    }

    fn all(&mut self, start: usize) {
        let every: Vec<ObsId> = (0..self.a.num_observables()).collect();
        let mut seq = Vec::new();
        self.dfs(start, StabilizerState::mixed(), &every, &mut seq);
    }

    /// All sequences over `alphabet`, pruned below the first impossible outcome.
    fn dfs(&mut self, q: usize, state: StabilizerState, alphabet: &[ObsId], seq: &mut Vec<ObsId>) {
        if seq.len() >= self.limit {
            return;
        }
        let s = self.a.structure();
        for &x in alphabet {
            seq.push(x);
            match state.collapse(s.pauli(x), self.a.value(q, x)) {
                Ok(next) => self.dfs(self.a.next(q, x), next, alphabet, seq),
                Err(e) => self.offer(seq, e.to_string()),
            }
            seq.pop();
            if seq.len() >= self.limit {
                return;
            }
        }
    }

    fn compat(&mut self, start: usize) {
        let s = self.a.structure();
        for y in 0..self.a.num_observables() {
            if self.limit < 2 {
                return;
            }
            let fillers: Vec<ObsId> = (0..self.a.num_observables()).filter(|&x| s.compatible(x, y)).collect();
            let v = self.a.value(start, y);
            let after = StabilizerState::mixed().collapse(s.pauli(y), v).expect("first outcome is random");
            let mut seq = vec![y];
            self.sandwich(y, self.a.next(start, y), vec![after], &fillers, &mut seq);
        }
    }

    /// `branches` holds every quantum state compatible with the outcomes
    /// seen so far; filler outcomes are ignored, so each filler splits the
    /// branches over its possible outcomes.
    fn sandwich(
        &mut self,
        y: ObsId,
        q: usize,
        branches: Vec<StabilizerState>,
        fillers: &[ObsId],
        seq: &mut Vec<ObsId>,
    ) {
        let s = self.a.structure();
        let closing = self.a.value(q, y);
        let possible =
            branches.iter().any(|b| b.predict(s.pauli(y)).unwrap() != MeasurementPrediction::Deterministic(-closing));
        if !possible {
            seq.push(y);
            self.offer(seq, format!("{} closed with an impossible outcome", s.label(y)));
            seq.pop();
            return;
        }
        if seq.len() + 2 > self.limit {
            return;
        }
        for &x in fillers {
            let mut next: Vec<StabilizerState> = branches
                .iter()
                .flat_map(|b| Sign::BOTH.into_iter().filter_map(move |w| b.collapse(s.pauli(x), w).ok()))
                .collect();
            next.sort_unstable();
            next.dedup();
            seq.push(x);
            self.sandwich(y, self.a.next(q, x), next, fillers, seq);
            seq.pop();
            if seq.len() + 2 > self.limit {
                return;
            }
        }
    }
}
