use anyhow::{bail, Context as _, Result};
use cmlab_core::automaton::{build_ten_state, builtin, parse, serialize};
use cmlab_core::checker::{self, CheckOptions};
use cmlab_core::inequality::{chi_all_orders, chi_automaton, noncontextual_max, three_contradiction_square_lemma};
use cmlab_core::observables::embedded_pm_squares;
use cmlab_core::oracle::{parse_trace, to_pauli_trace, trace_possible};
use cmlab_core::reproduce::{reproduce, Outcome, ReproduceOptions};
use cmlab_core::search::{search, SearchStatus};
use cmlab_core::{Family, MealyAutomaton, MeasurementPrediction, SearchProblem, StabilizerState, StructureKind};

use crate::args::{automaton_source, Cli, Command, OracleCommand, OutputMode, Source};
use crate::Status;

pub fn run(cli: &Cli) -> Result<Status> {
    let human = cli.output == OutputMode::Human;
    match &cli.command {
        Command::Verify { automaton, family, all_initial_states } => {
            verify(&load(automaton)?, *family, *all_initial_states, human)
        }
        Command::Search { structure, states, families, restrict, find_all, jobs, budget_nodes, no_rules } => {
            let problem = SearchProblem {
                restriction: *restrict,
                find_all: *find_all,
                jobs: *jobs,
                node_budget: *budget_nodes,
                use_rules: !no_rules,
                ..SearchProblem::new(*structure, *states, families)
            };
            run_search(&problem, human)
        }
        Command::Chi { automaton, initial, all_orders } => chi(&load(automaton)?, *initial, *all_orders, human),
        Command::Bound { structure } => {
            let m = noncontextual_max(structure.structure());
            if human {
                println!("{structure}: noncontextual maximum {}, quantum value {}", m.max, m.quantum);
            } else {
                println!("max={} quantum={}", m.max, m.quantum);
            }
            Ok(Status::Positive)
        }
        Command::Squares { lemma } => squares(*lemma, human),
        Command::Build10 => build10(human),
        Command::Oracle { command: OracleCommand::Trace { structure, trace } } => {
            oracle_trace(*structure, trace, human)
        }
        Command::Reproduce { skip, jobs } => {
            let opts = ReproduceOptions { skip_census: skip.iter().any(|s| s == "census"), jobs: *jobs };
            let reports = reproduce(opts, |r| println!("{r}"));
            let count = |o| reports.iter().filter(|r| r.outcome == o).count();
            let failed = count(Outcome::Fail);
            println!("passed={} failed={failed} skipped={}", count(Outcome::Pass), count(Outcome::Skipped));
            Ok(Status::from_bool(failed == 0))
        }
    }
}

fn load(arg: &str) -> Result<MealyAutomaton> {
    match automaton_source(arg) {
        Source::Builtin(name) => Ok(builtin(&name)?),
        Source::File(path) => {
            let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            parse(&text).with_context(|| format!("parsing {}", path.display()))
        }
    }
}

fn verify(a: &MealyAutomaton, family: Family, all_initial_states: bool, human: bool) -> Result<Status> {
    let v = checker::check_with(a, family, CheckOptions { all_initial_states });
    let s = a.structure();
    match (&v.counterexample, human) {
        (None, false) => println!("verdict=obeys family={family} states={}", a.num_states()),
        (None, true) => println!("the {}-state machine obeys {family}", a.num_states()),
        (Some(cx), false) => println!(
            "verdict=violates family={family} states={} start={} preparation={} length={} trace={}",
            a.num_states(),
            cx.start + 1,
            if cx.preparation.is_empty() { "-".to_string() } else { cx.preparation_string(s) },
            cx.len(),
            cx.trace_string(s)
        ),
        (Some(cx), true) => {
            println!("the {}-state machine violates {family}", a.num_states());
            if !cx.preparation.is_empty() {
                println!("preparation: {} (outcomes ignored)", cx.preparation_string(s));
            }
            println!("run from state {}: {}", cx.start + 1, cx.run.annotated(s));
            println!("{}", cx.violation);
        }
    }
    Ok(Status::from_bool(v.obeys))
}

fn run_search(problem: &SearchProblem, human: bool) -> Result<Status> {
    let out = search(problem)?;
    let found = out.found();
    for (i, a) in found.iter().enumerate() {
        println!("# class {}", i + 1);
        print!("{}", serialize(a));
        println!();
    }
    let families: Vec<&str> = problem.families.iter().map(|f| f.name()).collect();
    if human {
        match &out.status {
            SearchStatus::Found(_) => println!(
                "found {} class(es) of {}-state machines obeying {} after {} nodes; memory cost log2({}) = {:.2} bits",
                found.len(),
                out.states,
                families.join(" and "),
                out.nodes_explored,
                out.states,
                out.memory_cost().unwrap_or_default()
            ),
            SearchStatus::Exhausted => println!(
                "no {}-state machine obeys {} ({} nodes)",
                out.states,
                families.join(" and "),
                out.nodes_explored
            ),
            SearchStatus::Unfinished => {
                println!("budget exhausted after {} nodes without a verdict", out.nodes_explored)
            }
        }
    } else {
        println!("status={} k={} count={} nodes={}", out.status_name(), out.states, found.len(), out.nodes_explored);
    }
    Ok(match out.status {
        SearchStatus::Found(_) => Status::Positive,
        SearchStatus::Exhausted => Status::Negative,
        SearchStatus::Unfinished => Status::Unfinished,
    })
}

fn chi(a: &MealyAutomaton, initial: Option<usize>, all_orders: bool, human: bool) -> Result<Status> {
    let q = match initial {
        Some(0) => bail!("states are numbered from 1"),
        Some(q) => q - 1,
        None => a.initial(),
    };
    let r = chi_automaton(a, q)?;
    let spread = if all_orders { Some(chi_all_orders(a, q)?) } else { None };
    if human {
        println!(
            "chi = {} from state {} (noncontextual bound {}, quantum value {})",
            r.value,
            q + 1,
            r.bound_noncontextual,
            r.bound_quantum
        );
        if let Some(s) = spread {
            println!("over every measurement order chi ranges from {} to {}", s.min, s.max);
        }
    } else {
        let mut line =
            format!("initial={} chi={} bound={} quantum={}", q + 1, r.value, r.bound_noncontextual, r.bound_quantum);
        if let Some(s) = spread {
            line += &format!(" min={} max={}", s.min, s.max);
        }
        println!("{line}");
    }
    Ok(Status::Positive)
}

fn squares(lemma: bool, human: bool) -> Result<Status> {
    let s = StructureKind::Extended15.structure();
    if !lemma {
        for (i, sq) in embedded_pm_squares(s).iter().enumerate() {
            let rows: Vec<String> =
                sq.grid.iter().map(|row| row.iter().map(|&x| s.label(x)).collect::<Vec<_>>().join(",")).collect();
            if human {
                println!("square {}: {}", i + 1, rows.join(" / "));
            } else {
                println!("square={} rows={} parity={}", i + 1, rows.join(";"), sq.parity_product(s));
            }
        }
        return Ok(Status::Positive);
    }
    let r = three_contradiction_square_lemma();
    if human {
        println!(
            "{} over {} assignments and {} embedded squares: every assignment leaves some square with three or \
             more violated contexts",
            if r.holds { "holds" } else { "fails" },
            r.assignments,
            r.squares
        );
        for (c, n) in r.worst.iter().enumerate().filter(|(_, &n)| n > 0) {
            println!("  {n} assignments have at most {c} violations in any square");
        }
    } else {
        let worst: Vec<String> = r.worst.iter().map(u64::to_string).collect();
        println!(
            "lemma={} assignments={} squares={} counts_odd={} worst={}",
            r.holds,
            r.assignments,
            r.squares,
            r.counts_odd,
            worst.join(",")
        );
    }
    Ok(Status::from_bool(r.holds))
}

fn build10(human: bool) -> Result<Status> {
    let c = build_ten_state()?;
    let a = &c.automaton;
    print!("{}", serialize(a));
    let (all, all_prime) = (checker::check_all(a, false).obeys, checker::check_all(a, true).obeys);
    if human {
        println!(
            "built {} states and {} transitions; {} random outcomes kept only the -1 branch; all={all} all'={all_prime}",
            a.num_states(),
            a.transitions().len(),
            c.minus_branch_choices
        );
    } else {
        println!(
            "states={} transitions={} minus_branch={} both_branches={} all={all} all'={all_prime}",
            a.num_states(),
            a.transitions().len(),
            c.minus_branch_choices,
            c.both_branches_in_set
        );
    }
    Ok(Status::from_bool(all && all_prime))
}

fn oracle_trace(structure: StructureKind, text: &str, human: bool) -> Result<Status> {
    let s = structure.structure();
    let trace = to_pauli_trace(s, &parse_trace(s, text)?);
    let possible = trace_possible(&StabilizerState::mixed(), &trace);
    let weight = match possible {
        false => "0".to_string(),
        true => {
            // Every random outcome along the way halves the probability.
            let mut state = StabilizerState::mixed();
            let mut halvings = 0u32;
            for &(p, v) in &trace {
                halvings += u32::from(state.predict(p)? == MeasurementPrediction::Random);
                state = state.collapse(p, v)?;
            }
            format!("2^-{halvings}")
        }
    };
    if human {
        println!("{}: probability {weight}", if possible { "possible" } else { "impossible" });
    } else {
        println!("possible={possible} probability={weight}");
    }
    Ok(Status::from_bool(possible))
}
