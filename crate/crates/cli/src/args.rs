use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use cmlab_core::search::Restriction;
use cmlab_core::{Family, StructureKind};

#[derive(Parser, Debug)]
#[command(name = "cmlab", version, about = "Memory cost of simulating Peres-Mermin contextuality")]
pub struct Cli {
    /// `records` prints one `key=value` line per result; `human` prints prose.
    #[arg(long, value_enum, default_value_t = OutputMode::Records, global = true)]
    pub output: OutputMode,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputMode {
    Records,
    Human,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide whether a machine obeys a family of quantum predictions.
    Verify {
        /// Automaton file in the v1 text format, or `builtin:A3|A4|A10`.
        automaton: String,
        #[arg(long, value_parser = parse_family)]
        family: Family,
        /// Require obedience from every state taken as the initial one.
        #[arg(long)]
        all_initial_states: bool,
    },
    /// Look for machines with a given number of states.
    Search {
        #[arg(long, default_value = "pm", value_parser = parse_structure)]
        structure: StructureKind,
        #[arg(long)]
        states: usize,
        /// Comma-separated families, e.g. `context',compat'`.
        #[arg(long, value_delimiter = ',', required = true, value_parser = parse_family)]
        families: Vec<Family>,
        #[arg(long, value_parser = parse_restriction)]
        restrict: Option<Restriction>,
        /// Report every equivalence class instead of the first machine.
        #[arg(long)]
        find_all: bool,
        /// Worker threads; 0 uses every core.
        #[arg(long, env = "CMLAB_JOBS", default_value_t = 0)]
        jobs: usize,
        /// Stop as unfinished after this many search nodes.
        #[arg(long)]
        budget_nodes: Option<u64>,
        /// Search without the table propagation rules.
        #[arg(long)]
        no_rules: bool,
    },
    /// Evaluate the square inequality on a machine.
    Chi {
        automaton: String,
        /// Initial state (1-based); defaults to the machine's own.
        #[arg(long)]
        initial: Option<usize>,
        /// Also report the spread over every measurement order.
        #[arg(long)]
        all_orders: bool,
    },
    /// Best noncontextual value of the inequality and the quantum value.
    Bound {
        #[arg(long, value_parser = parse_structure)]
        structure: StructureKind,
    },
    /// Squares embedded in the extended structure.
    Squares {
        /// Check that every assignment leaves some square with three or more violations.
        #[arg(long)]
        lemma: bool,
    },
    /// Build the ten-state machine and print it.
    Build10,
    /// Quantum predictions for measurement traces.
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
    /// Run the numbered reproduction criteria.
    Reproduce {
        /// `census` leaves out the full four-state census.
        #[arg(long, value_parser = ["census"])]
        skip: Vec<String>,
        #[arg(long, env = "CMLAB_JOBS", default_value_t = 0)]
        jobs: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum OracleCommand {
    /// Whether a trace such as `A+,B+,C-` can occur from the maximally mixed state.
    Trace {
        #[arg(value_parser = parse_structure)]
        structure: StructureKind,
        trace: String,
    },
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|_| {
        let names: Vec<&str> = Family::EVERY.iter().map(|f| f.name()).collect();
        format!("expected one of {}", names.join(", "))
    })
}

fn parse_structure(s: &str) -> Result<StructureKind, String> {
    s.parse().map_err(|e: cmlab_core::Error| e.to_string())
}

fn parse_restriction(s: &str) -> Result<Restriction, String> {
    s.parse().map_err(|_| "expected three-contradictions".to_string())
}

/// Where an automaton comes from: a built-in name or a file.
pub fn automaton_source(arg: &str) -> Source {
    match arg.strip_prefix("builtin:") {
        Some(name) => Source::Builtin(name.to_string()),
        None => Source::File(PathBuf::from(arg)),
    }
}

pub enum Source {
    Builtin(String),
    File(PathBuf),
}
