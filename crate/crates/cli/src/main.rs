//! `rigid`: JSON front end for rigidity analysis, certification, partial
//! reflections and the verification campaigns.

mod commands;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use rigidity_core::seed::DEFAULT_SEED;

use crate::report::{Context, RunReport, Timing};

#[derive(Parser)]
#[command(name = "rigid", version, about = "Generic rigidity, d-joined certificates and partial reflections")]
struct Cli {
    /// Every randomized step derives its seed from this one.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Connectivity profile, rank, matroid components, c_d, certification and closure.
    Analyze {
        #[arg(long)]
        d: usize,
        graph: PathBuf,
    },
    /// Generic rank of the graph or of an edge subset, with rigidity flags.
    Rank {
        #[arg(long)]
        d: usize,
        graph: PathBuf,
        /// JSON list of `[u, v]` pairs.
        #[arg(long)]
        edges: Option<PathBuf>,
    },
    /// Tries to certify that the graph is d-joined.
    Certify {
        #[arg(long)]
        d: usize,
        graph: PathBuf,
    },
    /// Global linkedness of a pair in a certified graph.
    Linked {
        #[arg(long)]
        d: usize,
        graph: PathBuf,
        certificate: PathBuf,
        u: u32,
        v: u32,
    },
    /// Globally linked closure of a certified graph.
    Closure {
        #[arg(long)]
        d: usize,
        graph: PathBuf,
        certificate: PathBuf,
    },
    /// Samples a generic framework.
    Realize {
        #[arg(long)]
        d: usize,
        graph: PathBuf,
    },
    /// Applies a sequence of partial reflections, given as a JSON list of member sets.
    Reflect {
        #[arg(long)]
        graph: PathBuf,
        framework: PathBuf,
        fragments: PathBuf,
    },
    /// All 2^{c_d} realizations reachable by reduced sequences.
    Enumerate { graph: PathBuf, framework: PathBuf },
    /// Compatibility of two reduced sequences on glued graphs.
    Compat {
        g1: PathBuf,
        g2: PathBuf,
        f1: PathBuf,
        f2: PathBuf,
        /// Needed only when both sequences are empty.
        #[arg(long)]
        d: Option<usize>,
    },
    /// Numerical search for equivalent frameworks, clustered by congruence.
    Oracle {
        #[arg(long)]
        graph: PathBuf,
        framework: PathBuf,
        /// Defaults to 100 * 2^{c_d}.
        #[arg(long)]
        restarts: Option<usize>,
        /// Also match the classes against the enumerated realizations.
        #[arg(long = "match")]
        match_enumerated: bool,
    },
    /// Runs a property campaign (or `all`).
    VerifyPaper {
        #[arg(long)]
        suite: String,
        /// Defaults to the suite's acceptance size.
        #[arg(long)]
        trials: Option<usize>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Analyze { .. } => "analyze",
            Command::Rank { .. } => "rank",
            Command::Certify { .. } => "certify",
            Command::Linked { .. } => "linked",
            Command::Closure { .. } => "closure",
            Command::Realize { .. } => "realize",
            Command::Reflect { .. } => "reflect",
            Command::Enumerate { .. } => "enumerate",
            Command::Compat { .. } => "compat",
            Command::Oracle { .. } => "oracle",
            Command::VerifyPaper { .. } => "verify-paper",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let mut ctx = Context::new(cli.seed);
    match commands::run(&cli.command, &mut ctx) {
        Ok(outcome) => {
            let report = RunReport {
                command: cli.command.name().into(),
                inputs: ctx.inputs,
                seed: cli.seed,
                result: outcome.result,
                randomized: ctx.randomized,
                timing: Timing { elapsed_ms: start.elapsed().as_secs_f64() * 1e3 },
            };
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            // A closed pipe downstream is not an error of ours.
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            match outcome.violation {
                Some(msg) => {
                    eprintln!("property violation: {msg}");
                    ExitCode::from(1)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
