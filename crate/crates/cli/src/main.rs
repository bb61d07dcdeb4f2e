//! `nwfs`: factorise arrows, solve lifting problems, run law suites and
//! report stage sizes for cofibrantly generated factorisation systems.

mod commands;
mod instance;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nwfs_core::fincat::HomCap;

use instance::{Failure, Instance, Outcome, StageChoice};

#[derive(Parser)]
#[command(name = "nwfs", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Instance JSON file.
    instance: PathBuf,
    /// Generating set: a preset (split-epi, cosection, both, graph-edge,
    /// free-module:<q>, empty) or a JSON file; overrides the instance.
    #[arg(long)]
    generators: Option<String>,
    /// Hom-set enumeration cap; defaults to NWFS_CAP, then 1000000.
    #[arg(long)]
    cap: Option<u128>,
    /// Write the output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StageArgs {
    /// Use stage N of the free sequence.
    #[arg(long, conflicts_with = "converge")]
    stage: Option<usize>,
    /// Iterate until the connecting map is invertible.
    #[arg(long)]
    converge: bool,
    /// Largest stage tried when converging.
    #[arg(long, default_value_t = 4)]
    max_stage: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Factorise the instance arrow.
    Factorize {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        stage: StageArgs,
    },
    /// Solve a lifting problem with the canonical filler.
    Lift {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        lmap: PathBuf,
        #[arg(long)]
        rmap: PathBuf,
        #[arg(long)]
        problem: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_stage: usize,
    },
    /// Check every law on a corpus; exits 1 if any fails.
    Laws {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        stage: StageArgs,
        /// finset, fingraph or finmod; inferred from the instance by default.
        #[arg(long)]
        backend: Option<String>,
        #[arg(long, default_value_t = 2)]
        corpus_max_size: usize,
    },
    /// CSV of naive against coequalized stage sizes.
    SizeReport {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 4)]
        max_stage: usize,
    },
}

impl Common {
    fn cap(&self) -> HomCap {
        self.cap.map(HomCap).unwrap_or_else(HomCap::from_env)
    }

    fn load(&self) -> Outcome<Instance> {
        Instance::load(&self.instance, self.generators.as_deref())
    }

    fn emit(&self, text: &str) -> Outcome<()> {
        match &self.out {
            Some(path) => std::fs::write(path, text),
            None => std::io::stdout().write_all(text.as_bytes()),
        }
        .map_err(|e| Failure::Parse(format!("cannot write output: {e}")))
    }
}

impl StageArgs {
    fn choice(&self) -> StageChoice {
        match (self.stage, self.converge) {
            (Some(n), _) => StageChoice::Stage(n),
            (None, _) => StageChoice::Converge { max_stage: self.max_stage },
        }
    }
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialise") + "\n"
}

fn run(cli: Cli) -> Outcome<()> {
    match cli.command {
        Command::Factorize { common, stage } => {
            let out = commands::factorize(&common.load()?, stage.choice(), common.cap())?;
            common.emit(&pretty(&out))
        }
        Command::Lift { common, lmap, rmap, problem, max_stage } => {
            let out = commands::lift(&common.load()?, &lmap, &rmap, &problem, max_stage, common.cap())?;
            common.emit(&pretty(&out))
        }
        Command::Laws { common, stage, backend, corpus_max_size } => {
            let out =
                commands::laws(&common.load()?, stage.choice(), backend.as_deref(), corpus_max_size, common.cap())?;
            common.emit(&pretty(&out))?;
            let failed: Vec<&str> = out["failed"].as_array().into_iter().flatten().filter_map(|v| v.as_str()).collect();
            if failed.is_empty() {
                Ok(())
            } else {
                Err(Failure::Laws(failed.join(", ")))
            }
        }
        Command::SizeReport { common, max_stage } => {
            let csv = commands::size_report(&common.load()?, max_stage, common.cap())?;
            common.emit(&csv)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nwfs: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
