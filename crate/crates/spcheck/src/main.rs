//! `spcheck`: axiom checker, fuzzer and worked examples for
//! similarity-projection models.

mod demo;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sp_structure::checker::{any_fail, fuzz, render_text, report_json, run_suite, CheckConfig, FuzzConfig};
use sp_structure::models::{load_model, parse_builtin};
use sp_structure::observables::load_observable;
use sp_structure::{SpModel, Tolerances};

#[derive(Parser)]
#[command(
    name = "spcheck",
    version,
    about = "Check similarity-projection models against their axioms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the axiom suite once.
    Check(CheckArgs),
    /// Run the suite repeatedly with an increasing share of adversarial samples.
    Fuzz {
        #[command(flatten)]
        check: CheckArgs,
        /// Number of rounds; the adversarial share doubles each round.
        #[arg(long, default_value_t = 4)]
        rounds: u32,
    },
    /// Print a worked example.
    Demo {
        #[arg(value_enum)]
        which: DemoKind,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DemoKind {
    SpinHalf,
    #[value(name = "appendix-c")]
    NearStates,
    Pauli,
}

#[derive(Args)]
struct CheckArgs {
    /// Model file (JSON) or `builtin:<spec>`, e.g. `builtin:hilbert:4`,
    /// `builtin:classical:5`, `builtin:sectored:2,3`,
    /// `builtin:perturbed-hilbert:3:1e-6`.
    #[arg(long)]
    model: String,
    /// Samples per axiom for sampled checks.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, env = "SPCHECK_SEED", default_value_t = 0)]
    seed: u64,
    /// Probability slack used for both equality and orthogonality tests.
    #[arg(long)]
    tol: Option<f64>,
    /// Observable file (JSON) for the ObservableLaws check.
    #[arg(long)]
    observable: Option<PathBuf>,
    /// Emit the JSON report (the default).
    #[arg(long, conflicts_with = "text")]
    json: bool,
    /// Emit a plain-text summary.
    #[arg(long)]
    text: bool,
}

fn read(path: &std::path::Path) -> Result<Vec<u8>, String> {
    std::fs::read(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn load(spec: &str) -> Result<SpModel, String> {
    match spec.strip_prefix("builtin:") {
        Some(b) => parse_builtin(b).map_err(|e| e.to_string()),
        None => load_model(&read(std::path::Path::new(spec))?).map_err(|e| format!("{spec}: {e}")),
    }
}

fn config(args: &CheckArgs, m: &SpModel) -> Result<CheckConfig, String> {
    let mut tolerances = Tolerances::default();
    if let Some(t) = args.tol {
        tolerances = tolerances.with_probability_slack(t).map_err(|e| e.to_string())?;
    }
    let observable = match &args.observable {
        Some(path) => {
            let m = m.clone().with_tolerances(tolerances).map_err(|e| e.to_string())?;
            Some(load_observable(&m, &read(path)?).map_err(|e| format!("{}: {e}", path.display()))?)
        }
        None => None,
    };
    Ok(CheckConfig {
        samples: args.samples,
        seed: args.seed,
        tolerances,
        observable,
    })
}

fn run(args: &CheckArgs, rounds: Option<u32>) -> Result<bool, String> {
    let m = load(&args.model)?;
    let cfg = config(args, &m)?;
    let reports = match rounds {
        None => run_suite(&m, &cfg),
        Some(rounds) => fuzz(&m, &cfg, FuzzConfig { rounds }),
    }
    .map_err(|e| e.to_string())?;
    let mut json = report_json(&m, &cfg, &reports);
    if let Some(rounds) = rounds {
        json["config"]["rounds"] = rounds.into();
    }
    if args.text {
        print!("{}", render_text(&json));
    } else {
        println!("{}", serde_json::to_string_pretty(&json).expect("serializable report"));
    }
    Ok(any_fail(&reports))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Check(args) => run(args, None),
        Command::Fuzz { check, rounds } => run(check, Some(*rounds)),
        Command::Demo { which } => {
            let out = match which {
                DemoKind::SpinHalf => demo::spin_half(),
                DemoKind::NearStates => demo::near_states(),
                DemoKind::Pauli => demo::pauli(),
            };
            out.map(|text| {
                print!("{text}");
                false
            })
            .map_err(|e| e.to_string())
        }
    };
    match result {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("spcheck: {msg}");
            ExitCode::from(2)
        }
    }
}
