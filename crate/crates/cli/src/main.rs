use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use urnsig_cli::{audit, parse_config, run_experiment, ConfigError, RunOptions, DEFAULT_THRESHOLD};
use urnsig_core::{Agents, Symbol};

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_FLAGGED: u8 = 3;

/// Run urn-learning signaling experiments, or audit a saved policy for
/// compositional behavior after a message is replaced.
#[derive(Debug, Parser)]
#[command(name = "urnsig", version)]
struct Args {
    /// Experiment file (JSON).
    #[arg(long, required_unless_present = "audit")]
    config: Option<PathBuf>,
    /// Run only the named experiment.
    #[arg(long)]
    experiment: Option<String>,
    /// Override the number of runs.
    #[arg(long)]
    runs: Option<usize>,
    /// Override the base seed; run i uses seed + i.
    #[arg(long)]
    seed: Option<u64>,
    /// Root output directory; each experiment writes <out>/<name>/.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, overrides_with = "no_plot")]
    plot: bool,
    #[arg(long)]
    no_plot: bool,
    /// Also write each run's final policies as JSON.
    #[arg(long)]
    dump_policy: bool,

    /// Policy JSON to audit (as written by --dump-policy).
    #[arg(long, value_name = "POLICY", requires = "replace", conflicts_with = "config")]
    audit: Option<PathBuf>,
    /// Message to replace in the audited policy.
    #[arg(long, value_name = "SYMBOL")]
    replace: Option<String>,
    /// Replacement symbol; defaults to the old one without trailing digits plus `?`.
    #[arg(long, value_name = "SYMBOL")]
    new_symbol: Option<String>,
    /// Flag when expected minus actual information exceeds this many bits.
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: f64,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match &args.audit {
        Some(policy) => run_audit(&args, policy),
        None => run_configs(&args),
    }
}

fn run_configs(args: &Args) -> ExitCode {
    let path = args.config.as_ref().expect("clap requires --config");
    let mut experiments = match parse_config(path) {
        Ok(e) => e,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if let Some(name) = &args.experiment {
        experiments.retain(|e| &e.name == name);
        if experiments.is_empty() {
            eprintln!("error: {}", ConfigError::UnknownExperiment(name.clone()));
            return ExitCode::from(EXIT_CONFIG);
        }
    }
    if args.runs == Some(0) {
        eprintln!("error: --runs must be at least 1");
        return ExitCode::from(EXIT_CONFIG);
    }

    let options = RunOptions {
        runs: args.runs,
        seed: args.seed,
        out: args.out.clone(),
        plot: if args.no_plot {
            Some(false)
        } else if args.plot {
            Some(true)
        } else {
            None
        },
        dump_policy: args.dump_policy,
    };
    let mut failed = false;
    for experiment in &experiments {
        match run_experiment(experiment, &options) {
            Ok(outcome) => {
                let converged = outcome
                    .manifest
                    .signaling_turns
                    .iter()
                    .filter(|t| t.is_some())
                    .count();
                println!(
                    "{}: {} runs, {converged} reached signaling, output in {}",
                    experiment.name,
                    outcome.manifest.num_runs,
                    outcome.dir.display()
                );
            }
            Err(e) => {
                eprintln!("error: experiment `{}`: {e:#}", experiment.name);
                failed = true;
            }
        }
    }
    if failed {
        ExitCode::from(EXIT_FAILURE)
    } else {
        ExitCode::SUCCESS
    }
}

fn run_audit(args: &Args, policy: &PathBuf) -> ExitCode {
    let text = match fs::read_to_string(policy) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", policy.display());
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let agents = match Agents::from_json(&text) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {}: {e}", policy.display());
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let symbols = (|| -> urnsig_core::Result<(Symbol, Option<Symbol>)> {
        let old = Symbol::new(args.replace.as_deref().expect("clap requires --replace"))?;
        let new = args.new_symbol.as_deref().map(Symbol::new).transpose()?;
        Ok((old, new))
    })();
    let (old, new) = match symbols {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    match audit(&agents, &old, new.as_ref(), args.threshold) {
        Ok(report) => {
            println!("{report}");
            if report.flagged {
                ExitCode::from(EXIT_FLAGGED)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
