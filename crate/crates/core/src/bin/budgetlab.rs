use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use budgetlab::experiment::{compare, run, run_preset, verify, ExperimentConfig, Overrides, RunParts, Suite};
use budgetlab::Error;

#[derive(Parser)]
#[command(name = "budgetlab", version, about = "Approximation-error experiments for randomised search heuristics")]
struct Cli {
    /// Suppress progress messages on stderr.
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Output directory; overrides `outputs` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long)]
    steps: Option<usize>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            replicates: self.replicates,
            steps: self.steps,
            outputs: self.out.clone(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo trajectory plus bounds, and the exact oracle when the config asks for it.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Bound curves only.
    Bounds {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Exact expected error and ratio report from the Markov chain.
    Oracle {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Two configs on the same function, joined step by step.
    Compare {
        /// Pass twice: first config A, then config B.
        #[arg(long, num_args = 1, required = true)]
        config: Vec<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Numerical verification battery; exit status 1 on any violation.
    Verify {
        /// theorems, supplement, sandwich or suffix.
        suite: String,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerate the data behind a figure (fig1 to fig7).
    Preset {
        name: String,
        #[command(flatten)]
        common: Common,
    },
}

fn load(path: &Path, o: &Overrides) -> budgetlab::Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(path)?;
    cfg.apply(o);
    cfg.validate()?;
    Ok(cfg)
}

fn configure_threads() -> budgetlab::Result<()> {
    let Ok(raw) = std::env::var("BUDGETLAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("BUDGETLAB_THREADS must be a non-negative integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::Config(e.to_string()))
}

enum Outcome {
    Done,
    VerificationFailed,
}

fn execute(cli: &Cli) -> budgetlab::Result<Outcome> {
    let say = |msg: String| {
        if !cli.quiet {
            eprintln!("{msg}");
        }
    };
    match &cli.command {
        Command::Simulate { config, common } | Command::Bounds { config, common } | Command::Oracle { config, common } => {
            let cfg = load(config, &common.overrides())?;
            let (parts, name) = match &cli.command {
                Command::Simulate { .. } => (RunParts::all(&cfg), "simulate"),
                Command::Bounds { .. } => (
                    RunParts {
                        trajectory: false,
                        bounds: true,
                        oracle: false,
                    },
                    "bounds",
                ),
                _ => (
                    RunParts {
                        trajectory: false,
                        bounds: false,
                        oracle: true,
                    },
                    "oracle",
                ),
            };
            let outcome = run(&cfg, parts, name)?;
            say(format!("wrote {} to {}", outcome.files.join(", "), cfg.outputs.display()));
            if let Some(r) = &outcome.delta_report {
                say(format!(
                    "delta_min={:e} delta_max={:e} violations={}",
                    r.delta_min,
                    r.delta_max,
                    r.violations.len()
                ));
            }
        }
        Command::Compare { config, common } => {
            let [a, b] = config.as_slice() else {
                return Err(Error::Config(format!("compare takes exactly two --config files, got {}", config.len())));
            };
            let o = common.overrides();
            let (a, b) = (load(a, &o)?, load(b, &o)?);
            let dir = common.out.clone().unwrap_or_else(|| a.outputs.clone());
            let summary = compare(&a, &b, &dir)?;
            say(format!(
                "A-B signs: {} positive, {} negative, {} zero; bound_A >= bound_B: {:?}",
                summary.positive, summary.negative, summary.zero, summary.bound_a_ge_bound_b
            ));
        }
        Command::Verify { suite, out } => {
            let report = verify(Suite::parse(suite)?)?;
            let text = serde_json::to_string_pretty(&report)?;
            match out {
                Some(dir) => {
                    std::fs::create_dir_all(dir)?;
                    std::fs::write(dir.join(format!("verify_{suite}.json")), text + "\n")?;
                }
                None => println!("{text}"),
            }
            for f in report.failures() {
                eprintln!("violation: {}", f.instance);
            }
            say(format!(
                "{suite}: {} instances, {} failed",
                report.instances.len(),
                report.failures().count()
            ));
            if !report.passed {
                return Ok(Outcome::VerificationFailed);
            }
        }
        Command::Preset { name, common } => {
            let dir = common.out.clone().unwrap_or_else(|| PathBuf::from("out").join(name));
            let files = run_preset(name, &common.overrides(), &dir)?;
            say(format!("wrote {} to {}", files.join(", "), dir.display()));
        }
    }
    Ok(Outcome::Done)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| execute(&cli));
    match result {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::VerificationFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config_error() {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}
