use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod fixtures;
mod output;

use commands::{ClassifyArgs, DensityArgs, ModulusArgs};
use config::{Eps, FileConfig, Format};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, grids, expressions or sequence ids (exit 2).
    Usage(String),
    /// A check or verdict did not come out as required (exit 1).
    Failed(String),
    Io(String),
}

impl CliError {
    fn from_lib_usage(e: fdensity::Error) -> Self {
        match e {
            fdensity::Error::Construction { .. } => CliError::Failed(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failed(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<fdensity::Error> for CliError {
    fn from(e: fdensity::Error) -> Self {
        CliError::from_lib_usage(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Failed(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

/// Densities by moduli and Wijsman convergence diagnostics.
#[derive(Parser)]
#[command(name = "fdensity", version)]
struct Cli {
    /// Worker threads for grid evaluation (default: all cores).
    #[arg(long, global = true, env = "FDENSITY_WORKERS")]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML file with the same keys as the flags; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// Natural or f-density ratios of a set along a horizon grid.
    Density {
        /// Set expression, e.g. `squares` or `compl(evens)`.
        #[arg(long)]
        set: Option<String>,
        /// Modulus expression; natural density when absent.
        #[arg(long)]
        modulus: Option<String>,
        /// Horizon grid `min:max:factor` [default: 16:1048576:2].
        #[arg(long)]
        grid: Option<String>,
        /// Verdict tolerance [default: 0.01].
        #[arg(long)]
        tol: Option<f64>,
        /// Limit to test the trace against.
        #[arg(long)]
        target: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Axiom, β, slow-variation and concavity report for a modulus.
    Modulus {
        /// Modulus expression, e.g. `lemma(squares,20)`.
        #[arg(long, alias = "modulus")]
        expr: Option<String>,
        /// Point grid `min:max:step`: linear when min is 0, geometric otherwise [default: 0:100:0.1].
        #[arg(long)]
        grid: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Classifies a built-in sequence (R03, E2, E3, E4) in every convergence mode.
    Classify {
        /// Sequence id: R03, E2, E3 or E4.
        #[arg(long)]
        seq: Option<String>,
        /// Modulus expression [default: id].
        #[arg(long)]
        modulus: Option<String>,
        /// Horizon grid `min:max:factor` [default: 16:131072:2].
        #[arg(long)]
        grid: Option<String>,
        /// Comma-separated thresholds [default: 1,0.1,0.01].
        #[arg(long)]
        eps: Option<String>,
        /// Verdict tolerance [default: 0.01].
        #[arg(long)]
        tol: Option<f64>,
        /// Knot count for the deviation-set modulus probe.
        #[arg(long)]
        lemma_probe: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Runs the built-in example fixtures; exit 0 iff all pass.
    Examples {
        /// Tolerance for limit verdicts [default: 0.1].
        #[arg(long)]
        tol: Option<f64>,
        /// Largest horizon [default: 1048576].
        #[arg(long)]
        grid_max: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
}

fn required(v: Option<String>, flag: &str) -> Result<String, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("missing --{flag}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.workers {
        if n == 0 {
            return Err(CliError::Usage("worker count must be positive".into()));
        }
        // Only fails if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match cli.command {
        Command::Density {
            set,
            modulus,
            grid,
            tol,
            target,
            common,
        } => {
            let file = FileConfig::load(common.config.as_deref())?;
            let args = DensityArgs {
                set: required(set.or(file.set), "set")?,
                modulus: modulus.or(file.modulus),
                grid: grid.or(file.grid).unwrap_or_else(|| "16:1048576:2".into()),
                tol: tol.or(file.tol).unwrap_or(0.01),
                target: target.or(file.target),
                out: common.out.or(file.out),
                format: common.format.or(file.format).unwrap_or(Format::Csv),
            };
            let t = commands::density(&args)?;
            eprintln!(
                "{}{}: last ratio {} at n={}, trend {:?}, verdict {:?}",
                t.set,
                t.modulus.as_deref().map(|m| format!(" under {m}")).unwrap_or_default(),
                t.last_ratio().unwrap_or(f64::NAN),
                t.trace.grid.last().copied().unwrap_or(0),
                t.trace.trend,
                t.trace.verdict
            );
            Ok(())
        }
        Command::Modulus { expr, grid, common } => {
            let file = FileConfig::load(common.config.as_deref())?;
            let args = ModulusArgs {
                expr: required(expr.or(file.expr).or(file.modulus), "expr")?,
                grid: grid.or(file.grid).unwrap_or_else(|| "0:100:0.1".into()),
                out: common.out.or(file.out),
                format: common.format.or(file.format).unwrap_or(Format::Json),
            };
            let r = commands::modulus(&args)?;
            let ax = &r.axioms;
            eprintln!(
                "{}: zero {}, monotone {}, subadditive {}, continuity {}, slowly varying {}, concavity witness {:?}",
                r.modulus,
                ax.zero_ok(),
                ax.monotone_ok(),
                ax.subadditive_ok(),
                ax.continuity_ok(),
                r.slowly_varying,
                r.concavity_witness
            );
            if ax.all_ok() {
                Ok(())
            } else {
                Err(CliError::Failed(format!("{} violates a modulus axiom: {:?}", r.modulus, ax.counterexample())))
            }
        }
        Command::Classify {
            seq,
            modulus,
            grid,
            eps,
            tol,
            lemma_probe,
            common,
        } => {
            let file = FileConfig::load(common.config.as_deref())?;
            let args = ClassifyArgs {
                seq: required(seq.or(file.seq), "seq")?,
                modulus: modulus.or(file.modulus).unwrap_or_else(|| "id".into()),
                grid: grid.or(file.grid).unwrap_or_else(|| "16:131072:2".into()),
                eps: eps.map(Eps::Text).or(file.eps).unwrap_or(Eps::List(vec![1.0, 0.1, 0.01])),
                tol: tol.or(file.tol).unwrap_or(0.01),
                lemma_probe: lemma_probe.or(file.lemma_probe),
                out: common.out.or(file.out),
                format: common.format.or(file.format).unwrap_or(Format::Json),
            };
            let v = commands::classify_cmd(&args)?;
            for line in commands::status_lines(&v) {
                eprintln!("{line}");
            }
            Ok(())
        }
        Command::Examples { tol, grid_max, common } => {
            let file = FileConfig::load(common.config.as_deref())?;
            let tol = config::tolerance(tol.or(file.tol).unwrap_or(0.1))?;
            let grid_max = grid_max.or(file.grid_max).unwrap_or(1 << 20);
            if grid_max < 16 {
                return Err(CliError::Usage(format!("--grid-max must be at least 16, got {grid_max}")));
            }
            let outcomes = fixtures::run(grid_max, tol);
            for o in &outcomes {
                println!("{} {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
            }
            let passed = outcomes.iter().filter(|o| o.passed).count();
            println!("{passed}/{} fixtures pass", outcomes.len());
            if let Some(out) = common.out.or(file.out) {
                output::write_json(Some(&out), &outcomes)?;
            }
            if passed == outcomes.len() {
                Ok(())
            } else {
                let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed).map(|o| o.name).collect();
                Err(CliError::Failed(format!("failing fixtures: {}", failed.join(", "))))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
