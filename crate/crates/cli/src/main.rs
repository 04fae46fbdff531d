use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use quench_cli::commands::{cmd_evolve, cmd_figure1, cmd_sweep, parse_values, SweepParam};
use quench_cli::config::parse_outputs;
use quench_cli::series::thread_pool;
use quench_cli::verify::{cmd_verify, Level, DEFAULT_SEED};
use quench_cli::{CliError, KMax, Overrides, Result, ScenarioConfig};

#[derive(Parser)]
#[command(name = "quench-entropy", version, about = "Entanglement entropy bounds after a harmonic chain quench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bound series over a time grid, as CSV.
    Evolve {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Write the state at t1 as JSON.
        #[arg(long)]
        dump_state: Option<PathBuf>,
    },
    /// Szegő sums and fits for c = 0.5, 1, 1.5 with β = 1.
    Figure1 {
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Randomized invariant checks; JSON report.
    Verify {
        #[arg(long, default_value = "quick")]
        level: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Report file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One series per parameter value, concatenated.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// One of c, N, n, t1.
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
    },
}

#[derive(Args)]
struct ScenarioArgs {
    /// `poly:a0,a1,...` or `gap:c=<value>`.
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(short = 'N')]
    size: Option<usize>,
    #[arg(short = 'n')]
    cut: Option<usize>,
    #[arg(long)]
    t0: Option<f64>,
    #[arg(long)]
    t1: Option<f64>,
    /// Number of time points, endpoints included.
    #[arg(long)]
    steps: Option<usize>,
    /// `auto` or an integer.
    #[arg(long)]
    kmax: Option<String>,
    /// Comma-separated subset of exact,purity,detbound,szego,bkbound.
    #[arg(long)]
    outputs: Option<String>,
    /// CSV path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    jobs: Option<usize>,
    /// JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl ScenarioArgs {
    fn resolve(&self) -> Result<ScenarioConfig> {
        let overrides = Overrides {
            lambda: self.lambda.clone(),
            beta: self.beta.clone(),
            size: self.size,
            n: self.cut,
            t0: self.t0,
            t1: self.t1,
            steps: self.steps,
            kmax: self.kmax.as_deref().map(str::parse::<KMax>).transpose()?,
            outputs: self.outputs.as_deref().map(parse_outputs).transpose()?,
        };
        ScenarioConfig::resolve(self.config.as_deref(), overrides)
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Evolve { scenario, dump_state } => {
            let cfg = scenario.resolve()?;
            let pool = thread_pool(scenario.jobs)?;
            cmd_evolve(&cfg, &pool, scenario.out.as_deref(), dump_state.as_deref())?;
        }
        Command::Figure1 { out, jobs } => {
            let fits = cmd_figure1(&out, &thread_pool(jobs)?)?;
            for f in fits {
                eprintln!(
                    "c = {}: slope {:.6e}, R² {:.6}, value at t=50 {:.6e}",
                    f.c, f.fit.slope, f.fit.r_squared, f.value_at_end
                );
            }
        }
        Command::Verify { level, seed, out } => {
            let report = cmd_verify(level.parse::<Level>()?, seed);
            let json = serde_json::to_string_pretty(&report)? + "\n";
            match out {
                Some(p) => std::fs::write(p, &json)?,
                None => print!("{json}"),
            }
            if !report.passed {
                let failed: Vec<_> = report.families.iter().filter(|f| !f.passed).map(|f| f.family).collect();
                return Err(CliError::Verification(format!("failing families: {}", failed.join(", "))));
            }
        }
        Command::Sweep { scenario, param, values } => {
            let param: SweepParam = param.parse()?;
            let values = parse_values(&values)?;
            let base = scenario.resolve()?;
            let pool = thread_pool(scenario.jobs)?;
            cmd_sweep(param, &values, &base, &pool, scenario.out.as_deref())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
