use std::path::PathBuf;
use std::process::ExitCode;

use ao_gibbs_cli::checks::Suite;
use ao_gibbs_cli::commands::{self, Context, Outcome};
use ao_gibbs_cli::spec::ExperimentSpec;
use ao_gibbs_cli::CliError;
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "ao-gibbs", version, about = "Simulation and verification runs for the Asakura-Oosawa Gibbs model")]
struct Cli {
    /// Experiment spec (TOML). Defaults apply when omitted.
    #[arg(long, global = true)]
    spec: Option<PathBuf>,
    /// Master seed; replaces the spec's seed list.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; replaces the spec's `outputs`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true, env = "AO_GIBBS_THREADS")]
    threads: Option<usize>,
    /// Only log errors.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run Gibbs chains and save their final configurations.
    Sample,
    /// Pressure under free, periodic and fixed boundary conditions.
    Pressure,
    /// Energy density, direct and Palm.
    EnergyDensity,
    /// Periodic energy vs the x-wise decomposition on torus configurations.
    PalmCheck,
    /// Good and bad lattice configurations.
    Discontinuity,
    /// Run a property suite and write a JSON report.
    Verify {
        #[arg(value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SuiteArg {
    Energy,
    Geometry,
    Palm,
    Temperedness,
    Dlr,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Energy => Suite::Energy,
            SuiteArg::Geometry => Suite::Geometry,
            SuiteArg::Palm => Suite::Palm,
            SuiteArg::Temperedness => Suite::Temperedness,
            SuiteArg::Dlr => Suite::Dlr,
            SuiteArg::All => Suite::All,
        }
    }
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let spec = match &cli.spec {
        Some(path) => ExperimentSpec::load(path)?,
        None => ExperimentSpec::default(),
    };
    let ctx = Context::new(spec, cli.seed, cli.out);
    match cli.command {
        Command::Sample => commands::sample(&ctx),
        Command::Pressure => commands::pressure(&ctx),
        Command::EnergyDensity => commands::energy_density(&ctx),
        Command::PalmCheck => commands::palm_check(&ctx),
        Command::Discontinuity => commands::discontinuity(&ctx),
        Command::Verify { suite } => {
            let (outcome, report) = commands::verify(&ctx, suite.into())?;
            for c in &report.checks {
                log::info!("{} {}: {} (worst |z| {:.3})", if c.passed { "PASS" } else { "FAIL" }, c.id, c.name, c.worst_z);
            }
            Ok(outcome)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet { "error" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("thread pool: {e}");
        }
    }
    match run(cli) {
        Ok(outcome) => {
            for f in &outcome.files {
                log::info!("wrote {}", f.display());
            }
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                log::error!("assertions failed");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
