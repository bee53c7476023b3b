use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dwps_cli::error::{CliError, EXIT_CONFIG, EXIT_OK};
use dwps_cli::{parse_config, parse_grid, run, sweep, Overrides, SweepParam};
use dwps_core::invariants::run_all;

/// Environment variable that fixes the number of worker threads.
const THREADS_VAR: &str = "DWPS_THREADS";

#[derive(Parser)]
#[command(name = "dwps", version, about = "Dirac Wigner phase-space scenario runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Grid size as NxM (x points by p points).
        #[arg(long, value_parser = parse_grid)]
        grid: Option<(usize, usize)>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long)]
        snapshot_every: Option<usize>,
    },
    /// Run a scenario once per parameter value.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// D, p_tilde or height.
        #[arg(long)]
        param: SweepParam,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in invariant suite.
    Check,
}

fn threads() -> Result<(), String> {
    let Ok(v) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = v.parse().map_err(|_| format!("{THREADS_VAR} = `{v}` is not a thread count"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn check() -> Result<(), CliError> {
    let outcomes = run_all()?;
    let mut failed = Vec::new();
    for c in &outcomes {
        let status = if c.passed() { "ok" } else { "FAILED" };
        println!(
            "{:<22} {:>6} samples  residue {:.3e}  tolerance {:.0e}  {:>8.1?}  {status}",
            c.name, c.samples, c.residue, c.tolerance, c.elapsed
        );
        if !c.passed() {
            failed.push(c.name);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Check(failed.join(", ")))
    }
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run { config, out, grid, dt, t_end, snapshot_every } => {
            let c = Overrides { out, grid, dt, t_end, snapshot_every }.apply(parse_config(&config)?)?;
            let o = run(&c)?;
            println!("{}: {} steps in {:.1?}, output in {}", c.name, o.report.steps, o.elapsed, o.dir.display());
            Ok(())
        }
        Command::Sweep { config, param, values, out } => {
            let c = Overrides { out, ..Default::default() }.apply(parse_config(&config)?)?;
            let s = sweep(&c, param, &values)?;
            println!("{}: {} runs, output in {}", c.name, s.runs.len(), c.output_dir.display());
            Ok(())
        }
        Command::Check => check(),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG as u8 } else { EXIT_OK as u8 });
        }
    };
    if let Err(e) = threads() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_CONFIG as u8);
    }
    match execute(cli.command) {
        Ok(()) => ExitCode::from(EXIT_OK as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
