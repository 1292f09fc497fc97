use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use wegner_core::experiment::{dump_matrix, run, write_results_csv, ExperimentConfig};
use wegner_core::transfer::{lyapunov_sweep, write_sweep_csv};
use wegner_core::verify::{verify, Suite, VerifyOptions};

/// Resonance-probability experiments for multi-particle Anderson
/// Hamiltonians with Bernoulli disorder.
#[derive(Parser)]
#[command(name = "wegner", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the Monte Carlo campaign described by a config and write CSV rows.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output CSV; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Run the self-check suites.
    Verify {
        /// Restrict to one suite; repeatable.
        #[arg(long = "suite", value_name = "NAME")]
        suites: Vec<Suite>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Lyapunov exponents over the config's energy list (d = 1 only).
    LyapunovSweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Write the Hamiltonian for the first L of the config as `i j value` lines.
    DumpMatrix {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
    ExperimentConfig::from_json(&text).with_context(|| format!("invalid config {}", path.display()))
}

/// Write the whole buffer at once, so a failed run leaves no file behind.
fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => fs::write(p, bytes).with_context(|| format!("cannot write {}", p.display())),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

fn cmd_run(config: &Path, out: Option<&Path>, seed: Option<u64>, workers: Option<usize>) -> Result<bool> {
    let config = load_config(config)?;
    let report = run(&config, seed, workers)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let mut csv = Vec::new();
    write_results_csv(&report.rows, &mut csv)?;
    emit(out, &csv)?;

    for (row, t) in report.rows.iter().zip(&report.wall_times) {
        eprintln!(
            "L={:<4} p_hat={:.3e} ci=[{:.3e}, {:.3e}] threshold={:.3e} {}  {:.2}s",
            row.l,
            row.p_hat,
            row.ci_lo,
            row.ci_hi,
            row.threshold,
            if row.pass { "pass" } else { "FAIL" },
            t.as_secs_f64()
        );
    }
    if let Some(fit) = &report.fit {
        match fit.alpha_hat {
            Some(a) => eprintln!("fitted decay rate of -ln p_hat against L^beta: {a:.4}"),
            None => eprintln!("decay rate not fitted (fewer than two non-zero estimates)"),
        }
    }
    Ok(report.all_pass())
}

fn cmd_verify(suites: Vec<Suite>, seed: u64, inject_fault: bool) -> Result<bool> {
    let suites = if suites.is_empty() { Suite::ALL.to_vec() } else { suites };
    let reports = verify(&suites, VerifyOptions { seed, inject_fault })?;
    for r in &reports {
        println!("{r}");
    }
    Ok(reports.iter().all(|r| r.passed))
}

fn cmd_lyapunov(config: &Path, out: Option<&Path>, seed: Option<u64>) -> Result<()> {
    let config = load_config(config)?;
    config.validate()?;
    let Some(ly) = &config.lyapunov else {
        bail!("config has no \"lyapunov\" section");
    };
    if config.model.d != 1 {
        bail!("lyapunov sweeps require d = 1, config has d = {}", config.model.d);
    }
    let rows = lyapunov_sweep(&ly.energies, &config.model.distribution, ly.steps, seed.unwrap_or(config.run.seed))?;
    let mut csv = Vec::new();
    write_sweep_csv(&rows, &mut csv)?;
    emit(out, &csv)
}

fn cmd_dump(config: &Path, out: Option<&Path>, seed: Option<u64>) -> Result<()> {
    let config = load_config(config)?;
    let m = dump_matrix(&config, seed)?;
    let mut buf = Vec::new();
    m.write_dump(&mut buf)?;
    emit(out, &buf)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, out, seed, workers } => cmd_run(&config, out.as_deref(), seed, workers),
        Command::Verify { suites, seed, inject_fault } => cmd_verify(suites, seed, inject_fault),
        Command::LyapunovSweep { config, out, seed } => cmd_lyapunov(&config, out.as_deref(), seed).map(|()| true),
        Command::DumpMatrix { config, out, seed } => cmd_dump(&config, out.as_deref(), seed).map(|()| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
