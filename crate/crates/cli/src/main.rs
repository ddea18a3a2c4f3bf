use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use obda_core::harness::{
    emit_plots, run_experiment, sweep_bounds, verify_perr, write_sweep, write_verify, RunConfig,
    SWEEP_CSV, VERIFY_CSV,
};
use obda_core::{Error, Result};

/// One-bit over-the-air gradient aggregation simulator.
#[derive(Parser)]
#[command(name = "obda", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train with signSGD and over-the-air majority vote; writes per-round CSVs.
    Run(Common),
    /// Monte Carlo check of the sign-error bounds; exits 4 if any point fails.
    VerifyPerr(Common),
    /// Tabulate the convergence-bound terms over the configured grid.
    SweepBounds(Common),
    /// Write gnuplot scripts for the CSVs in the output directory.
    EmitPlots(Common),
}

#[derive(Args)]
struct Common {
    /// TOML configuration; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the configured output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn resolve(&self) -> Result<(RunConfig, PathBuf)> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        let out = self.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
        cfg.output_dir = out.clone();
        Ok((cfg, out))
    }
}

fn save_config(cfg: &RunConfig, out: &Path) -> Result<()> {
    std::fs::create_dir_all(out)?;
    std::fs::write(out.join("config.resolved.toml"), cfg.to_toml())?;
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(c) => {
            let (cfg, out) = c.resolve()?;
            save_config(&cfg, &out)?;
            for s in run_experiment(&cfg, &out)? {
                println!(
                    "{:<22} time-avg |g|_1 {:>9.4}  final accuracy {}  bound rhs {}",
                    s.scenario.name(),
                    s.g_l1_timeavg,
                    s.final_accuracy.map_or("-".into(), |a| format!("{a:.4}")),
                    s.bound.map_or("vacuous".into(), |b| format!("{:.4}", b.rhs)),
                );
            }
        }
        Command::VerifyPerr(c) => {
            let (cfg, out) = c.resolve()?;
            save_config(&cfg, &out)?;
            let rows = verify_perr(&cfg.verify, cfg.seed)?;
            write_verify(&out.join(VERIFY_CSV), &rows)?;
            let failed: Vec<_> = rows.iter().filter(|r| !r.pass).collect();
            println!("{} points, {} failed", rows.len(), failed.len());
            if !failed.is_empty() {
                for r in &failed {
                    log::error!("bound exceeded: {r:?}");
                }
                return Err(Error::Verification(format!(
                    "{} of {} points exceed their bound",
                    failed.len(),
                    rows.len()
                )));
            }
        }
        Command::SweepBounds(c) => {
            let (cfg, out) = c.resolve()?;
            save_config(&cfg, &out)?;
            let rows = sweep_bounds(&cfg.sweep, cfg.gamma, cfg.n)?;
            write_sweep(&out.join(SWEEP_CSV), &rows)?;
            let vacuous = rows.iter().filter(|r| r.vacuous).count();
            println!("{} points, {vacuous} vacuous", rows.len());
        }
        Command::EmitPlots(c) => {
            let (_, out) = c.resolve()?;
            for p in emit_plots(&out)? {
                println!("{}", p.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
