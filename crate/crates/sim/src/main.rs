use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use isac_sim::config::{CampaignConfig, Profile};
use isac_sim::experiments::{self, Outcome};
use isac_sim::export::Format;
use isac_sim::Runner;

/// Monte Carlo study of OFDM radar range-Doppler maps under reciprocal and
/// matched filtering.
#[derive(Parser)]
#[command(name = "isac-sim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print closed-form levels for the configured scene.
    Predict(Common),
    /// Trial-averaged range profiles against the analytic curve.
    RangeProfile(Common),
    /// Single-target PSLR and ISLR versus range.
    SweepPslrIslr(Common),
    /// Range and velocity RMSE versus SNR.
    SweepRmse(Common),
    /// Interference powers, floors and mainlobes against closed forms.
    ValidateMoments(Common),
    /// Time- versus frequency-domain echo agreement.
    EchoCheck(Common),
    /// Write every intermediate of a single trial.
    Dump {
        #[command(flatten)]
        common: Common,
        /// Trial index to reproduce.
        #[arg(long, default_value_t = 0)]
        trial: u64,
    },
}

#[derive(Args)]
struct Common {
    /// Campaign file (.toml or .json).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Grid size and trial presets (overrides the config file).
    #[arg(long, value_enum)]
    profile: Option<Profile>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Format of the tabular artifact; report.json is always written.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Worker threads (defaults to all cores). Results do not depend on it.
    #[arg(long)]
    workers: Option<usize>,
    /// Exit with status 3 if any check fails.
    #[arg(long)]
    strict: bool,
}

impl Common {
    fn campaign(&self) -> Result<isac_sim::Campaign> {
        let mut cfg = match &self.config {
            Some(path) => CampaignConfig::from_path(path)?,
            None => CampaignConfig::default(),
        };
        if let Some(p) = self.profile {
            cfg.profile = p;
        }
        if let Some(t) = self.trials {
            cfg.trials = Some(t);
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        Ok(cfg.resolve()?)
    }
}

fn finish(outcome: &Outcome, common: &Common, started: Instant) -> Result<ExitCode> {
    for path in outcome.save(&common.out, common.format)? {
        println!("wrote {}", path.display());
    }
    let r = &outcome.report;
    let failed: Vec<_> = r.failures().collect();
    println!(
        "{}: {}/{} checks passed in {:.1} s",
        r.experiment,
        r.checks.len() - failed.len(),
        r.checks.len(),
        started.elapsed().as_secs_f64()
    );
    for c in &failed {
        eprintln!("  FAIL {} (error {:?}, tolerance {:?})", c.name, c.error, c.tolerance);
    }
    Ok(if common.strict && !failed.is_empty() {
        ExitCode::from(3)
    } else {
        ExitCode::SUCCESS
    })
}

fn run(cli: Cli) -> Result<ExitCode> {
    let started = Instant::now();
    let (common, outcome) = match &cli.command {
        Command::Predict(c) => {
            let table = experiments::predict::run(&c.campaign()?)?;
            print!("{}", experiments::predict::render(&table));
            std::fs::create_dir_all(&c.out)?;
            println!("wrote {}", table.save(&c.out, "predict", c.format)?.display());
            return Ok(ExitCode::SUCCESS);
        }
        Command::Dump { common, trial } => {
            std::fs::create_dir_all(&common.out)?;
            for path in experiments::dump::run(&common.campaign()?, None, *trial, &common.out, common.format)? {
                println!("wrote {}", path.display());
            }
            return Ok(ExitCode::SUCCESS);
        }
        Command::RangeProfile(c) => (c, experiments::range_profile::run(&c.campaign()?, &runner(c)?)?.0),
        Command::SweepPslrIslr(c) => (c, experiments::sidelobes::run(&c.campaign()?, &runner(c)?)?.0),
        Command::SweepRmse(c) => (c, experiments::rmse::run(&c.campaign()?, &runner(c)?)?.0),
        Command::ValidateMoments(c) => (c, experiments::moments::run(&c.campaign()?, &runner(c)?)?),
        Command::EchoCheck(c) => (c, experiments::echo_check::run(&c.campaign()?, &runner(c)?)?.0),
    };
    finish(&outcome, common, started)
}

fn runner(c: &Common) -> Result<Runner> {
    Runner::new(c.workers).context("starting workers")
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
