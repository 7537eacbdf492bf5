//! Command-line interface.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{EnvSpec, Eta, ExperimentConfig, LearnerSpec};
use crate::error::{HarnessError, Result};
use crate::fit::{fit_rate, print_fit, read_rates};
use crate::runner::{dynamics, output_dir, run, sweep};
use crate::verify::{all_checks, print_table};

#[derive(Debug, Parser)]
#[command(name = "altreg", version, about = "Alternating-regret experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Play one learner against its environment(s) at the largest horizon.
    Run(ExperimentArgs),
    /// Measure every horizon and fit the growth exponent.
    Sweep(ExperimentArgs),
    /// Alternating self-play in a two-player game.
    Dynamics(ExperimentArgs),
    /// Check simulations against the closed-form oracles.
    Verify {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the exponent of an existing `T,value` CSV.
    Fit {
        /// Rates CSV, as written by `sweep`.
        rates: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated, strictly increasing.
    #[arg(long, value_delimiter = ',')]
    pub horizons: Option<Vec<usize>>,
    /// A number or `paper`.
    #[arg(long)]
    pub eta: Option<Eta>,
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(LearnerSpec::NAMES))]
    pub learner: Option<String>,
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(EnvSpec::NAMES))]
    pub env: Option<String>,
    #[arg(long)]
    pub jobs: Option<usize>,
}

impl ExperimentArgs {
    /// The config file with command-line overrides applied.
    pub fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => {
                let learner = self
                    .learner
                    .as_deref()
                    .ok_or_else(|| HarnessError::validation("learner", "give --config or --learner"))?;
                ExperimentConfig {
                    learner: LearnerSpec::from_name(learner).expect("checked by clap"),
                    learner_y: None,
                    environment: None,
                    environments: Vec::new(),
                    game: None,
                    domain: None,
                    horizons: Vec::new(),
                    comparator: crate::config::PointSpec::BestFixed,
                    metric: Default::default(),
                    seed: 0,
                    output: None,
                    jobs: None,
                }
            }
        };
        if let (Some(name), Some(_)) = (&self.learner, &self.config) {
            cfg.learner = LearnerSpec::from_name(name).expect("checked by clap");
        }
        if let Some(env) = &self.env {
            cfg.environment = Some(EnvSpec::from_name(env).expect("checked by clap"));
            cfg.environments.clear();
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(h) = &self.horizons {
            cfg.horizons = h.clone();
        }
        if let Some(eta) = self.eta {
            if !cfg.learner.set_eta(eta) {
                return Err(HarnessError::validation(
                    "--eta",
                    format!("{} has no learning rate", cfg.learner.name()),
                ));
            }
        }
        if let Some(j) = self.jobs {
            cfg.jobs = Some(j);
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Runs a parsed command, printing a short report to `out`.
pub fn execute<W: Write>(cli: Cli, mut out: W) -> Result<()> {
    let io = |e: std::io::Error| HarnessError::io("stdout", e);
    match cli.command {
        Command::Run(args) => {
            let cfg = args.config()?;
            let dir = output_dir(args.out.as_deref(), Some(&cfg));
            let report = run(&cfg, &dir)?;
            for r in &report.runs {
                writeln!(
                    out,
                    "{} {} T={} reg_std {:.6e} reg_cht {:.6e} reg_alt {:.6e}",
                    r.learner, r.environment, r.horizon, r.regret.reg_std, r.regret.reg_cht, r.regret.reg_alt
                )
                .map_err(io)?;
            }
            writeln!(out, "wrote {}", dir.display()).map_err(io)?;
        }
        Command::Sweep(args) => {
            let cfg = args.config()?;
            let dir = output_dir(args.out.as_deref(), Some(&cfg));
            let report = sweep(&cfg, &dir)?;
            for p in &report.points {
                writeln!(out, "T={:<8} value {:.6e} ({:.2}s)", p.horizon, p.value, p.wall_time_s).map_err(io)?;
            }
            if let Some(fit) = &report.fit {
                print_fit(&mut out, fit).map_err(io)?;
            }
            writeln!(out, "wrote {}", dir.display()).map_err(io)?;
        }
        Command::Dynamics(args) => {
            let cfg = args.config()?;
            let dir = output_dir(args.out.as_deref(), Some(&cfg));
            let report = dynamics(&cfg, &dir)?;
            writeln!(
                out,
                "T={} reg_alt x {:.6e} y {:.6e} cce_gap {:.3e} (bound {:.3e})",
                report.horizon, report.x.regret.reg_alt, report.y.regret.reg_alt, report.gaps.cce_gap, report.gaps.cce_bound
            )
            .map_err(io)?;
            if let (Some(g), Some(b)) = (report.gaps.ne_gap, report.gaps.ne_bound) {
                writeln!(out, "ne_gap {g:.3e} (bound {b:.3e})").map_err(io)?;
            }
            writeln!(out, "wrote {}", dir.display()).map_err(io)?;
        }
        Command::Verify { out: flag } => {
            let checks = all_checks()?;
            print_table(&mut out, &checks).map_err(io)?;
            if flag.is_some() || std::env::var_os("ALTREG_OUT").is_some() {
                let dir = output_dir(flag.as_deref(), None);
                std::fs::create_dir_all(&dir).map_err(|e| HarnessError::io(&dir, e))?;
                let path = dir.join("verify.json");
                std::fs::write(&path, serde_json::to_string_pretty(&checks)?).map_err(|e| HarnessError::io(&path, e))?;
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            if failed > 0 {
                return Err(HarnessError::Check(format!("{failed} of {} oracle checks failed", checks.len())));
            }
        }
        Command::Fit { rates } => {
            let fit = fit_rate(&read_rates(&rates)?)?;
            print_fit(&mut out, &fit).map_err(io)?;
        }
    }
    Ok(())
}
