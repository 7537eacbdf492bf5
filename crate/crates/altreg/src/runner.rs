//! `run`, `dynamics` and `sweep`: config in, files out.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use altreg_core::losses::Constants;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ConstantsSpec, ExperimentConfig, Metric};
use crate::error::{HarnessError, Result};
use crate::experiment::{certificates, play, Certificates, Run};
use crate::fit::{fit_rate, write_rates, Fit, RatePoint, MIN_POINTS};
use crate::game::{build_game, play_game, Gaps, GameRun};
use crate::setup::{build_learner, decision_domain, environment_losses};
use crate::trace::{write_trace, TraceRows};

fn constants_spec(c: Constants) -> ConstantsSpec {
    ConstantsSpec {
        lipschitz: c.lipschitz,
        smoothness: c.smoothness,
        self_concordance: c.self_concordance,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RegretSummary {
    pub reg_std: f64,
    pub reg_cht: f64,
    pub reg_alt: f64,
}

impl From<altreg_core::regret::Regrets> for RegretSummary {
    fn from(r: altreg_core::regret::Regrets) -> Self {
        RegretSummary {
            reg_std: r.standard,
            reg_cht: r.cheating,
            reg_alt: r.alternating,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub environment: String,
    pub learner: &'static str,
    pub horizon: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constants: Option<ConstantsSpec>,
    pub comparator: Vec<f64>,
    #[serde(flatten)]
    pub regret: RegretSummary,
    pub certificates: Certificates,
    /// Black-box losses enter with user-supplied constants, unchecked.
    pub black_box_losses: usize,
    pub wall_time_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: &'static str,
    pub runs: Vec<RunSummary>,
    /// Index of the run with the largest alternating regret.
    pub worst: usize,
    pub wall_time_s: f64,
    pub config: ExperimentConfig,
}

impl RunReport {
    pub fn worst_reg_alt(&self) -> f64 {
        self.runs[self.worst].regret.reg_alt
    }
}

/// Plays every configured environment at `horizon`.
pub fn play_all(cfg: &ExperimentConfig, horizon: usize) -> Result<Vec<(String, Run)>> {
    cfg.environment_list()
        .into_iter()
        .map(|(at, env)| {
            let losses = environment_losses(env, horizon, cfg.seed, &at)?;
            let dim = losses
                .first()
                .ok_or_else(|| HarnessError::validation(&at, "environment produced no losses"))?
                .dim();
            let dom = decision_domain(cfg.domain.as_ref(), &cfg.learner, dim)?;
            let (mut learner, info) = build_learner(&cfg.learner, &dom, losses.len(), &losses, "learner")?;
            let run = play(&mut learner, info, losses, dom, &cfg.comparator)?;
            Ok((at, run))
        })
        .collect()
}

fn worst_index(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best.0
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").map_err(|e| HarnessError::io(path, e))
}

/// Runs the largest configured horizon, writing one trace per environment
/// and `summary.json` into `out`.
pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<RunReport> {
    cfg.validate()?;
    if cfg.game.is_some() {
        return Err(HarnessError::validation("game", "use the dynamics command for games"));
    }
    let start = Instant::now();
    let horizon = *cfg.horizons.last().expect("validated");
    let runs = play_all(cfg, horizon)?;
    create_dir(out)?;
    let single = runs.len() == 1;
    let mut summaries = Vec::with_capacity(runs.len());
    for (i, (at, run)) in runs.iter().enumerate() {
        let name = if single { "trace.csv".to_string() } else { format!("trace-{i}.csv") };
        write_trace(
            &out.join(&name),
            &TraceRows {
                xs: &run.xs,
                losses: &run.losses,
                commutators: &run.commutators,
                comparator: &run.comparator,
            },
        )?;
        summaries.push(RunSummary {
            environment: at.clone(),
            learner: run.learner,
            horizon: run.horizon(),
            eta: run.info.eta,
            constants: run.info.constants.map(constants_spec),
            comparator: run.comparator.clone(),
            regret: run.regrets.into(),
            certificates: certificates(&cfg.learner, run)?,
            black_box_losses: run.losses.iter().filter(|f| f.kind() == "black-box").count(),
            wall_time_s: run.seconds,
            trace: Some(name),
        });
    }
    let report = RunReport {
        command: "run",
        worst: worst_index(summaries.iter().map(|s| s.regret.reg_alt)),
        runs: summaries,
        wall_time_s: start.elapsed().as_secs_f64(),
        config: cfg.clone(),
    };
    write_json(&out.join("summary.json"), &report)?;
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct PlayerSummary {
    pub learner: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    pub comparator: Vec<f64>,
    #[serde(flatten)]
    pub regret: RegretSummary,
}

#[derive(Debug, Clone, Serialize)]
pub struct DynamicsReport {
    pub command: &'static str,
    pub horizon: usize,
    pub zero_sum: bool,
    /// Factor applied to the payoffs to bring them into `[-1, 1]`.
    pub payoff_scale: f64,
    pub x: PlayerSummary,
    pub y: PlayerSummary,
    pub gaps: Gaps,
    pub average_x: Vec<f64>,
    pub average_y: Vec<f64>,
    pub wall_time_s: f64,
    pub config: ExperimentConfig,
}

fn game_run(cfg: &ExperimentConfig, horizon: usize) -> Result<(altreg_core::dynamics::Game, GameRun)> {
    let spec = cfg
        .game
        .as_ref()
        .ok_or_else(|| HarnessError::validation("game", "a game is required"))?;
    let game = build_game(spec, cfg.seed)?;
    let spec_y = cfg.learner_y.as_ref().unwrap_or(&cfg.learner);
    let run = play_game(&game, &cfg.learner, spec_y, horizon)?;
    Ok((game, run))
}

/// Alternating self-play at the largest configured horizon. Writes
/// `trace_x.csv`, `trace_y.csv` and `summary.json`.
pub fn dynamics(cfg: &ExperimentConfig, out: &Path) -> Result<DynamicsReport> {
    cfg.validate()?;
    let horizon = *cfg.horizons.last().expect("validated");
    let (game, run) = game_run(cfg, horizon)?;
    create_dir(out)?;
    write_trace(
        &out.join("trace_x.csv"),
        &TraceRows {
            xs: &run.trace.xs,
            losses: &run.losses_x,
            commutators: &run.commutators_x,
            comparator: &run.comparator_x,
        },
    )?;
    write_trace(
        &out.join("trace_y.csv"),
        &TraceRows {
            xs: &run.trace.ys,
            losses: &run.losses_y,
            commutators: &run.commutators_y,
            comparator: &run.comparator_y,
        },
    )?;
    let spec_y = cfg.learner_y.as_ref().unwrap_or(&cfg.learner);
    let report = DynamicsReport {
        command: "dynamics",
        horizon,
        zero_sum: game.is_zero_sum(),
        payoff_scale: game.scale(),
        x: PlayerSummary {
            learner: cfg.learner.name(),
            eta: run.info_x.eta,
            comparator: run.comparator_x.clone(),
            regret: run.regrets_x.into(),
        },
        y: PlayerSummary {
            learner: spec_y.name(),
            eta: run.info_y.eta,
            comparator: run.comparator_y.clone(),
            regret: run.regrets_y.into(),
        },
        gaps: run.gaps,
        average_x: run.trace.average_x(),
        average_y: run.trace.average_y(),
        wall_time_s: run.seconds,
        config: cfg.clone(),
    };
    write_json(&out.join("summary.json"), &report)?;
    if !run.gaps.hold(1e-9) {
        return Err(HarnessError::Check(format!("equilibrium gap exceeds its regret bound: {:?}", run.gaps)));
    }
    Ok(report)
}

/// The swept quantity at one horizon.
pub fn measure(cfg: &ExperimentConfig, horizon: usize) -> Result<f64> {
    if cfg.game.is_some() {
        let (_, run) = game_run(cfg, horizon)?;
        return match cfg.metric {
            Metric::RegAlt => Ok(run.regrets_x.alternating.max(run.regrets_y.alternating)),
            Metric::NeGap => run
                .gaps
                .ne_gap
                .ok_or_else(|| HarnessError::validation("metric", "the NE gap needs a zero-sum game")),
            Metric::CceGap => Ok(run.gaps.cce_gap),
        };
    }
    let runs = play_all(cfg, horizon)?;
    Ok(runs.iter().map(|(_, r)| r.regrets.alternating).fold(f64::NEG_INFINITY, f64::max))
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    #[serde(rename = "T")]
    pub horizon: usize,
    pub value: f64,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepFailure {
    #[serde(rename = "T")]
    pub horizon: usize,
    pub error: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub command: &'static str,
    pub metric: Metric,
    pub points: Vec<SweepPoint>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<SweepFailure>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<Fit>,
    pub wall_time_s: f64,
    pub config: ExperimentConfig,
}

impl SweepReport {
    pub fn rate_points(&self) -> Vec<RatePoint> {
        self.points
            .iter()
            .map(|p| RatePoint {
                horizon: p.horizon,
                value: p.value,
            })
            .collect()
    }
}

/// Measures every horizon on a pool of `jobs` threads and fits the growth
/// exponent. Results are ordered by horizon whatever the scheduling.
pub fn sweep_report(cfg: &ExperimentConfig) -> Result<(SweepReport, Option<HarnessError>)> {
    cfg.validate()?;
    if cfg.horizons.len() < MIN_POINTS {
        return Err(HarnessError::validation(
            "horizons",
            format!("a sweep needs at least {MIN_POINTS} horizons"),
        ));
    }
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.unwrap_or(0))
        .build()
        .map_err(|e| HarnessError::Check(format!("thread pool: {e}")))?;
    let results: Vec<(usize, Result<f64>, f64)> = pool.install(|| {
        cfg.horizons
            .par_iter()
            .map(|&t| {
                let s = Instant::now();
                let v = measure(cfg, t);
                (t, v, s.elapsed().as_secs_f64())
            })
            .collect()
    });
    let mut points = Vec::new();
    let mut failures = Vec::new();
    let mut first_error = None;
    for (horizon, value, wall) in results {
        match value {
            Ok(value) => points.push(SweepPoint {
                horizon,
                value,
                wall_time_s: wall,
            }),
            Err(e) => {
                failures.push(SweepFailure {
                    horizon,
                    error: e.to_string(),
                });
                first_error.get_or_insert(e);
            }
        }
    }
    let mut report = SweepReport {
        command: "sweep",
        metric: cfg.metric,
        points,
        failures,
        fit: None,
        wall_time_s: 0.0,
        config: cfg.clone(),
    };
    if first_error.is_none() {
        match fit_rate(&report.rate_points()) {
            Ok(fit) => report.fit = Some(fit),
            Err(e) => first_error = Some(e),
        }
    }
    report.wall_time_s = start.elapsed().as_secs_f64();
    Ok((report, first_error))
}

/// [`sweep_report`] plus `rates.csv` and `sweep.json` in `out`. Partial
/// results are written before a failure is returned.
pub fn sweep(cfg: &ExperimentConfig, out: &Path) -> Result<SweepReport> {
    let (report, error) = sweep_report(cfg)?;
    create_dir(out)?;
    write_rates(&out.join("rates.csv"), &report.rate_points())?;
    write_json(&out.join("sweep.json"), &report)?;
    match error {
        Some(e) => Err(e),
        None => Ok(report),
    }
}

/// Output directory: `ALTREG_OUT`, else the flag, else the config, else
/// `altreg-out`.
pub fn output_dir(flag: Option<&Path>, cfg: Option<&ExperimentConfig>) -> PathBuf {
    if let Some(dir) = std::env::var_os("ALTREG_OUT").filter(|v| !v.is_empty()) {
        return PathBuf::from(dir);
    }
    flag.map(Path::to_path_buf)
        .or_else(|| cfg.and_then(|c| c.output.clone()))
        .unwrap_or_else(|| PathBuf::from("altreg-out"))
}
