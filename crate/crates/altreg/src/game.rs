//! Two-player alternating dynamics.

use std::fs;
use std::time::Instant;

use altreg_core::dynamics::{cce_gap, ne_gap, run_alternating, DynamicTrace, Game, JointQuadratic};
use altreg_core::geometry::{kl, Domain};
use altreg_core::losses::LossFn;
use altreg_core::regret::Regrets;
use altreg_core::rng::SplitMix64;
use serde::Serialize;

use crate::config::{GameSpec, JointQuadraticSpec, LearnerSpec, PointSpec};
use crate::error::{HarnessError, Result};
use crate::setup::{build_learner, LearnerInfo};

fn joint(q: &JointQuadraticSpec) -> altreg_core::Result<JointQuadratic> {
    JointQuadratic::new(&q.q, q.b.clone(), q.c)
}

/// Entries uniform in `[-1, 1]`, row by row.
pub fn random_matrix(rows: usize, cols: usize, rng: &mut SplitMix64) -> Vec<Vec<f64>> {
    (0..rows).map(|_| (0..cols).map(|_| rng.uniform(-1.0, 1.0)).collect()).collect()
}

pub fn build_game(spec: &GameSpec, seed: u64) -> Result<Game> {
    let invalid = |e: altreg_core::Error| HarnessError::validation("game", e.to_string());
    match spec {
        GameSpec::Matrix { a } => Game::matrix(a.clone()).map_err(invalid),
        GameSpec::Bimatrix { a, b } => Game::bimatrix(a.clone(), b.clone()).map_err(invalid),
        GameSpec::Quadratic {
            u1,
            u2,
            x_domain,
            y_domain,
        } => {
            let xd = x_domain.build().map_err(invalid)?;
            let yd = y_domain.build().map_err(invalid)?;
            Game::quadratic(joint(u1).map_err(invalid)?, joint(u2).map_err(invalid)?, xd, yd).map_err(invalid)
        }
        GameSpec::RandomMatrix {
            rows,
            cols,
            zero_sum,
            seed: s,
        } => {
            let mut rng = SplitMix64::new(s.unwrap_or(seed));
            let a = random_matrix(*rows, *cols, &mut rng);
            if *zero_sum {
                Game::matrix(a).map_err(invalid)
            } else {
                let b = random_matrix(*rows, *cols, &mut rng);
                Game::bimatrix(a, b).map_err(invalid)
            }
        }
        GameSpec::File { path } => {
            let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
            let de = &mut serde_json::Deserializer::from_str(&text);
            let inner: GameSpec = serde_path_to_error::deserialize(de)
                .map_err(|e| HarnessError::validation(format!("{}:{}", path.display(), e.path()), e.inner().to_string()))?;
            if matches!(inner, GameSpec::File { .. }) {
                return Err(HarnessError::validation("game.path", "a game file cannot point to another file"));
            }
            build_game(&inner, seed)
        }
    }
}

/// Losses a player can face, for certifying learner constants before play.
fn sample_losses(dom: &Domain, loss_at: impl Fn(&[f64]) -> altreg_core::Result<LossFn>) -> Result<Vec<LossFn>> {
    let points = dom.vertices().ok_or_else(|| {
        HarnessError::validation("learner", "give explicit constants for FTRL against an opponent on this domain")
    })?;
    Ok(points.iter().map(|p| loss_at(p)).collect::<altreg_core::Result<_>>()?)
}

fn check_game_learner(spec: &LearnerSpec, at: &str) -> Result<()> {
    if let LearnerSpec::Constant {
        point: PointSpec::BestFixed,
    } = spec
    {
        return Err(HarnessError::validation(
            format!("{at}.point"),
            "best-fixed needs a fixed loss sequence; give a point",
        ));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct GameRun {
    pub trace: DynamicTrace,
    pub info_x: LearnerInfo,
    pub info_y: LearnerInfo,
    pub regrets_x: Regrets,
    pub regrets_y: Regrets,
    pub comparator_x: Vec<f64>,
    pub comparator_y: Vec<f64>,
    /// `u1(·, y_t)` for `t = 1..T`
    pub losses_x: Vec<LossFn>,
    /// `u2(x_t, ·)` for `t = 1..T`
    pub losses_y: Vec<LossFn>,
    pub commutators_x: Vec<Option<f64>>,
    pub commutators_y: Vec<Option<f64>>,
    pub gaps: Gaps,
    pub seconds: f64,
}

/// Equilibrium gaps with the bounds implied by the players' regrets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Gaps {
    /// NE gap of the average strategies (zero-sum games only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ne_gap: Option<f64>,
    /// `(RegAlt^x + RegAlt^y + 2) / (2T)`
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ne_bound: Option<f64>,
    pub cce_gap: f64,
    /// `(max(RegAlt^x, RegAlt^y) + 4) / (2T)`
    pub cce_bound: f64,
}

impl Gaps {
    pub fn hold(&self, tol: f64) -> bool {
        let ne = match (self.ne_gap, self.ne_bound) {
            (Some(g), Some(b)) => g <= b + tol,
            _ => true,
        };
        ne && self.cce_gap <= self.cce_bound + tol
    }
}

/// Hedge's commutator `KL(p, q) - KL(q, p)` between consecutive decisions.
fn hedge_commutators(spec: &LearnerSpec, decisions: &[Vec<f64>]) -> Vec<Option<f64>> {
    decisions
        .windows(2)
        .map(|w| match spec {
            LearnerSpec::Hedge { .. } => Some(kl(&w[0], &w[1]) - kl(&w[1], &w[0])),
            _ => None,
        })
        .collect()
}

pub fn play_game(game: &Game, spec_x: &LearnerSpec, spec_y: &LearnerSpec, horizon: usize) -> Result<GameRun> {
    let start = Instant::now();
    check_game_learner(spec_x, "learner")?;
    check_game_learner(spec_y, "learner_y")?;
    let needs_samples = |s: &LearnerSpec| matches!(s, LearnerSpec::Ftrl { constants: None, .. });
    let sx = if needs_samples(spec_x) {
        sample_losses(game.y_domain(), |y| game.x_loss(y))?
    } else {
        Vec::new()
    };
    let sy = if needs_samples(spec_y) {
        sample_losses(game.x_domain(), |x| game.y_loss(x))?
    } else {
        Vec::new()
    };
    let (mut ax, info_x) = build_learner(spec_x, game.x_domain(), horizon, &sx, "learner")?;
    let (mut ay, info_y) = build_learner(spec_y, game.y_domain(), horizon, &sy, "learner_y")?;
    let trace = run_alternating(game, &mut ax, &mut ay, horizon)?;
    let (comparator_x, regrets_x) = trace.ledger_x.against_best(game.x_domain())?;
    let (comparator_y, regrets_y) = trace.ledger_y.against_best(game.y_domain())?;
    let losses_x = (1..=horizon).map(|t| game.x_loss(&trace.ys[t])).collect::<altreg_core::Result<Vec<_>>>()?;
    let losses_y = (1..=horizon)
        .map(|t| game.y_loss(&trace.xs[t - 1]))
        .collect::<altreg_core::Result<Vec<_>>>()?;
    let t = horizon as f64;
    let (ne, ne_bound) = if game.is_zero_sum() {
        (
            Some(ne_gap(game, &trace.average_x(), &trace.average_y())?),
            Some((regrets_x.alternating + regrets_y.alternating + 2.0) / (2.0 * t)),
        )
    } else {
        (None, None)
    };
    let gaps = Gaps {
        ne_gap: ne,
        ne_bound,
        cce_gap: cce_gap(game, &trace)?,
        cce_bound: (regrets_x.alternating.max(regrets_y.alternating) + 4.0) / (2.0 * t),
    };
    Ok(GameRun {
        commutators_x: hedge_commutators(spec_x, &trace.xs),
        commutators_y: hedge_commutators(spec_y, &trace.ys),
        trace,
        info_x,
        info_y,
        regrets_x,
        regrets_y,
        comparator_x,
        comparator_y,
        losses_x,
        losses_y,
        gaps,
        seconds: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Eta;

    #[test]
    fn matching_pennies_gaps_hold() {
        let game = build_game(
            &GameSpec::Matrix {
                a: vec![vec![1.0, -1.0], vec![-1.0, 1.0]],
            },
            0,
        )
        .unwrap();
        let hedge = LearnerSpec::Hedge { eta: Eta::Paper };
        let run = play_game(&game, &hedge, &hedge, 512).unwrap();
        assert!(run.gaps.hold(1e-9), "{:?}", run.gaps);
        assert!(run.gaps.ne_gap.unwrap() < 0.1);
        assert_eq!(run.losses_x.len(), 512);
        assert!(run.commutators_x.iter().all(Option::is_some));
    }

    #[test]
    fn random_general_sum_game_is_not_zero_sum() {
        let spec = GameSpec::RandomMatrix {
            rows: 3,
            cols: 2,
            zero_sum: false,
            seed: Some(5),
        };
        let game = build_game(&spec, 0).unwrap();
        assert!(!game.is_zero_sum());
        let run = play_game(&game, &LearnerSpec::PrmPlus {}, &LearnerSpec::Hedge { eta: Eta::Paper }, 200).unwrap();
        assert!(run.gaps.ne_gap.is_none());
        assert!(run.gaps.hold(1e-9));
    }

    #[test]
    fn best_fixed_constant_is_rejected_in_games() {
        let game = build_game(&GameSpec::Matrix { a: vec![vec![1.0, 0.0], vec![0.0, 1.0]] }, 0).unwrap();
        let c = LearnerSpec::Constant {
            point: PointSpec::BestFixed,
        };
        assert_eq!(play_game(&game, &c, &c, 3).unwrap_err().exit_code(), 2);
    }
}
