//! Single-learner runs against a fixed loss sequence.

use std::time::Instant;

use altreg_core::geometry::{Domain, Regularizer};
use altreg_core::learners::Learner;
use altreg_core::losses::LossFn;
use altreg_core::math::{distance, norm};
use altreg_core::regret::{hedge_identity_gap, RegretLedger, Regrets};
use serde::Serialize;

use crate::config::{LearnerSpec, PointSpec, RegularizerSpec};
use crate::error::{HarnessError, Result};
use crate::setup::LearnerInfo;

/// Everything recorded while playing one loss sequence.
#[derive(Debug, Clone)]
pub struct Run {
    pub learner: &'static str,
    pub domain: Domain,
    /// `x_1, …, x_{T+1}`
    pub xs: Vec<Vec<f64>>,
    pub losses: Vec<LossFn>,
    /// Per-round commutator, when the learner defines one.
    pub commutators: Vec<Option<f64>>,
    pub ledger: RegretLedger,
    pub info: LearnerInfo,
    pub comparator: Vec<f64>,
    pub regrets: Regrets,
    pub seconds: f64,
}

impl Run {
    pub fn horizon(&self) -> usize {
        self.losses.len()
    }
}

/// Plays `learner` on `losses` and scores it against `comparator`.
pub fn play(
    learner: &mut dyn Learner,
    info: LearnerInfo,
    losses: Vec<LossFn>,
    domain: Domain,
    comparator: &PointSpec,
) -> Result<Run> {
    let start = Instant::now();
    let dim = domain.dim();
    let mut ledger = RegretLedger::new(dim);
    let mut xs = Vec::with_capacity(losses.len() + 1);
    let mut commutators = Vec::with_capacity(losses.len());
    xs.push(learner.act()?);
    for (i, f) in losses.iter().enumerate() {
        let t = i + 1;
        let step = |learner: &mut dyn Learner| -> altreg_core::Result<Vec<f64>> {
            learner.observe(f)?;
            learner.act()
        };
        let next = step(learner).map_err(|e| altreg_core::Error::AtRound {
            round: t,
            source: Box::new(e),
        })?;
        commutators.push(learner.commutator(&xs[i], &next));
        ledger.record(t, &xs[i], f, &next)?;
        xs.push(next);
    }
    let (comparator, regrets) = match comparator {
        PointSpec::BestFixed => ledger.against_best(&domain)?,
        PointSpec::Point(u) => {
            if u.len() != dim || !domain.contains(u) {
                return Err(HarnessError::validation("comparator", "point lies outside the domain"));
            }
            (u.clone(), ledger.at(u)?)
        }
    };
    Ok(Run {
        learner: learner.name(),
        domain,
        xs,
        losses,
        commutators,
        ledger,
        info,
        comparator,
        regrets,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Per-round inequalities checked along a run. Slacks are `bound - value`
/// minimized over rounds, so a negative slack is a violation.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Certificates {
    /// `4/3 η³ - commutator`
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hedge_commutator_slack: Option<f64>,
    /// Difference between direct RegAlt and the KL identity.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hedge_identity_gap: Option<f64>,
    /// `η/σ ‖∇f_t(x_t)‖ - ‖x_t - x_{t+1}‖`
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ftrl_stability_slack: Option<f64>,
    /// `M η²/6 ‖∇f_t(x_{t+1})‖³ - commutator`
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ftrl_commutator_slack: Option<f64>,
}

impl Certificates {
    /// All slacks nonnegative up to `tol`, and the identity gap within `tol`.
    pub fn hold(&self, tol: f64) -> bool {
        let slack_ok = |s: Option<f64>| s.is_none_or(|s| s >= -tol);
        slack_ok(self.hedge_commutator_slack)
            && slack_ok(self.ftrl_stability_slack)
            && slack_ok(self.ftrl_commutator_slack)
            && self.hedge_identity_gap.is_none_or(|g| g <= tol)
    }
}

fn min_over(values: impl Iterator<Item = f64>) -> Option<f64> {
    values.fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.min(v))))
}

pub fn certificates(spec: &LearnerSpec, run: &Run) -> Result<Certificates> {
    let mut out = Certificates::default();
    let eta = match run.info.eta {
        Some(eta) if run.horizon() > 0 => eta,
        _ => return Ok(out),
    };
    match spec {
        LearnerSpec::Hedge { .. } => {
            let bound = 4.0 / 3.0 * eta.powi(3);
            out.hedge_commutator_slack = min_over(run.commutators.iter().flatten().map(|c| bound - c));
            let ls: Vec<Vec<f64>> = run
                .losses
                .iter()
                .map(|f| f.as_linear().map(<[f64]>::to_vec))
                .collect::<Option<_>>()
                .ok_or_else(|| HarnessError::validation("learner", "hedge needs linear losses"))?;
            out.hedge_identity_gap = Some(hedge_identity_gap(&run.xs, &ls, eta, &run.comparator)?);
        }
        LearnerSpec::Ftrl { regularizer, .. } => {
            let (reg, embed): (Regularizer, bool) = match regularizer {
                RegularizerSpec::Ball => (Regularizer::ball_barrier(run.domain.dim())?, false),
                RegularizerSpec::Simplex => (Regularizer::simplex_entropy(run.domain.dim())?, true),
            };
            // norms are taken in the regularizer's own coordinates
            let point = |x: &[f64]| if embed { x[..x.len() - 1].to_vec() } else { x.to_vec() };
            let grad = |g: Vec<f64>| {
                if embed {
                    let last = g[g.len() - 1];
                    g[..g.len() - 1].iter().map(|v| v - last).collect()
                } else {
                    g
                }
            };
            let mut stability = Vec::with_capacity(run.horizon());
            let mut commutator = Vec::with_capacity(run.horizon());
            for (t, f) in run.losses.iter().enumerate() {
                let (x, next) = (&run.xs[t], &run.xs[t + 1]);
                let g_now = norm(&grad(f.grad(x)?));
                stability.push(eta / reg.sigma() * g_now - distance(&point(x), &point(next)));
                if let Some(c) = run.commutators[t] {
                    let g_next = norm(&grad(f.grad(next)?));
                    commutator.push(reg.m() * eta * eta / 6.0 * g_next.powi(3) - c);
                }
            }
            out.ftrl_stability_slack = min_over(stability.into_iter());
            out.ftrl_commutator_slack = min_over(commutator.into_iter());
        }
        _ => {}
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use altreg_core::adversary::{hedge_cycle_regret_oracle, Environment, EnvironmentKind};
    use altreg_core::learners::{Constant, Hedge};

    #[test]
    fn hedge_cycle_run_matches_oracle() {
        let losses = Environment::new(EnvironmentKind::HedgeCycle, 300).unwrap().losses().unwrap();
        let info = LearnerInfo {
            eta: Some(1.0),
            constants: None,
        };
        let mut h = Hedge::new(3, 1.0).unwrap();
        let run = play(&mut h, info, losses, Domain::simplex(3).unwrap(), &PointSpec::BestFixed).unwrap();
        let oracle = hedge_cycle_regret_oracle(1.0, 100);
        assert!((run.regrets.alternating - oracle).abs() <= 1e-9 * oracle);
        let cert = certificates(&LearnerSpec::Hedge { eta: crate::config::Eta::Fixed(1.0) }, &run).unwrap();
        assert!(cert.hold(1e-8), "{cert:?}");
    }

    #[test]
    fn constant_learner_at_the_best_point_has_zero_regret() {
        let losses = Environment::new(EnvironmentKind::HedgeConstant, 50).unwrap().losses().unwrap();
        let mut c = Constant::new(vec![0.0, 1.0, 0.0]);
        let run = play(&mut c, LearnerInfo::default(), losses, Domain::simplex(3).unwrap(), &PointSpec::BestFixed).unwrap();
        assert_eq!(run.regrets.alternating, 0.0);
        assert!(run.commutators.iter().all(Option::is_none));
    }

    #[test]
    fn comparator_outside_domain_is_rejected() {
        let losses = vec![LossFn::linear(vec![1.0, 0.0])];
        let mut c = Constant::new(vec![0.5, 0.5]);
        let err = play(
            &mut c,
            LearnerInfo::default(),
            losses,
            Domain::simplex(2).unwrap(),
            &PointSpec::Point(vec![2.0, 0.0]),
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
