//! Turning config specs into core objects.

use altreg_core::adversary::{Environment, EnvironmentKind};
use altreg_core::geometry::{Domain, Regularizer};
use altreg_core::learners::{rates, Constant, ContinuousHedge, Ftrl, Hedge, Learner, Oogd, PrmPlus};
use altreg_core::losses::{Constants, LossFn, LossSum};
use altreg_core::regret::best_fixed;

use crate::config::{ConstantsSpec, DomainSpec, EnvSpec, Eta, LearnerSpec, PointSpec, RegularizerSpec};
use crate::error::{HarnessError, Result};
use crate::format::read_losses;

/// Materializes the first `horizon` losses of an environment.
///
/// `seed` fills in environments that leave their own seed unset. A
/// `pm-alternating` environment with odd horizon is cut to even length.
pub fn environment_losses(spec: &EnvSpec, horizon: usize, seed: u64, at: &str) -> Result<Vec<LossFn>> {
    let kind = match spec {
        EnvSpec::HedgeCycle {} => EnvironmentKind::HedgeCycle,
        EnvSpec::HedgeConstant {} => EnvironmentKind::HedgeConstant,
        EnvSpec::PmAlternating {} => EnvironmentKind::PmAlternating,
        EnvSpec::RandomBounded { dim, seed: s, lo, hi } => EnvironmentKind::RandomBounded {
            dim: *dim,
            seed: s.unwrap_or(seed),
            lo: *lo,
            hi: *hi,
        },
        EnvSpec::ConstantLinear { ell } => EnvironmentKind::ConstantLinear { ell: ell.clone() },
        EnvSpec::CycleLinear { period } => EnvironmentKind::CycleLinear { period: period.clone() },
        EnvSpec::RandomQuadratic {
            seed: s,
            curvature,
            center,
            spread,
        } => EnvironmentKind::RandomQuadratic {
            seed: s.unwrap_or(seed),
            curvature: *curvature,
            center: center.clone(),
            spread: *spread,
        },
        EnvSpec::File { path } => {
            let mut losses = read_losses(path)?;
            if losses.len() < horizon {
                return Err(HarnessError::validation(
                    format!("{at}.path"),
                    format!("file holds {} losses, horizon {horizon} requested", losses.len()),
                ));
            }
            losses.truncate(horizon);
            return Ok(losses);
        }
    };
    let env = Environment::new(kind, horizon).map_err(|e| HarnessError::validation(at, e.to_string()))?;
    if env.truncated() {
        log::warn!("{at}: horizon {horizon} truncated to {}", env.horizon());
    }
    Ok(env.losses()?)
}

/// The decision set: the configured one, or the natural one for the learner.
pub fn decision_domain(spec: Option<&DomainSpec>, learner: &LearnerSpec, dim: usize) -> Result<Domain> {
    let dom = match spec {
        Some(d) => d.build().map_err(|e| HarnessError::validation("domain", e.to_string()))?,
        None => match learner {
            LearnerSpec::Ftrl {
                regularizer: RegularizerSpec::Ball,
                ..
            } => Domain::unit_ball(dim)?,
            LearnerSpec::ContinuousHedge { .. } if dim == 1 => Domain::interval(-1.0, 1.0)?,
            LearnerSpec::ContinuousHedge { .. } => Domain::unit_ball(dim)?,
            _ => Domain::simplex(dim)?,
        },
    };
    if dom.dim() != dim {
        return Err(HarnessError::validation(
            "domain",
            format!("domain has dimension {}, losses have {dim}", dom.dim()),
        ));
    }
    Ok(dom)
}

/// Learning rate and loss constants a learner was built with.
#[derive(Debug, Clone, Copy, Default)]
pub struct LearnerInfo {
    pub eta: Option<f64>,
    pub constants: Option<Constants>,
}

/// Largest certified constants over a loss sequence.
pub fn certify_all(losses: &[LossFn], dom: &Domain) -> altreg_core::Result<Constants> {
    let mut c = Constants {
        lipschitz: 0.0,
        smoothness: 0.0,
        self_concordance: 0.0,
    };
    for f in losses {
        c = c.max(f.certify(dom)?);
    }
    Ok(c)
}

fn resolve(eta: Eta, default: impl FnOnce() -> altreg_core::Result<f64>, at: &str) -> Result<f64> {
    match eta {
        Eta::Fixed(v) => Ok(v),
        Eta::Paper => default().map_err(|e| HarnessError::validation(format!("{at}.eta"), e.to_string())),
    }
}

fn require_simplex(dom: &Domain, at: &str, who: &str) -> Result<usize> {
    match dom {
        Domain::Simplex { dim } => Ok(*dim),
        _ => Err(HarnessError::validation(at, format!("{who} plays on the simplex"))),
    }
}

/// Builds a learner for `horizon` rounds against `losses` (used only for
/// constants and the best fixed point).
pub fn build_learner(
    spec: &LearnerSpec,
    dom: &Domain,
    horizon: usize,
    losses: &[LossFn],
    at: &str,
) -> Result<(Box<dyn Learner>, LearnerInfo)> {
    let mut info = LearnerInfo::default();
    let learner: Box<dyn Learner> = match spec {
        LearnerSpec::Hedge { eta } => {
            let d = require_simplex(dom, at, "hedge")?;
            let eta = resolve(*eta, || rates::hedge(horizon, d), at)?;
            info.eta = Some(eta);
            Box::new(Hedge::new(d, eta)?)
        }
        LearnerSpec::Ftrl {
            regularizer,
            eta,
            constants,
        } => {
            let reg = match (regularizer, dom) {
                (RegularizerSpec::Ball, Domain::Ball { dim, radius }) if *radius == 1.0 => Regularizer::ball_barrier(*dim)?,
                (RegularizerSpec::Simplex, Domain::Simplex { dim }) => Regularizer::simplex_entropy(*dim)?,
                (RegularizerSpec::Ball, _) => {
                    return Err(HarnessError::validation(at, "the ball regularizer needs the unit ball domain"))
                }
                (RegularizerSpec::Simplex, _) => {
                    return Err(HarnessError::validation(at, "the simplex regularizer needs the simplex domain"))
                }
            };
            let c = match constants {
                Some(ConstantsSpec {
                    lipschitz,
                    smoothness,
                    self_concordance,
                }) => Constants {
                    lipschitz: *lipschitz,
                    smoothness: *smoothness,
                    self_concordance: *self_concordance,
                },
                None => certify_all(losses, dom)?,
            };
            info.constants = Some(c);
            let eta = resolve(
                *eta,
                || match regularizer {
                    RegularizerSpec::Ball => rates::ftrl_ball(horizon, c),
                    RegularizerSpec::Simplex => rates::ftrl_simplex(horizon, dom.dim(), c),
                },
                at,
            )?;
            info.eta = Some(eta);
            Box::new(Ftrl::new(reg, eta)?)
        }
        LearnerSpec::ContinuousHedge { eta, max_level } => {
            let eta = resolve(*eta, || rates::continuous_hedge(horizon, dom.dim()), at)?;
            info.eta = Some(eta);
            let c = ContinuousHedge::new(dom.clone(), eta).map_err(|e| HarnessError::validation(at, e.to_string()))?;
            Box::new(match max_level {
                Some(l) => c.with_max_level(*l),
                None => c,
            })
        }
        LearnerSpec::Oogd { eta } => {
            let d = require_simplex(dom, at, "oogd")?;
            let eta = resolve(*eta, || rates::oogd(horizon), at)?;
            info.eta = Some(eta);
            Box::new(Oogd::new(d, eta)?)
        }
        LearnerSpec::PrmPlus {} => Box::new(PrmPlus::new(require_simplex(dom, at, "prm-plus")?)?),
        LearnerSpec::Constant { point } => {
            let p = match point {
                PointSpec::Point(p) => {
                    if !dom.contains(p) {
                        return Err(HarnessError::validation(format!("{at}.point"), "point lies outside the domain"));
                    }
                    p.clone()
                }
                PointSpec::BestFixed => best_fixed(&sum(losses, dom.dim())?, dom)?.0,
            };
            Box::new(Constant::new(p))
        }
    };
    Ok((learner, info))
}

pub fn sum(losses: &[LossFn], dim: usize) -> altreg_core::Result<LossSum> {
    let mut s = LossSum::new(dim);
    for f in losses {
        s.add(f)?;
    }
    Ok(s)
}
