//! Loss-sequence generators and closed-form regret oracles for the
//! lower-bound constructions.
//!
//! Rounds are 1-based throughout.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::learners::{Learner, PrmPlus};
use crate::linalg::SymMatrix;
use crate::losses::{LossFn, QuadraticLoss};
use crate::math::{exp, exp_m1, round, sqrt, CompensatedSum};
use crate::rng::{nth, unit_f64};

#[derive(Debug, Clone, PartialEq)]
pub enum EnvironmentKind {
    /// `(1,0,0), (0,1,0), (0,0,1)` repeated.
    HedgeCycle,
    /// `(1,0,0)` every round.
    HedgeConstant,
    /// `ℓ_t = (-2, 0)` for odd `t` and `(4, 0)` for even `t`.
    PmAlternating,
    /// Linear losses with i.i.d. uniform coordinates in `[lo, hi]`.
    RandomBounded { dim: usize, seed: u64, lo: f64, hi: f64 },
    /// The same linear loss every round.
    ConstantLinear { ell: Vec<f64> },
    /// Linear losses cycling through a fixed list.
    CycleLinear { period: Vec<Vec<f64>> },
    /// `f_t(x) = a_t ‖x - c_t‖²` with `a_t` uniform in
    /// `[curvature/2, curvature]` and `c_t` uniform in the cube of half-width
    /// `spread` around `center`.
    RandomQuadratic {
        seed: u64,
        curvature: f64,
        center: Vec<f64>,
        spread: f64,
    },
}

/// A loss sequence of fixed horizon. Losses are pure functions of
/// `(kind, t)`, so an environment can be queried in any order.
#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    kind: EnvironmentKind,
    horizon: usize,
    truncated: bool,
}

impl Environment {
    /// `PmAlternating` horizons are truncated to an even length; see
    /// [`Environment::truncated`].
    pub fn new(kind: EnvironmentKind, horizon: usize) -> Result<Self> {
        let invalid = |m: &str| Err(Error::InvalidParameter(m.into()));
        match &kind {
            EnvironmentKind::RandomBounded { dim, lo, hi, .. } => {
                if *dim == 0 {
                    return invalid("random environment needs dim >= 1");
                }
                if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
                    return invalid("random environment needs finite lo <= hi");
                }
            }
            EnvironmentKind::ConstantLinear { ell } => {
                if ell.is_empty() {
                    return invalid("constant loss must be nonempty");
                }
            }
            EnvironmentKind::CycleLinear { period } => {
                let d = period.first().map_or(0, |v| v.len());
                if d == 0 || period.iter().any(|v| v.len() != d) {
                    return invalid("cycle needs nonempty losses of equal length");
                }
            }
            EnvironmentKind::RandomQuadratic {
                curvature,
                center,
                spread,
                ..
            }
                if (center.is_empty() || !(*curvature >= 0.0) || !(*spread >= 0.0)) => {
                    return invalid("random quadratic needs a center, curvature >= 0 and spread >= 0");
                }
            _ => {}
        }
        let (horizon, truncated) = match kind {
            EnvironmentKind::PmAlternating if horizon % 2 == 1 => (horizon - 1, true),
            _ => (horizon, false),
        };
        Ok(Environment {
            kind,
            horizon,
            truncated,
        })
    }

    pub fn kind(&self) -> &EnvironmentKind {
        &self.kind
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// True when a trailing round was dropped to keep the horizon even.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            EnvironmentKind::HedgeCycle | EnvironmentKind::HedgeConstant => 3,
            EnvironmentKind::PmAlternating => 2,
            EnvironmentKind::RandomBounded { dim, .. } => *dim,
            EnvironmentKind::ConstantLinear { ell } => ell.len(),
            EnvironmentKind::CycleLinear { period } => period[0].len(),
            EnvironmentKind::RandomQuadratic { center, .. } => center.len(),
        }
    }

    /// Loss of round `t` (1-based).
    pub fn loss(&self, t: usize) -> Result<LossFn> {
        if t == 0 || t > self.horizon {
            return Err(Error::InvalidParameter(format!(
                "round {t} outside 1..={}",
                self.horizon
            )));
        }
        Ok(match &self.kind {
            EnvironmentKind::HedgeCycle => {
                let mut e = vec![0.0; 3];
                e[(t - 1) % 3] = 1.0;
                LossFn::linear(e)
            }
            EnvironmentKind::HedgeConstant => LossFn::linear(vec![1.0, 0.0, 0.0]),
            EnvironmentKind::PmAlternating => {
                if t % 2 == 1 {
                    LossFn::linear(vec![-2.0, 0.0])
                } else {
                    LossFn::linear(vec![4.0, 0.0])
                }
            }
            EnvironmentKind::RandomBounded { dim, seed, lo, hi } => {
                let base = (t as u64 - 1) * *dim as u64;
                LossFn::linear(
                    (0..*dim as u64)
                        .map(|i| lo + (hi - lo) * unit_f64(nth(*seed, base + i)))
                        .collect(),
                )
            }
            EnvironmentKind::ConstantLinear { ell } => LossFn::linear(ell.clone()),
            EnvironmentKind::CycleLinear { period } => LossFn::linear(period[(t - 1) % period.len()].clone()),
            EnvironmentKind::RandomQuadratic {
                seed,
                curvature,
                center,
                spread,
            } => {
                let d = center.len();
                let base = (t as u64 - 1) * (d as u64 + 1);
                let a = curvature * (0.5 + 0.5 * unit_f64(nth(*seed, base)));
                let c: Vec<f64> = center
                    .iter()
                    .enumerate()
                    .map(|(i, m)| m + spread * (2.0 * unit_f64(nth(*seed, base + 1 + i as u64)) - 1.0))
                    .collect();
                let mut q = SymMatrix::identity(d);
                q.scale(a);
                let b = c.iter().map(|v| -2.0 * a * v).collect();
                let cc = a * c.iter().map(|v| v * v).sum::<f64>();
                LossFn::Quadratic(QuadraticLoss::from_sym(q, b, cc)?)
            }
        })
    }

    pub fn losses(&self) -> Result<Vec<LossFn>> {
        (1..=self.horizon).map(|t| self.loss(t)).collect()
    }
}

/// Hedge's alternating regret on `cycles` full cycles of [`EnvironmentKind::HedgeCycle`]:
/// `T (1 - e^{-η})² / (3 (2 + e^{-η}) (1 + 2e^{-η}))`.
pub fn hedge_cycle_regret_oracle(eta: f64, cycles: usize) -> f64 {
    let e = exp(-eta);
    let gap = -exp_m1(-eta);
    cycles as f64 * gap * gap / (3.0 * (2.0 + e) * (1.0 + 2.0 * e))
}

/// `η² T / 108`, valid for `η ≤ 1`.
pub fn hedge_cycle_lower_bound(eta: f64, cycles: usize) -> f64 {
    eta * eta * cycles as f64 / 108.0
}

/// Hedge's alternating regret on `horizon` rounds of
/// [`EnvironmentKind::HedgeConstant`]: `Σ_{t=0}^T 2q_t - 1/3 - q_T` with
/// `q_s = e^{-ηs} / (2 + e^{-ηs})`, the weight of the losing expert after
/// `s` rounds.
pub fn hedge_constant_regret_oracle(eta: f64, horizon: usize) -> f64 {
    let q = |s: usize| {
        let e = exp(-eta * s as f64);
        e / (2.0 + e)
    };
    let mut acc = CompensatedSum::new();
    for s in 0..=horizon {
        acc.add(2.0 * q(s));
    }
    acc.add(-1.0 / 3.0);
    acc.add(-q(horizon));
    acc.value()
}

/// `e^{-1} / (3η)`, valid for `2/T ≤ η ≤ 1`.
pub fn hedge_constant_lower_bound(eta: f64) -> f64 {
    exp(-1.0) / (3.0 * eta)
}

/// Closed-form OOGD iterate on [`EnvironmentKind::PmAlternating`].
///
/// Requires `1/η` to be an even integer. Defined for `t ≤ 1/η - 3` and
/// `t ≥ 1/η + 6`; rounds in between return [`Error::TransitionWindow`].
pub fn oogd_iterate_oracle(eta: f64, t: usize) -> Result<[f64; 2]> {
    let inv = 1.0 / eta;
    let n = round(inv);
    if !(eta > 0.0) || (inv - n).abs() > 1e-9 * inv || n < 2.0 || n % 2.0 != 0.0 {
        return Err(Error::InvalidParameter(format!(
            "1/eta must be an even integer, got {inv}"
        )));
    }
    if t == 0 {
        return Err(Error::InvalidParameter("rounds start at 1".into()));
    }
    let n = n as usize;
    let k = (t / 2) as f64;
    if t + 3 <= n {
        if t == 1 {
            return Ok([0.5, 0.5]);
        }
        let first = if t.is_multiple_of(2) {
            0.5 - k * eta + 3.0 * eta
        } else {
            0.5 - k * eta - 2.0 * eta
        };
        return Ok([first, 1.0 - first]);
    }
    if t >= n + 6 {
        return Ok(if t.is_multiple_of(2) { [2.0 * eta, 1.0 - 2.0 * eta] } else { [0.0, 1.0] });
    }
    Err(Error::TransitionWindow {
        t,
        lo: (n - 3) as f64,
        hi: (n + 6) as f64,
    })
}

/// Leading terms of OOGD's alternating regret on
/// [`EnvironmentKind::PmAlternating`]: `1/(2η) + 2ηT - 2 - 20η`.
/// The remainder from the transition window is a bounded constant.
pub fn oogd_regret_oracle(eta: f64, horizon: usize) -> f64 {
    1.0 / (2.0 * eta) + 2.0 * eta * horizon as f64 - 2.0 - 20.0 * eta
}

/// `α_5` from PRM+ on the first ten rounds of
/// [`EnvironmentKind::PmAlternating`]: `R_{11,2} / 4`.
pub fn prm_alpha5() -> Result<f64> {
    let env = Environment::new(EnvironmentKind::PmAlternating, 10)?;
    let mut p = PrmPlus::new(2)?;
    for t in 1..=10 {
        p.act()?;
        p.observe(&env.loss(t)?)?;
    }
    Ok(p.regrets()[1] / 4.0)
}

/// `α_k` from `α_{k+1} = α_k + 1/(1 + α_k)`, starting at `α_5`.
pub fn prm_alpha_oracle(alpha5: f64, k: usize) -> Result<f64> {
    if !(alpha5 > 2.0) {
        return Err(Error::Inconsistent(format!("alpha_5 = {alpha5} is not above 2")));
    }
    if k < 5 {
        return Err(Error::InvalidParameter(format!("alpha_k is defined for k >= 5, got {k}")));
    }
    let mut a = alpha5;
    for _ in 5..k {
        a += 1.0 / (1.0 + a);
    }
    Ok(a)
}

/// `2√k - 1`
pub fn prm_alpha_bound(k: usize) -> f64 {
    2.0 * sqrt(k as f64) - 1.0
}

/// PRM+ state on [`EnvironmentKind::PmAlternating`] around rounds
/// `2k+1` and `2k+2`, for `k ≥ 5`, as functions of `α_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrmClosedForm {
    /// `p_{2k+1}`
    pub p_odd: [f64; 2],
    /// `p_{2k+2}`
    pub p_even: [f64; 2],
    /// `R_{2k+2}`
    pub r_even: [f64; 2],
    /// `R_{2k+3}`
    pub r_next_odd: [f64; 2],
    /// `R̂_{2k+2}`
    pub rhat_even: [f64; 2],
    /// `R̂_{2k+3}`
    pub rhat_next_odd: [f64; 2],
}

pub fn prm_closed_form(alpha: f64) -> PrmClosedForm {
    let s = 1.0 + alpha;
    PrmClosedForm {
        p_odd: [0.0, 1.0],
        p_even: [1.0 / s, alpha / s],
        r_even: [2.0, 4.0 * alpha],
        r_next_odd: [0.0, 4.0 * alpha + 4.0 / s],
        rhat_even: [4.0, 4.0 * alpha],
        rhat_next_odd: [0.0, 4.0 * alpha + 8.0 / s],
    }
}

/// `Σ_{k=5}^{T/2} 1/√k`, the growing part of the PRM+ lower bound.
pub fn prm_regret_growth(horizon: usize) -> f64 {
    let mut acc = CompensatedSum::new();
    for k in 5..=horizon / 2 {
        acc.add(1.0 / sqrt(k as f64));
    }
    acc.value()
}
