//! Standard, cheating and alternating regret.
//!
//! For decisions `x_1, …, x_{T+1}` and losses `f_1, …, f_T`:
//! `Reg(u) = Σ f_t(x_t) - f_t(u)`, `RegCht(u) = Σ f_t(x_{t+1}) - f_t(u)` and
//! `RegAlt(u) = Reg(u) + RegCht(u)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_dim, Error, Result};
use crate::geometry::{kl, Domain};
use crate::losses::{LossFn, LossSum};
use crate::math::{argmin, cos, dot, norm, sin, softmax, CompensatedSum};

/// Regret values at one comparator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regrets {
    pub standard: f64,
    pub cheating: f64,
    pub alternating: f64,
}

/// Running sums for one player.
#[derive(Debug, Clone)]
pub struct RegretLedger {
    losses: LossSum,
    standard: CompensatedSum,
    cheating: CompensatedSum,
    rounds: usize,
}

impl RegretLedger {
    pub fn new(dim: usize) -> Self {
        RegretLedger {
            losses: LossSum::new(dim),
            standard: CompensatedSum::new(),
            cheating: CompensatedSum::new(),
            rounds: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.losses.dim()
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    /// Records round `round` (1-based): decision `x_t`, loss `f_t`, and the
    /// next decision `x_{t+1}` that the cheating sum charges.
    pub fn record(&mut self, round: usize, x: &[f64], f: &LossFn, next: &[f64]) -> Result<()> {
        if round != self.rounds + 1 {
            return Err(Error::RoundMismatch {
                expected: self.rounds + 1,
                got: round,
            });
        }
        check_dim(self.dim(), x.len())?;
        check_dim(self.dim(), next.len())?;
        let now = f.eval(x)?;
        let later = f.eval(next)?;
        self.losses.add(f)?;
        self.standard.add(now);
        self.cheating.add(later);
        self.rounds += 1;
        Ok(())
    }

    /// `Σ f_t(x_t)`
    pub fn standard_loss(&self) -> f64 {
        self.standard.value()
    }

    /// `Σ f_t(x_{t+1})`
    pub fn cheating_loss(&self) -> f64 {
        self.cheating.value()
    }

    /// `Σ f_t`, for comparator evaluation.
    pub fn losses(&self) -> &LossSum {
        &self.losses
    }

    pub fn comparator_loss(&self, u: &[f64]) -> Result<f64> {
        self.losses.eval(u)
    }

    pub fn at(&self, u: &[f64]) -> Result<Regrets> {
        let benchmark = self.comparator_loss(u)?;
        let standard = self.standard_loss() - benchmark;
        let cheating = self.cheating_loss() - benchmark;
        Ok(Regrets {
            standard,
            cheating,
            alternating: standard + cheating,
        })
    }

    /// Regrets against the best fixed decision in hindsight.
    ///
    /// Exact for linear losses; for curved losses the comparator comes from
    /// [`best_fixed`] and the alternating value is a lower bound on the max.
    pub fn against_best(&self, dom: &Domain) -> Result<(Vec<f64>, Regrets)> {
        if self.rounds == 0 {
            return Ok((dom.center(), self.at(&dom.center())?));
        }
        let (u, _) = best_fixed(&self.losses, dom)?;
        let r = self.at(&u)?;
        Ok((u, r))
    }
}

/// Minimizer of `Σ f_t` over `dom` and its value.
///
/// Linear sums use closed forms, with ties broken by lowest index. Curved
/// sums use accelerated projected gradient, checked against a boundary
/// grid in dimension ≤ 2.
pub fn best_fixed(losses: &LossSum, dom: &Domain) -> Result<(Vec<f64>, f64)> {
    check_dim(dom.dim(), losses.dim())?;
    if losses.count() == 0 {
        return Err(Error::InvalidParameter("best_fixed needs at least one loss".into()));
    }
    if losses.is_linear() {
        let g = losses.linear_part();
        let u = linear_minimizer(&g, dom);
        let v = losses.eval(&u)?;
        return Ok((u, v));
    }
    let (mut u, mut v) = projected_gradient(losses, dom)?;
    if dom.dim() <= 2 {
        for p in boundary_grid(dom) {
            let pv = losses.eval(&p)?;
            if pv < v - 1e-12 * v.abs().max(1.0) {
                u = p;
                v = pv;
            }
        }
    }
    Ok((u, v))
}

/// Minimizer of `<g, x>` over `dom`.
pub fn linear_minimizer(g: &[f64], dom: &Domain) -> Vec<f64> {
    match dom {
        Domain::Simplex { dim } => {
            let mut u = vec![0.0; *dim];
            u[argmin(g)] = 1.0;
            u
        }
        Domain::Ball { radius, .. } => {
            let n = norm(g);
            if n == 0.0 {
                dom.center()
            } else {
                g.iter().map(|v| -v / n * radius).collect()
            }
        }
        Domain::Interval { lo, hi } | Domain::Box { lo, hi, .. } => {
            g.iter().map(|v| if *v < 0.0 { *hi } else { *lo }).collect()
        }
    }
}

/// FISTA with backtracking and adaptive restart.
fn projected_gradient(losses: &LossSum, dom: &Domain) -> Result<(Vec<f64>, f64)> {
    let mut x = dom.center();
    let mut fx = losses.eval(&x)?;
    let mut y = x.clone();
    let mut momentum = 1.0_f64;
    let mut lip = losses.hessian(&x)?.op_norm().max(1e-12);
    for _ in 0..200_000 {
        let fy = losses.eval(&y)?;
        let gy = losses.grad(&y)?;
        let (next, fnext) = loop {
            let step: Vec<f64> = y.iter().zip(&gy).map(|(a, g)| a - g / lip).collect();
            let cand = dom.project(&step)?;
            let d: Vec<f64> = cand.iter().zip(&y).map(|(a, b)| a - b).collect();
            let fc = losses.eval(&cand)?;
            let model = fy + dot(&gy, &d) + 0.5 * lip * dot(&d, &d);
            if fc <= model + 1e-12 * fy.abs().max(1.0) || lip > 1e15 {
                break (cand, fc);
            }
            lip *= 2.0;
        };
        let moved = crate::math::distance(&next, &x);
        if fnext > fx {
            // restart momentum from the last accepted point
            momentum = 1.0;
            y = x.clone();
            if moved < 1e-15 {
                break;
            }
            continue;
        }
        let t_next = (1.0 + crate::math::sqrt(1.0 + 4.0 * momentum * momentum)) / 2.0;
        let beta = (momentum - 1.0) / t_next;
        y = next
            .iter()
            .zip(&x)
            .map(|(a, b)| a + beta * (a - b))
            .collect();
        y = dom.project(&y)?;
        momentum = t_next;
        let small = moved <= 1e-13 * (1.0 + norm(&next));
        x = next;
        fx = fnext;
        if small {
            break;
        }
    }
    Ok((x, fx))
}

/// Points on the boundary of a domain of dimension ≤ 2.
fn boundary_grid(dom: &Domain) -> Vec<Vec<f64>> {
    match dom {
        Domain::Interval { lo, hi } => vec![vec![*lo], vec![*hi]],
        Domain::Box { dim: 1, lo, hi } => vec![vec![*lo], vec![*hi]],
        Domain::Ball { dim: 1, radius } => vec![vec![-radius], vec![*radius]],
        Domain::Ball { dim: 2, radius } => (0..3600)
            .map(|k| {
                let th = k as f64 * core::f64::consts::PI / 1800.0;
                vec![radius * cos(th), radius * sin(th)]
            })
            .collect(),
        Domain::Box { dim: 2, lo, hi } => {
            let n = 1000;
            let mut out = Vec::with_capacity(4 * n);
            for k in 0..=n {
                let s = lo + (hi - lo) * k as f64 / n as f64;
                out.push(vec![s, *lo]);
                out.push(vec![s, *hi]);
                out.push(vec![*lo, s]);
                out.push(vec![*hi, s]);
            }
            out
        }
        Domain::Simplex { dim: 2 } => (0..=1000)
            .map(|k| {
                let s = k as f64 / 1000.0;
                vec![s, 1.0 - s]
            })
            .collect(),
        _ => Vec::new(),
    }
}

/// `|RegAlt(u) - identity(u)|` for a Hedge trace, where the identity is
/// `2(KL(u,p_1) - KL(u,p_{T+1}))/η + (1/η) Σ_t (KL(p_t,p_{t+1}) - KL(p_{t+1},p_t))`.
///
/// `trace` holds `p_1, …, p_{T+1}` and `losses` holds `ℓ_1, …, ℓ_T`.
/// Zero entries of `u` are handled as the limit `0 ln 0 = 0`.
pub fn hedge_identity_gap(trace: &[Vec<f64>], losses: &[Vec<f64>], eta: f64, u: &[f64]) -> Result<f64> {
    if losses.is_empty() || trace.len() != losses.len() + 1 {
        return Err(Error::IncompleteTrace(alloc::format!(
            "{} decisions for {} losses",
            trace.len(),
            losses.len()
        )));
    }
    let d = trace[0].len();
    check_dim(d, u.len())?;
    for (p, l) in trace.iter().zip(losses) {
        check_dim(d, p.len())?;
        check_dim(d, l.len())?;
    }
    check_dim(d, trace[losses.len()].len())?;

    // p_2 ∝ p_1 e^{-η ℓ_1}
    let scores: Vec<f64> = trace[0]
        .iter()
        .zip(&losses[0])
        .map(|(p, l)| crate::math::ln(*p) - eta * l)
        .collect();
    let p2 = softmax(&scores);
    let deviation = p2
        .iter()
        .zip(&trace[1])
        .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
    if !(deviation <= 1e-9) {
        return Err(Error::TraceMismatch { deviation });
    }

    let mut direct = CompensatedSum::new();
    let mut commutators = CompensatedSum::new();
    for (t, l) in losses.iter().enumerate() {
        direct.add(dot(&trace[t], l) + dot(&trace[t + 1], l) - 2.0 * dot(u, l));
        commutators.add(kl(&trace[t], &trace[t + 1]) - kl(&trace[t + 1], &trace[t]));
    }
    let last = &trace[losses.len()];
    let identity = 2.0 * (kl(u, &trace[0]) - kl(u, last)) / eta + commutators.value() / eta;
    Ok((direct.value() - identity).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_round_example() {
        let mut l = RegretLedger::new(2);
        l.record(1, &[1.0, 0.0], &LossFn::linear(vec![1.0, 0.0]), &[0.0, 1.0])
            .unwrap();
        let r = l.at(&[0.0, 1.0]).unwrap();
        assert_eq!((r.standard, r.cheating, r.alternating), (1.0, 0.0, 1.0));
    }

    #[test]
    fn rounds_must_be_in_order() {
        let mut l = RegretLedger::new(1);
        let f = LossFn::linear(vec![1.0]);
        let err = l.record(2, &[0.0], &f, &[0.0]).unwrap_err();
        assert!(matches!(err, Error::RoundMismatch { expected: 1, got: 2 }));
    }

    #[test]
    fn linear_closed_forms() {
        let mut s = LossSum::new(3);
        s.add(&LossFn::linear(vec![1.0, 0.0, 0.0])).unwrap();
        s.add(&LossFn::linear(vec![0.0, 1.0, 0.0])).unwrap();
        s.add(&LossFn::linear(vec![0.0, 0.0, 1.0])).unwrap();
        let (u, v) = best_fixed(&s, &Domain::simplex(3).unwrap()).unwrap();
        assert_eq!(u, vec![1.0, 0.0, 0.0]);
        assert_eq!(v, 1.0);

        let mut b = LossSum::new(2);
        b.add(&LossFn::linear(vec![3.0, 4.0])).unwrap();
        let (u, v) = best_fixed(&b, &Domain::ball(2, 2.0).unwrap()).unwrap();
        assert!((u[0] + 1.2).abs() < 1e-15 && (u[1] + 1.6).abs() < 1e-15);
        assert!((v + 10.0).abs() < 1e-12);
    }

    #[test]
    fn quadratic_against_dense_grid() {
        let mut s = LossSum::new(2);
        s.add(&LossFn::quadratic(&[vec![1.0, 0.3], vec![0.3, 0.5]], vec![-4.0, 1.0], 0.2).unwrap())
            .unwrap();
        let dom = Domain::unit_ball(2).unwrap();
        let (u, v) = best_fixed(&s, &dom).unwrap();
        assert!(dom.contains(&u));
        let mut best = f64::INFINITY;
        for i in 0..=400 {
            for j in 0..3600 {
                let r = i as f64 / 400.0;
                let th = j as f64 * core::f64::consts::PI / 1800.0;
                best = best.min(s.eval(&[r * th.cos(), r * th.sin()]).unwrap());
            }
        }
        assert!(v <= best + 1e-8, "{v} vs grid {best}");
        assert!(best - v < 1e-4);
    }

    #[test]
    fn squared_norm_minimized_at_origin() {
        let mut s = LossSum::new(2);
        s.add(&LossFn::quadratic(&[vec![1.0, 0.0], vec![0.0, 1.0]], vec![0.0, 0.0], 0.0).unwrap())
            .unwrap();
        let (u, v) = best_fixed(&s, &Domain::unit_ball(2).unwrap()).unwrap();
        assert!(norm(&u) < 1e-12 && v.abs() < 1e-20);
    }

    #[test]
    fn identity_single_step() {
        let eta = 0.7;
        let p1 = vec![1.0 / 3.0; 3];
        let l = vec![0.2, 0.9, 0.4];
        let scores: Vec<f64> = l.iter().map(|v| -eta * v).collect();
        let p2 = softmax(&scores);
        let gap = hedge_identity_gap(&[p1.clone(), p2], &[l], eta, &p1).unwrap();
        assert!(gap <= 1e-12);
    }

    #[test]
    fn identity_rejects_wrong_eta() {
        let p1 = vec![0.5, 0.5];
        let l = vec![1.0, 0.0];
        let p2 = softmax(&[-0.5, 0.0]);
        let err = hedge_identity_gap(&[p1.clone(), p2], &[l], 0.25, &p1).unwrap_err();
        assert!(matches!(err, Error::TraceMismatch { .. }));
    }
}
