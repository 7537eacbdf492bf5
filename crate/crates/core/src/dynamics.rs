//! Two-player games played by a pair of learners, with equilibrium
//! certificates.
//!
//! `u1(x, y)` is the loss of the x-player and `u2(x, y)` the loss of the
//! y-player. The game is zero-sum when `u2 = -u1`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_dim, Error, Result};
use crate::geometry::Domain;
use crate::learners::Learner;
use crate::linalg::SymMatrix;
use crate::losses::{LossFn, LossSum, QuadraticLoss};
use crate::math::{cos, dot, sin};
use crate::regret::{best_fixed, RegretLedger, Regrets};

/// `zᵀ Q z + bᵀ z + c` in the joint variable `z = (x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointQuadratic {
    pub q: SymMatrix,
    pub b: Vec<f64>,
    pub c: f64,
}

impl JointQuadratic {
    pub fn new(q: &[Vec<f64>], b: Vec<f64>, c: f64) -> Result<Self> {
        let q = SymMatrix::symmetrized(q)?;
        check_dim(q.dim(), b.len())?;
        Ok(JointQuadratic { q, b, c })
    }

    fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        let z: Vec<f64> = x.iter().chain(y).cloned().collect();
        self.q.quad_form(&z) + dot(&self.b, &z) + self.c
    }

    fn scaled(&self, s: f64) -> Self {
        let mut q = self.q.clone();
        q.scale(s);
        JointQuadratic {
            q,
            b: self.b.iter().map(|v| s * v).collect(),
            c: s * self.c,
        }
    }

    /// Restriction to the block `[lo, lo + n)` with the other block fixed.
    fn restrict(&self, lo: usize, n: usize, fixed_lo: usize, fixed: &[f64]) -> (SymMatrix, Vec<f64>, f64) {
        let mut a = SymMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                a.set(i, j, self.q.get(lo + i, lo + j));
            }
        }
        let m = fixed.len();
        let b: Vec<f64> = (0..n)
            .map(|i| {
                let cross: f64 = (0..m).map(|j| self.q.get(lo + i, fixed_lo + j) * fixed[j]).sum();
                self.b[lo + i] + 2.0 * cross
            })
            .collect();
        let mut c = self.c;
        for i in 0..m {
            c += self.b[fixed_lo + i] * fixed[i];
            for j in 0..m {
                c += fixed[i] * self.q.get(fixed_lo + i, fixed_lo + j) * fixed[j];
            }
        }
        (a, b, c)
    }

    fn is_negation_of(&self, other: &JointQuadratic) -> bool {
        let n = self.q.dim();
        (0..n).all(|i| (0..n).all(|j| (self.q.get(i, j) + other.q.get(i, j)).abs() <= 1e-12))
            && self.b.iter().zip(&other.b).all(|(a, b)| (a + b).abs() <= 1e-12)
            && (self.c + other.c).abs() <= 1e-12
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GameKind {
    /// `u1 = xᵀ A y`, `u2 = xᵀ B y` over two simplices.
    Bilinear { a: Vec<Vec<f64>>, b: Vec<Vec<f64>> },
    ConvexQuadratic { u1: JointQuadratic, u2: JointQuadratic },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Game {
    kind: GameKind,
    x_domain: Domain,
    y_domain: Domain,
    scale: f64,
    zero_sum: bool,
}

impl Game {
    /// Zero-sum matrix game: the x-player pays `xᵀ A y`.
    pub fn matrix(a: Vec<Vec<f64>>) -> Result<Self> {
        let b = a.iter().map(|r| r.iter().map(|v| -v).collect()).collect();
        Game::bimatrix(a, b)
    }

    /// General-sum matrix game with loss matrices `A` (x-player) and `B`
    /// (y-player).
    pub fn bimatrix(a: Vec<Vec<f64>>, b: Vec<Vec<f64>>) -> Result<Self> {
        let rows = a.len();
        let cols = a.first().map_or(0, |r| r.len());
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter("empty payoff matrix".into()));
        }
        check_dim(rows, b.len())?;
        for r in a.iter().chain(&b) {
            check_dim(cols, r.len())?;
            if r.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter("payoffs must be finite".into()));
            }
        }
        let zero_sum = a
            .iter()
            .flatten()
            .zip(b.iter().flatten())
            .all(|(x, y)| (x + y).abs() <= 1e-12);
        let mut game = Game {
            kind: GameKind::Bilinear { a, b },
            x_domain: Domain::simplex(rows)?,
            y_domain: Domain::simplex(cols)?,
            scale: 1.0,
            zero_sum,
        };
        game.normalize();
        Ok(game)
    }

    /// Quadratic game over arbitrary domains. `u1` must be convex in `x`
    /// and `u2` convex in `y`.
    pub fn quadratic(u1: JointQuadratic, u2: JointQuadratic, x_domain: Domain, y_domain: Domain) -> Result<Self> {
        let (dx, dy) = (x_domain.dim(), y_domain.dim());
        check_dim(dx + dy, u1.q.dim())?;
        check_dim(dx + dy, u2.q.dim())?;
        let (axx, _, _) = u1.restrict(0, dx, dx, &vec![0.0; dy]);
        if axx.min_eigenvalue() < -1e-9 {
            return Err(Error::Domain("u1 is not convex in x".into()));
        }
        let (ayy, _, _) = u2.restrict(dx, dy, 0, &vec![0.0; dx]);
        if ayy.min_eigenvalue() < -1e-9 {
            return Err(Error::Domain("u2 is not convex in y".into()));
        }
        let zero_sum = u1.is_negation_of(&u2);
        let mut game = Game {
            kind: GameKind::ConvexQuadratic { u1, u2 },
            x_domain,
            y_domain,
            scale: 1.0,
            zero_sum,
        };
        game.normalize();
        Ok(game)
    }

    /// Rescales payoffs into `[-1, 1]` when a sample exceeds that range.
    fn normalize(&mut self) {
        let xs = sample_points(&self.x_domain);
        let ys = sample_points(&self.y_domain);
        let mut peak: f64 = 0.0;
        for x in &xs {
            for y in &ys {
                let (a, b) = self.payoffs(x, y);
                peak = peak.max(a.abs()).max(b.abs());
            }
        }
        if peak > 1.0 {
            let s = 1.0 / peak;
            self.scale = s;
            self.kind = match &self.kind {
                GameKind::Bilinear { a, b } => GameKind::Bilinear {
                    a: a.iter().map(|r| r.iter().map(|v| s * v).collect()).collect(),
                    b: b.iter().map(|r| r.iter().map(|v| s * v).collect()).collect(),
                },
                GameKind::ConvexQuadratic { u1, u2 } => GameKind::ConvexQuadratic {
                    u1: u1.scaled(s),
                    u2: u2.scaled(s),
                },
            };
        }
    }

    pub fn kind(&self) -> &GameKind {
        &self.kind
    }

    pub fn x_domain(&self) -> &Domain {
        &self.x_domain
    }

    pub fn y_domain(&self) -> &Domain {
        &self.y_domain
    }

    /// Factor applied to the payoffs given at construction (1 if none).
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn is_zero_sum(&self) -> bool {
        self.zero_sum
    }

    /// `(u1(x, y), u2(x, y))`
    pub fn payoffs(&self, x: &[f64], y: &[f64]) -> (f64, f64) {
        match &self.kind {
            GameKind::Bilinear { a, b } => (bilinear(a, x, y), bilinear(b, x, y)),
            GameKind::ConvexQuadratic { u1, u2 } => (u1.eval(x, y), u2.eval(x, y)),
        }
    }

    /// `u1(·, y)` as a loss for the x-player.
    ///
    /// Constant terms are dropped when the result is linear; they cancel in
    /// every regret.
    pub fn x_loss(&self, y: &[f64]) -> Result<LossFn> {
        check_dim(self.y_domain.dim(), y.len())?;
        let dx = self.x_domain.dim();
        match &self.kind {
            GameKind::Bilinear { a, .. } => Ok(LossFn::linear(a.iter().map(|r| dot(r, y)).collect())),
            GameKind::ConvexQuadratic { u1, .. } => joint_loss(u1.restrict(0, dx, dx, y)),
        }
    }

    /// `u2(x, ·)` as a loss for the y-player.
    pub fn y_loss(&self, x: &[f64]) -> Result<LossFn> {
        check_dim(self.x_domain.dim(), x.len())?;
        let (dx, dy) = (self.x_domain.dim(), self.y_domain.dim());
        match &self.kind {
            GameKind::Bilinear { b, .. } => Ok(LossFn::linear(
                (0..dy).map(|j| (0..dx).map(|i| x[i] * b[i][j]).sum()).collect(),
            )),
            GameKind::ConvexQuadratic { u2, .. } => joint_loss(u2.restrict(dx, dy, 0, x)),
        }
    }
}

fn bilinear(m: &[Vec<f64>], x: &[f64], y: &[f64]) -> f64 {
    m.iter().zip(x).map(|(r, xi)| xi * dot(r, y)).sum()
}

fn joint_loss((a, b, c): (SymMatrix, Vec<f64>, f64)) -> Result<LossFn> {
    if a.is_zero() {
        Ok(LossFn::linear(b))
    } else {
        Ok(LossFn::Quadratic(QuadraticLoss::from_sym(a, b, c)?))
    }
}

/// A few points per domain: center, extreme points and boundary samples.
fn sample_points(dom: &Domain) -> Vec<Vec<f64>> {
    let mut out = vec![dom.center()];
    if let Some(v) = dom.vertices() {
        out.extend(v);
        return out;
    }
    if let Domain::Ball { dim, radius } = dom {
        if *dim == 2 {
            out.extend((0..64).map(|k| {
                let th = k as f64 * core::f64::consts::PI / 32.0;
                vec![radius * cos(th), radius * sin(th)]
            }));
        } else {
            for i in 0..*dim {
                for s in [-1.0, 1.0] {
                    let mut e = vec![0.0; *dim];
                    e[i] = s * radius;
                    out.push(e);
                }
            }
        }
    }
    out
}

/// Decisions and regret ledgers of an alternating run.
#[derive(Debug, Clone)]
pub struct DynamicTrace {
    /// `x_1, …, x_{T+1}`
    pub xs: Vec<Vec<f64>>,
    /// `y_0, …, y_T`
    pub ys: Vec<Vec<f64>>,
    pub ledger_x: RegretLedger,
    pub ledger_y: RegretLedger,
}

impl DynamicTrace {
    pub fn horizon(&self) -> usize {
        self.ledger_x.rounds()
    }

    /// `(1/T) Σ_{t=1}^T x_t`
    pub fn average_x(&self) -> Vec<f64> {
        average(&self.xs[..self.horizon()])
    }

    /// `(1/T) Σ_{t=1}^T y_t`
    pub fn average_y(&self) -> Vec<f64> {
        average(&self.ys[1..=self.horizon()])
    }

    /// Regrets of both players against their best fixed decisions.
    pub fn regrets(&self, game: &Game) -> Result<(Regrets, Regrets)> {
        let (_, rx) = self.ledger_x.against_best(game.x_domain())?;
        let (_, ry) = self.ledger_y.against_best(game.y_domain())?;
        Ok((rx, ry))
    }
}

fn average(points: &[Vec<f64>]) -> Vec<f64> {
    let n = points.len() as f64;
    let mut acc = vec![crate::math::CompensatedSum::new(); points[0].len()];
    for p in points {
        for (a, v) in acc.iter_mut().zip(p) {
            a.add(*v);
        }
    }
    acc.iter().map(|a| a.value() / n).collect()
}

/// Alternating play for `horizon` rounds.
///
/// `y_0` is Alg_y's opening decision. In round `t` Alg_y observes
/// `u2(x_t, ·)` and outputs `y_t`; then Alg_x observes `u1(·, y_t)` and
/// outputs `x_{t+1}`. The y-ledger charges `y_{t-1}` (standard) and `y_t`
/// (cheating) for `u2(x_t, ·)`.
pub fn run_alternating<X, Y>(game: &Game, alg_x: &mut X, alg_y: &mut Y, horizon: usize) -> Result<DynamicTrace>
where
    X: Learner + ?Sized,
    Y: Learner + ?Sized,
{
    check_dim(game.x_domain().dim(), alg_x.dim())?;
    check_dim(game.y_domain().dim(), alg_y.dim())?;
    let mut ledger_x = RegretLedger::new(alg_x.dim());
    let mut ledger_y = RegretLedger::new(alg_y.dim());
    let mut ys = Vec::with_capacity(horizon + 1);
    let mut xs = Vec::with_capacity(horizon + 1);
    ys.push(alg_y.act().map_err(|e| e.at_round(0))?);
    xs.push(alg_x.act().map_err(|e| e.at_round(1))?);
    for t in 1..=horizon {
        let mut step = || -> Result<(Vec<f64>, Vec<f64>, LossFn, LossFn)> {
            let g = game.y_loss(&xs[t - 1])?;
            alg_y.observe(&g)?;
            if alg_y.observations() != alg_x.observations() + 1 {
                return Err(Error::Inconsistent(format!(
                    "y-player has {} observations, x-player {}",
                    alg_y.observations(),
                    alg_x.observations()
                )));
            }
            let y = alg_y.act()?;
            let f = game.x_loss(&y)?;
            alg_x.observe(&f)?;
            let x = alg_x.act()?;
            Ok((y, x, g, f))
        };
        let (y, x, g, f) = step().map_err(|e| e.at_round(t))?;
        ledger_y.record(t, &ys[t - 1], &g, &y).map_err(|e| e.at_round(t))?;
        ledger_x.record(t, &xs[t - 1], &f, &x).map_err(|e| e.at_round(t))?;
        ys.push(y);
        xs.push(x);
    }
    Ok(DynamicTrace {
        xs,
        ys,
        ledger_x,
        ledger_y,
    })
}

/// Largest gain from a unilateral deviation at `(x̄, ȳ)` in a zero-sum game.
pub fn ne_gap(game: &Game, x: &[f64], y: &[f64]) -> Result<f64> {
    if !game.is_zero_sum() {
        return Err(Error::NotZeroSum);
    }
    let (vx, vy) = game.payoffs(x, y);
    let (bx, _) = minimize_one(&game.x_loss(y)?, game.x_domain())?;
    let (by, _) = minimize_one(&game.y_loss(x)?, game.y_domain())?;
    let gain_x = vx - game.payoffs(&bx, y).0;
    let gain_y = vy - game.payoffs(x, &by).1;
    Ok(gain_x.max(gain_y).max(0.0))
}

fn minimize_one(f: &LossFn, dom: &Domain) -> Result<(Vec<f64>, f64)> {
    let mut s = LossSum::new(f.dim());
    s.add(f)?;
    best_fixed(&s, dom)
}

/// CCE gap of the uniform distribution over `{(x_t, y_t), (x_{t+1}, y_t)}`.
pub fn cce_gap(game: &Game, trace: &DynamicTrace) -> Result<f64> {
    let t = trace.horizon();
    if t == 0 || trace.xs.len() != t + 1 || trace.ys.len() != t + 1 {
        return Err(Error::IncompleteTrace(format!(
            "horizon {t} with {} x-decisions and {} y-decisions",
            trace.xs.len(),
            trace.ys.len()
        )));
    }
    let n = (2 * t) as f64;
    let mut ex = crate::math::CompensatedSum::new();
    let mut ey = crate::math::CompensatedSum::new();
    let mut dev_x = LossSum::new(game.x_domain().dim());
    let mut dev_y = LossSum::new(game.y_domain().dim());
    for s in 1..=t {
        let y = &trace.ys[s];
        let (x0, x1) = (&trace.xs[s - 1], &trace.xs[s]);
        let (a0, b0) = game.payoffs(x0, y);
        let (a1, b1) = game.payoffs(x1, y);
        ex.add(a0 + a1);
        ey.add(b0 + b1);
        dev_x.add_scaled(2.0, &game.x_loss(y)?)?;
        dev_y.add(&game.y_loss(x0)?)?;
        dev_y.add(&game.y_loss(x1)?)?;
    }
    let (ux, _) = best_fixed(&dev_x, game.x_domain())?;
    let (uy, _) = best_fixed(&dev_y, game.y_domain())?;
    let mut devx = crate::math::CompensatedSum::new();
    let mut devy = crate::math::CompensatedSum::new();
    for s in 1..=t {
        let y = &trace.ys[s];
        devx.add(2.0 * game.payoffs(&ux, y).0);
        devy.add(game.payoffs(&trace.xs[s - 1], &uy).1 + game.payoffs(&trace.xs[s], &uy).1);
    }
    let gx = (ex.value() - devx.value()) / n;
    let gy = (ey.value() - devy.value()) / n;
    Ok(gx.max(gy).max(0.0))
}
