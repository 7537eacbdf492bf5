//! Convex losses with value, gradient, Hessian and certified constants.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{check_dim, Error, Result};
use crate::geometry::{ConvexFunction, Domain};
use crate::linalg::SymMatrix;
use crate::math::{dot, norm, CompensatedSum};

/// Lipschitz, smoothness and self-concordance constants `(L, β, C)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    pub lipschitz: f64,
    pub smoothness: f64,
    pub self_concordance: f64,
}

impl Constants {
    /// Entrywise maximum, for bounding a whole loss sequence.
    pub fn max(self, other: Constants) -> Constants {
        Constants {
            lipschitz: self.lipschitz.max(other.lipschitz),
            smoothness: self.smoothness.max(other.smoothness),
            self_concordance: self.self_concordance.max(other.self_concordance),
        }
    }
}

/// `xᵀ A x + bᵀ x + c` with `A` stored symmetrized.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticLoss {
    a: SymMatrix,
    b: Vec<f64>,
    c: f64,
}

impl QuadraticLoss {
    /// Symmetrizes `a` and rejects non-convex forms.
    pub fn new(a: &[Vec<f64>], b: Vec<f64>, c: f64) -> Result<Self> {
        let a = SymMatrix::symmetrized(a)?;
        QuadraticLoss::from_sym(a, b, c)
    }

    pub fn from_sym(a: SymMatrix, b: Vec<f64>, c: f64) -> Result<Self> {
        check_dim(a.dim(), b.len())?;
        let min_ev = a.min_eigenvalue();
        if min_ev < -1e-9 {
            return Err(Error::InvalidParameter(format!(
                "quadratic loss is not convex (min eigenvalue {min_ev:e})"
            )));
        }
        Ok(QuadraticLoss { a, b, c })
    }

    pub fn a(&self) -> &SymMatrix {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }
}

type ValueFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type GradFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// A user-supplied convex loss. Its constants are taken on trust.
#[derive(Clone)]
pub struct BlackBoxLoss {
    dim: usize,
    value: Arc<ValueFn>,
    grad: Arc<GradFn>,
    constants: Option<Constants>,
    label: String,
}

impl BlackBoxLoss {
    pub fn new<V, G>(dim: usize, value: V, grad: G) -> Self
    where
        V: Fn(&[f64]) -> f64 + Send + Sync + 'static,
        G: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        BlackBoxLoss {
            dim,
            value: Arc::new(value),
            grad: Arc::new(grad),
            constants: None,
            label: String::from("black-box"),
        }
    }

    pub fn with_constants(mut self, constants: Constants) -> Self {
        self.constants = Some(constants);
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn constants(&self) -> Option<Constants> {
        self.constants
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Debug for BlackBoxLoss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BlackBoxLoss")
            .field("dim", &self.dim)
            .field("label", &self.label)
            .field("constants", &self.constants)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum LossFn {
    Linear(Vec<f64>),
    Quadratic(QuadraticLoss),
    BlackBox(BlackBoxLoss),
}

const FD_STEP: f64 = 1e-5;

impl LossFn {
    pub fn linear(ell: Vec<f64>) -> Self {
        LossFn::Linear(ell)
    }

    pub fn quadratic(a: &[Vec<f64>], b: Vec<f64>, c: f64) -> Result<Self> {
        Ok(LossFn::Quadratic(QuadraticLoss::new(a, b, c)?))
    }

    pub fn dim(&self) -> usize {
        match self {
            LossFn::Linear(ell) => ell.len(),
            LossFn::Quadratic(q) => q.b.len(),
            LossFn::BlackBox(bb) => bb.dim,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            LossFn::Linear(_) => "linear",
            LossFn::Quadratic(_) => "quadratic",
            LossFn::BlackBox(_) => "black-box",
        }
    }

    pub fn as_linear(&self) -> Option<&[f64]> {
        match self {
            LossFn::Linear(ell) => Some(ell),
            _ => None,
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        Ok(match self {
            LossFn::Linear(ell) => dot(ell, x),
            LossFn::Quadratic(q) => q.a.quad_form(x) + dot(&q.b, x) + q.c,
            LossFn::BlackBox(bb) => (bb.value)(x),
        })
    }

    pub fn grad(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        Ok(match self {
            LossFn::Linear(ell) => ell.clone(),
            LossFn::Quadratic(q) => {
                let mut g = q.a.mul_vec(x);
                for (gi, bi) in g.iter_mut().zip(&q.b) {
                    *gi = 2.0 * *gi + bi;
                }
                g
            }
            LossFn::BlackBox(bb) => {
                let g = (bb.grad)(x);
                check_dim(bb.dim, g.len())?;
                g
            }
        })
    }

    /// Hessian; central differences of the gradient for black boxes.
    pub fn hessian(&self, x: &[f64]) -> Result<SymMatrix> {
        check_dim(self.dim(), x.len())?;
        Ok(match self {
            LossFn::Linear(ell) => SymMatrix::zeros(ell.len()),
            LossFn::Quadratic(q) => {
                let mut h = q.a.clone();
                h.scale(2.0);
                h
            }
            LossFn::BlackBox(bb) => {
                let n = bb.dim;
                let mut cols = Vec::with_capacity(n);
                let mut xp = x.to_vec();
                for j in 0..n {
                    xp[j] = x[j] + FD_STEP;
                    let gp = (bb.grad)(&xp);
                    xp[j] = x[j] - FD_STEP;
                    let gm = (bb.grad)(&xp);
                    xp[j] = x[j];
                    cols.push(
                        gp.iter()
                            .zip(&gm)
                            .map(|(a, b)| (a - b) / (2.0 * FD_STEP))
                            .collect::<Vec<f64>>(),
                    );
                }
                SymMatrix::symmetrized(&cols)?
            }
        })
    }

    /// Safe upper bounds on `(L, β, C)` over `dom`.
    ///
    /// Linear: `L = ‖ℓ‖`. Quadratic: `L = ‖2A‖_op · max‖x‖ + ‖b‖`,
    /// `β = ‖2A‖_op`. Both have `C = 0`. Black boxes return their
    /// user-supplied constants.
    pub fn certify(&self, dom: &Domain) -> Result<Constants> {
        check_dim(dom.dim(), self.dim())?;
        match self {
            LossFn::Linear(ell) => Ok(Constants {
                lipschitz: norm(ell),
                smoothness: 0.0,
                self_concordance: 0.0,
            }),
            LossFn::Quadratic(q) => {
                let op = 2.0 * q.a.op_norm();
                Ok(Constants {
                    lipschitz: op * dom.max_norm() + norm(&q.b),
                    smoothness: op,
                    self_concordance: 0.0,
                })
            }
            LossFn::BlackBox(bb) => bb.constants.ok_or(Error::Uncertified),
        }
    }

    /// Upper estimate of `max_{x ∈ dom} |f(x)|`.
    ///
    /// Exact for linear losses; quadratics use `|c| + ‖b‖R + ‖A‖_op R²`.
    pub fn sup_abs(&self, dom: &Domain) -> Result<f64> {
        check_dim(dom.dim(), self.dim())?;
        match self {
            LossFn::Linear(ell) => Ok(match dom {
                Domain::Ball { radius, .. } => norm(ell) * radius,
                Domain::Simplex { .. } => ell.iter().fold(0.0_f64, |m, v| m.max(v.abs())),
                Domain::Interval { lo, hi } | Domain::Box { lo, hi, .. } => ell
                    .iter()
                    .map(|v| (v * lo).abs().max((v * hi).abs()))
                    .sum(),
            }),
            LossFn::Quadratic(q) => {
                let r = dom.max_norm();
                Ok(q.c.abs() + norm(&q.b) * r + q.a.op_norm() * r * r)
            }
            LossFn::BlackBox(_) => Err(Error::Uncertified),
        }
    }
}

impl ConvexFunction for LossFn {
    fn dim(&self) -> usize {
        LossFn::dim(self)
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        self.eval(x)
    }

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.grad(x)
    }
}

/// A running sum of losses.
///
/// Linear and quadratic terms aggregate into `(A_sum, b_sum, c_sum)` so
/// evaluation cost does not grow with the number of losses; black boxes are
/// stored and evaluated one by one.
#[derive(Debug, Clone)]
pub struct LossSum {
    dim: usize,
    a: Option<SymMatrix>,
    b: Vec<CompensatedSum>,
    c: CompensatedSum,
    black_boxes: Vec<BlackBoxLoss>,
    count: usize,
}

impl LossSum {
    pub fn new(dim: usize) -> Self {
        LossSum {
            dim,
            a: None,
            b: vec![CompensatedSum::new(); dim],
            c: CompensatedSum::new(),
            black_boxes: Vec::new(),
            count: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn add(&mut self, f: &LossFn) -> Result<()> {
        self.add_scaled(1.0, f)
    }

    pub fn add_scaled(&mut self, s: f64, f: &LossFn) -> Result<()> {
        check_dim(self.dim, f.dim())?;
        match f {
            LossFn::Linear(ell) => {
                for (acc, v) in self.b.iter_mut().zip(ell) {
                    acc.add(s * v);
                }
            }
            LossFn::Quadratic(q) => {
                self.a
                    .get_or_insert_with(|| SymMatrix::zeros(self.dim))
                    .add_scaled(s, &q.a);
                for (acc, v) in self.b.iter_mut().zip(&q.b) {
                    acc.add(s * v);
                }
                self.c.add(s * q.c);
            }
            LossFn::BlackBox(bb) => {
                if s != 1.0 {
                    let inner = bb.clone();
                    let inner_g = bb.clone();
                    let scaled = BlackBoxLoss::new(
                        bb.dim,
                        move |x| s * (inner.value)(x),
                        move |x| (inner_g.grad)(x).iter().map(|g| s * g).collect(),
                    );
                    self.black_boxes.push(scaled);
                } else {
                    self.black_boxes.push(bb.clone());
                }
            }
        }
        self.count += 1;
        Ok(())
    }

    /// Linear coefficient vector of the aggregate.
    pub fn linear_part(&self) -> Vec<f64> {
        self.b.iter().map(|c| c.value()).collect()
    }

    pub fn quadratic_part(&self) -> Option<&SymMatrix> {
        self.a.as_ref()
    }

    pub fn constant_part(&self) -> f64 {
        self.c.value()
    }

    /// True when every term so far was linear.
    pub fn is_linear(&self) -> bool {
        self.a.as_ref().is_none_or(|a| a.is_zero()) && self.black_boxes.is_empty()
    }

    pub fn has_black_boxes(&self) -> bool {
        !self.black_boxes.is_empty()
    }

    /// Collapses the aggregate into a single loss when no black boxes are present.
    pub fn to_loss(&self) -> Option<LossFn> {
        if self.has_black_boxes() {
            return None;
        }
        match &self.a {
            None => Some(LossFn::Linear(self.linear_part())),
            Some(a) => Some(LossFn::Quadratic(QuadraticLoss {
                a: a.clone(),
                b: self.linear_part(),
                c: self.constant_part(),
            })),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        let mut acc = CompensatedSum::new();
        for (bi, xi) in self.b.iter().zip(x) {
            acc.add(bi.value() * xi);
        }
        if let Some(a) = &self.a {
            acc.add(a.quad_form(x));
        }
        acc.add(self.c.value());
        for bb in &self.black_boxes {
            acc.add((bb.value)(x));
        }
        Ok(acc.value())
    }

    pub fn grad(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim, x.len())?;
        let mut g = match &self.a {
            Some(a) => a.mul_vec(x).iter().map(|v| 2.0 * v).collect(),
            None => vec![0.0; self.dim],
        };
        for (gi, bi) in g.iter_mut().zip(&self.b) {
            *gi += bi.value();
        }
        for bb in &self.black_boxes {
            let gb = (bb.grad)(x);
            check_dim(self.dim, gb.len())?;
            for (gi, v) in g.iter_mut().zip(gb) {
                *gi += v;
            }
        }
        Ok(g)
    }

    /// `D(a, b) - D(b, a)` summed over the stored black boxes, where `D` is
    /// the Bregman divergence of each term. Linear and quadratic terms have
    /// symmetric divergences and contribute nothing. With `skip_last`, the
    /// most recently added black box is left out.
    pub fn black_box_asymmetry(&self, a: &[f64], b: &[f64], skip_last: bool) -> Result<f64> {
        check_dim(self.dim, a.len())?;
        check_dim(self.dim, b.len())?;
        let n = self.black_boxes.len() - usize::from(skip_last && !self.black_boxes.is_empty());
        let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        let mut acc = CompensatedSum::new();
        for bb in &self.black_boxes[..n] {
            let ga = (bb.grad)(a);
            let gb = (bb.grad)(b);
            let slope: f64 = ga.iter().zip(&gb).zip(&diff).map(|((u, v), d)| (u + v) * d).sum();
            acc.add(2.0 * ((bb.value)(a) - (bb.value)(b)) - slope);
        }
        Ok(acc.value())
    }

    pub fn hessian(&self, x: &[f64]) -> Result<SymMatrix> {
        check_dim(self.dim, x.len())?;
        let mut h = match &self.a {
            Some(a) => {
                let mut h = a.clone();
                h.scale(2.0);
                h
            }
            None => SymMatrix::zeros(self.dim),
        };
        for bb in &self.black_boxes {
            h.add_scaled(1.0, &LossFn::BlackBox(bb.clone()).hessian(x)?);
        }
        Ok(h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::bregman;
    use crate::rng::SplitMix64;
    use alloc::vec;

    #[test]
    fn linear_examples() {
        let third = 1.0 / 3.0;
        let f = LossFn::linear(vec![1.0, 0.0, 0.0]);
        assert!((f.eval(&[third; 3]).unwrap() - third).abs() < 1e-16);
        let g = LossFn::linear(vec![4.0, 0.0]);
        assert_eq!(g.eval(&[0.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn quadratic_example() {
        let f = LossFn::quadratic(&[vec![1.0, 0.0], vec![0.0, 1.0]], vec![0.0, 0.0], 0.0)
            .unwrap();
        assert_eq!(f.eval(&[1.0, 0.0]).unwrap(), 1.0);
        assert_eq!(f.grad(&[1.0, 0.0]).unwrap(), vec![2.0, 0.0]);
    }

    #[test]
    fn dimension_mismatch() {
        let f = LossFn::linear(vec![1.0, 2.0]);
        assert!(matches!(
            f.eval(&[1.0]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn rejects_nonconvex_quadratic() {
        let r = LossFn::quadratic(&[vec![1.0, 0.0], vec![0.0, -0.5]], vec![0.0, 0.0], 0.0);
        assert!(matches!(r, Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn certify_examples() {
        let simplex = Domain::simplex(3).unwrap();
        let c = LossFn::linear(vec![1.0, 0.0, 0.0]).certify(&simplex).unwrap();
        assert_eq!((c.lipschitz, c.smoothness, c.self_concordance), (1.0, 0.0, 0.0));

        let ball = Domain::unit_ball(2).unwrap();
        let q = LossFn::quadratic(&[vec![1.0, 0.0], vec![0.0, 1.0]], vec![0.0, 0.0], 0.0)
            .unwrap();
        assert_eq!(q.certify(&ball).unwrap().self_concordance, 0.0);

        let q = LossFn::quadratic(&[vec![1.0, 0.0], vec![0.0, 2.0]], vec![1.0, 0.0], 0.0)
            .unwrap();
        let c = q.certify(&ball).unwrap();
        assert!((c.lipschitz - 5.0).abs() < 1e-12);
        assert!((c.smoothness - 4.0).abs() < 1e-12);
        // Grid search of ‖∇f‖ over the ball stays below the certified L.
        let mut max_grad: f64 = 0.0;
        for i in 0..=100 {
            for j in 0..3600 {
                let r = i as f64 / 100.0;
                let th = j as f64 * core::f64::consts::PI / 1800.0;
                let x = [r * th.cos(), r * th.sin()];
                max_grad = max_grad.max(norm(&q.grad(&x).unwrap()));
            }
        }
        assert!(max_grad <= c.lipschitz + 1e-9);
        // On the circle ‖∇f‖² = 17 + 4x - 12x², maximal at x = 1/6.
        assert!((max_grad - (52.0f64 / 3.0).sqrt()).abs() < 1e-3);
    }

    #[test]
    fn black_box_needs_constants() {
        let bb = BlackBoxLoss::new(1, |x| x[0] * x[0], |x| vec![2.0 * x[0]]);
        let dom = Domain::interval(-1.0, 1.0).unwrap();
        assert!(matches!(
            LossFn::BlackBox(bb.clone()).certify(&dom),
            Err(Error::Uncertified)
        ));
        let c = Constants {
            lipschitz: 2.0,
            smoothness: 2.0,
            self_concordance: 0.0,
        };
        assert_eq!(LossFn::BlackBox(bb.with_constants(c)).certify(&dom).unwrap(), c);
    }

    #[test]
    fn convexity_witness() {
        let mut g = SplitMix64::new(5);
        let q = LossFn::quadratic(
            &[vec![2.0, 0.5, 0.0], vec![0.5, 1.0, 0.1], vec![0.0, 0.1, 0.05]],
            vec![0.3, -1.0, 2.0],
            0.5,
        )
        .unwrap();
        for _ in 0..1000 {
            let x: Vec<f64> = (0..3).map(|_| g.uniform(-1.0, 1.0)).collect();
            let y: Vec<f64> = (0..3).map(|_| g.uniform(-1.0, 1.0)).collect();
            assert!(bregman(&q, &x, &y).unwrap() >= -1e-9);
        }
    }

    #[test]
    fn loss_sum_matches_termwise_sum() {
        let mut g = SplitMix64::new(9);
        let mut sum = LossSum::new(2);
        let mut terms = Vec::new();
        for k in 0..50 {
            let f = if k % 3 == 0 {
                LossFn::quadratic(
                    &[vec![g.uniform(0.0, 1.0), 0.0], vec![0.0, g.uniform(0.0, 1.0)]],
                    vec![g.uniform(-1.0, 1.0), g.uniform(-1.0, 1.0)],
                    g.uniform(-1.0, 1.0),
                )
                .unwrap()
            } else if k % 3 == 1 {
                LossFn::linear(vec![g.uniform(-1.0, 1.0), g.uniform(-1.0, 1.0)])
            } else {
                let s = g.uniform(0.5, 1.5);
                LossFn::BlackBox(BlackBoxLoss::new(
                    2,
                    move |x| s * (x[0] * x[0] * x[0] * x[0] + x[1] * x[1]),
                    move |x| vec![4.0 * s * x[0] * x[0] * x[0], 2.0 * s * x[1]],
                ))
            };
            sum.add(&f).unwrap();
            terms.push(f);
        }
        let x = [0.3, -0.4];
        let direct: f64 = terms.iter().map(|f| f.eval(&x).unwrap()).sum();
        assert!((sum.eval(&x).unwrap() - direct).abs() < 1e-12);
        let mut gd = [0.0; 2];
        for f in &terms {
            for (a, b) in gd.iter_mut().zip(f.grad(&x).unwrap()) {
                *a += b;
            }
        }
        let gs = sum.grad(&x).unwrap();
        assert!((gs[0] - gd[0]).abs() < 1e-12 && (gs[1] - gd[1]).abs() < 1e-12);
    }
}
