use alloc::format;
use alloc::vec::Vec;

use crate::error::{check_dim, Error, Result};
use crate::math::{dot, ln};

/// A differentiable convex function, evaluated pointwise.
pub trait ConvexFunction {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> Result<f64>;
    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>>;
}

/// `D_f(x, y) = f(x) - f(y) - <∇f(y), x - y>`.
pub fn bregman<F: ConvexFunction + ?Sized>(f: &F, x: &[f64], y: &[f64]) -> Result<f64> {
    check_dim(f.dim(), x.len())?;
    check_dim(f.dim(), y.len())?;
    let fx = f.value(x)?;
    let fy = f.value(y)?;
    let g = f.gradient(y)?;
    let lin: f64 = g.iter().zip(x.iter().zip(y)).map(|(gi, (a, b))| gi * (a - b)).sum();
    Ok(fx - fy - lin)
}

/// `KL(p, q) = Σ p_i ln(p_i / q_i)` with `0 ln 0 = 0`.
///
/// Returns `+∞` when `p_i > 0` and `q_i = 0`.
///
/// # Panics
/// If `p` and `q` have different lengths.
pub fn kl(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len(), "kl: length mismatch");
    let mut s = 0.0;
    for (pi, qi) in p.iter().zip(q) {
        if *pi > 0.0 {
            if *qi <= 0.0 {
                return f64::INFINITY;
            }
            s += pi * ln(pi / qi);
        }
    }
    s
}

/// `½‖x‖²`
#[derive(Debug, Clone, Copy)]
pub struct HalfSquaredNorm {
    pub dim: usize,
}

impl ConvexFunction for HalfSquaredNorm {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        Ok(0.5 * dot(x, x))
    }

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim, x.len())?;
        Ok(x.to_vec())
    }
}

/// `Σ p_i ln p_i` over the full probability vector.
#[derive(Debug, Clone, Copy)]
pub struct NegativeEntropy {
    pub dim: usize,
}

impl ConvexFunction for NegativeEntropy {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, p: &[f64]) -> Result<f64> {
        check_dim(self.dim, p.len())?;
        if p.iter().any(|v| *v < 0.0) {
            return Err(Error::Domain(format!("negative coordinate in {p:?}")));
        }
        Ok(p.iter().filter(|v| **v > 0.0).map(|v| v * ln(*v)).sum())
    }

    fn gradient(&self, p: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim, p.len())?;
        if p.iter().any(|v| *v <= 0.0) {
            return Err(Error::Domain(format!(
                "entropy gradient needs positive coordinates, got {p:?}"
            )));
        }
        Ok(p.iter().map(|v| ln(*v) + 1.0).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn random_simplex(g: &mut SplitMix64, d: usize) -> Vec<f64> {
        let v: Vec<f64> = (0..d).map(|_| g.uniform(0.05, 1.0)).collect();
        let s: f64 = v.iter().sum();
        v.iter().map(|x| x / s).collect()
    }

    #[test]
    fn bregman_of_half_squared_norm() {
        let f = HalfSquaredNorm { dim: 2 };
        assert_eq!(bregman(&f, &[0.3, 0.7], &[0.3, 0.7]).unwrap(), 0.0);
        assert!((bregman(&f, &[1.0, 0.0], &[0.0, 1.0]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bregman_rejects_dimension_mismatch() {
        let f = HalfSquaredNorm { dim: 2 };
        assert!(matches!(
            bregman(&f, &[1.0], &[0.0, 1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn kl_examples() {
        let u = [1.0 / 3.0; 3];
        assert_eq!(kl(&u, &u), 0.0);
        assert!((kl(&[1.0, 0.0], &[0.5, 0.5]) - core::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(kl(&[0.5, 0.5], &[1.0, 0.0]), f64::INFINITY);
    }

    #[test]
    fn kl_is_bregman_of_negative_entropy() {
        let mut g = SplitMix64::new(11);
        let f = NegativeEntropy { dim: 5 };
        for _ in 0..200 {
            let p = random_simplex(&mut g, 5);
            let q = random_simplex(&mut g, 5);
            let b = bregman(&f, &p, &q).unwrap();
            assert!((kl(&p, &q) - b).abs() < 1e-12);
        }
    }
}
