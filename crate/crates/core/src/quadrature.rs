//! Gauss-Legendre rules and the cubatures used by continuous Hedge.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::math::{cos, sin};

/// `n`-point Gauss-Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        nodes.push(x);
        weights.push(2.0 / ((1.0 - x * x) * dp * dp));
    }
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite rule: `panels` equal sub-intervals of `[lo, hi]`, each with an
/// `order`-point Gauss-Legendre rule.
pub fn composite_gauss_legendre(lo: f64, hi: f64, panels: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let (gx, gw) = gauss_legendre(order);
    let h = (hi - lo) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * order);
    let mut weights = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let a = lo + p as f64 * h;
        for (x, w) in gx.iter().zip(&gw) {
            nodes.push(a + 0.5 * h * (x + 1.0));
            weights.push(0.5 * h * w);
        }
    }
    (nodes, weights)
}

/// A fixed cubature over a low-dimensional domain.
#[derive(Debug, Clone)]
pub struct Cubature {
    dim: usize,
    points: Vec<f64>,
    weights: Vec<f64>,
}

/// 1-D: 64 panels × 32 nodes at level 0 (2048 nodes).
const LINE_PANELS: usize = 64;
const LINE_ORDER: usize = 32;
/// Square: 8 panels × 16 nodes per axis at level 0.
const BOX_PANELS: usize = 8;
const BOX_ORDER: usize = 16;
/// Disk (polar): 4 radial panels × 16 nodes, 128 angles at level 0.
const DISK_RADIAL_PANELS: usize = 4;
const DISK_RADIAL_ORDER: usize = 16;
const DISK_ANGLES: usize = 128;

impl Cubature {
    /// Rule for `dom` at refinement `level`; each level doubles the
    /// resolution along every axis.
    pub fn for_domain(dom: &Domain, level: u32) -> Result<Self> {
        let scale = 1usize << level;
        match dom {
            Domain::Interval { lo, hi } | Domain::Box { dim: 1, lo, hi } => {
                Ok(Cubature::line(*lo, *hi, LINE_PANELS * scale))
            }
            Domain::Ball { dim: 1, radius } => Ok(Cubature::line(-radius, *radius, LINE_PANELS * scale)),
            Domain::Box { dim: 2, lo, hi } => {
                let (x, w) = composite_gauss_legendre(*lo, *hi, BOX_PANELS * scale, BOX_ORDER);
                let mut points = Vec::with_capacity(2 * x.len() * x.len());
                let mut weights = Vec::with_capacity(x.len() * x.len());
                for (xi, wi) in x.iter().zip(&w) {
                    for (yj, wj) in x.iter().zip(&w) {
                        points.push(*xi);
                        points.push(*yj);
                        weights.push(wi * wj);
                    }
                }
                Ok(Cubature { dim: 2, points, weights })
            }
            Domain::Ball { dim: 2, radius } => {
                let (r, wr) =
                    composite_gauss_legendre(0.0, *radius, DISK_RADIAL_PANELS * scale, DISK_RADIAL_ORDER);
                let m = DISK_ANGLES * scale;
                let dtheta = 2.0 * PI / m as f64;
                let trig: Vec<(f64, f64)> = (0..m)
                    .map(|k| {
                        let th = (k as f64 + 0.5) * dtheta;
                        (cos(th), sin(th))
                    })
                    .collect();
                let mut points = Vec::with_capacity(2 * r.len() * m);
                let mut weights = Vec::with_capacity(r.len() * m);
                for (ri, wi) in r.iter().zip(&wr) {
                    for (c, s) in &trig {
                        points.push(ri * c);
                        points.push(ri * s);
                        weights.push(wi * ri * dtheta);
                    }
                }
                Ok(Cubature { dim: 2, points, weights })
            }
            Domain::Simplex { .. } => Err(Error::InvalidParameter(
                "continuous Hedge quadrature supports intervals, balls and boxes".into(),
            )),
            other => Err(Error::UnsupportedDimension(other.dim())),
        }
    }

    fn line(lo: f64, hi: f64, panels: usize) -> Self {
        let (points, weights) = composite_gauss_legendre(lo, hi, panels, LINE_ORDER);
        Cubature {
            dim: 1,
            points,
            weights,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks(self.dim)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F: FnMut(&[f64]) -> f64>(&self, mut f: F) -> f64 {
        self.points()
            .zip(&self.weights)
            .map(|(x, w)| w * f(x))
            .sum()
    }
}
