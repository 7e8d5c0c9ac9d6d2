//! Deterministic numerical integration over `{w : 0 < w < I}`.
//!
//! Coordinates `(x, y, u)` with `z = u * sqrt(min(xy, (1-x)(1-y)))`,
//! `u in (-1, 1)`, turn the curved domain into a box. The minimum switches
//! branch on the line `x + y = 1`, so the `(x, y)` square is split there and
//! each triangle is mapped onto the unit square:
//!
//! ```text
//! lower (x + y < 1):  x = a,     y = (1-a) b,       min = xy
//! upper (x + y > 1):  x = 1 - a, y = 1 - (1-a) b,   min = (1-x)(1-y)
//! ```
//!
//! In both cases `min = a (1-a) b` and the Jacobian is `(1-a) sqrt(min)`.
//! Each of the three unit axes gets a composite Gauss-Legendre rule followed
//! by the smoothstep grading `s -> s^3 (10 - 15 s + 6 s^2)`, which flattens the
//! algebraic boundary behaviour of the integrand. The `u` nodes are used in
//! `+/-` pairs with identical weights, so odd powers of `z` integrate to
//! exactly zero.

use rayon::prelude::*;

use crate::density::log_beta2;
use crate::error::{Error, Result};
use crate::types::{BetaParams, EstimateMethod, MomentEstimate, MomentIndex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QuadratureRule {
    #[default]
    TensorGaussLegendre,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureSpec {
    pub cells_per_axis: u32,
    pub rule: QuadratureRule,
    pub points_per_cell_axis: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self::new(64, 2)
    }
}

/// Guard against grids that would never finish.
const MAX_NODES_PER_AXIS: u64 = 1 << 12;

impl QuadratureSpec {
    pub fn new(cells_per_axis: u32, points_per_cell_axis: u32) -> Self {
        Self {
            cells_per_axis,
            rule: QuadratureRule::TensorGaussLegendre,
            points_per_cell_axis,
        }
    }

    /// Nodes along one axis.
    pub fn nodes_per_axis(&self) -> Result<u64> {
        if self.cells_per_axis == 0 || self.points_per_cell_axis == 0 {
            return Err(Error::InvalidQuadratureSpec(
                "cells_per_axis and points_per_cell_axis must be positive".into(),
            ));
        }
        let n = u64::from(self.cells_per_axis) * u64::from(self.points_per_cell_axis);
        if n > MAX_NODES_PER_AXIS {
            return Err(Error::InvalidQuadratureSpec(format!(
                "{n} nodes per axis exceeds the limit of {MAX_NODES_PER_AXIS}"
            )));
        }
        Ok(n)
    }

    /// Integrand evaluations for one pass (both triangles).
    pub fn evaluations(&self) -> Result<u64> {
        Ok(2 * self.nodes_per_axis()?.pow(3))
    }

    /// Same rule with twice the cells per axis.
    pub fn refined(&self) -> Self {
        Self {
            cells_per_axis: self.cells_per_axis.saturating_mul(2),
            ..*self
        }
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Chebyshev-like initial guess for the i-th largest root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut deriv = 0.0;
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            deriv = dp;
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        if dp != 0.0 {
            deriv = dp;
        }
        let w = 2.0 / ((1.0 - x * x) * deriv * deriv);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Graded composite rule on `(0, 1)`.
#[derive(Debug, Clone)]
struct AxisRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

fn smoothstep(s: f64) -> (f64, f64) {
    let s2 = s * s;
    let v = s2 * s * (10.0 - 15.0 * s + 6.0 * s2);
    let d = 30.0 * s2 * (1.0 - s) * (1.0 - s);
    (v, d)
}

impl AxisRule {
    fn new(spec: &QuadratureSpec) -> Self {
        let (gx, gw) = gauss_legendre(spec.points_per_cell_axis as usize);
        let cells = spec.cells_per_axis as usize;
        let h = 1.0 / cells as f64;
        let mut nodes = Vec::with_capacity(cells * gx.len());
        let mut weights = Vec::with_capacity(cells * gx.len());
        for c in 0..cells {
            let lo = c as f64 * h;
            for (x, w) in gx.iter().zip(&gw) {
                let s = lo + 0.5 * (x + 1.0) * h;
                let (v, d) = smoothstep(s);
                nodes.push(v);
                weights.push(0.5 * h * w * d);
            }
        }
        Self { nodes, weights }
    }

    /// `u = 2 v - 1` nodes on `(-1, 0]` with weights; each negative node
    /// stands for the pair `+/- u`. A trailing `u = 0` node (odd count) is
    /// flagged by the returned bool.
    fn symmetric_half(&self) -> (Vec<(f64, f64)>, Option<f64>) {
        let n = self.nodes.len();
        let half: Vec<_> = (0..n / 2)
            .map(|i| (2.0 * self.nodes[i] - 1.0, 2.0 * self.weights[i]))
            .collect();
        let middle = (n % 2 == 1).then(|| 2.0 * self.weights[n / 2]);
        (half, middle)
    }
}

#[derive(Debug, Clone, Copy)]
struct PowerBounds {
    m: usize,
    r: usize,
    s: usize,
}

impl PowerBounds {
    fn of(indices: &[MomentIndex]) -> Self {
        indices.iter().fold(Self { m: 0, r: 0, s: 0 }, |b, i| Self {
            m: b.m.max(i.m as usize),
            r: b.r.max(i.r as usize),
            s: b.s.max(i.z_pow as usize),
        })
    }
}

fn powers(v: f64, max: usize, out: &mut [f64]) {
    out[0] = 1.0;
    for k in 1..=max {
        out[k] = out[k - 1] * v;
    }
}

/// Integrals of `x^m y^r z^s det(w)^(alpha-3/2) det(I-w)^(beta-3/2)` for
/// each index, unnormalized.
fn raw_integrals(
    p: &BetaParams<f64>,
    indices: &[MomentIndex],
    spec: &QuadratureSpec,
) -> Result<Vec<f64>> {
    spec.nodes_per_axis()?;
    let axis = AxisRule::new(spec);
    let (u_half, u_mid) = axis.symmetric_half();
    let gamma = p.alpha() - 1.5;
    let delta = p.beta() - 1.5;
    let bounds = PowerBounds::of(indices);
    let na = axis.nodes.len();

    // One job per (triangle, a-node); results are reduced in job order so the
    // sum does not depend on the thread count.
    let slabs: Vec<Vec<f64>> = (0..2 * na)
        .into_par_iter()
        .map(|job| {
            let upper = job >= na;
            let ia = job % na;
            let a = axis.nodes[ia];
            let wa = axis.weights[ia];
            let mut acc = vec![0.0; indices.len()];
            let mut xp = vec![0.0; bounds.m + 1];
            let mut yp = vec![0.0; bounds.r + 1];
            let mut zsum = vec![0.0; bounds.s + 1];
            let mut zpos = vec![0.0; bounds.s + 1];
            let mut zneg = vec![0.0; bounds.s + 1];
            for (&b, &wb) in axis.nodes.iter().zip(&axis.weights) {
                let one_minus_a = 1.0 - a;
                let mn = a * one_minus_a * b;
                if mn <= 0.0 {
                    continue;
                }
                let root = mn.sqrt();
                let (x, y) = if upper {
                    (1.0 - a, 1.0 - one_minus_a * b)
                } else {
                    (a, one_minus_a * b)
                };
                powers(x, bounds.m, &mut xp);
                powers(y, bounds.r, &mut yp);
                let base_w = wa * wb * one_minus_a * root;
                // det of the branch that attains the minimum, and of the other one
                let other = if upper { x * y } else { (1.0 - x) * (1.0 - y) };

                let mut add = |u: f64, w: f64, paired: bool| {
                    let u2 = u * u;
                    let tight = mn * (1.0 - u) * (1.0 + u);
                    let loose = other - mn * u2;
                    let (det_w, det_c) = if upper {
                        (loose, tight)
                    } else {
                        (tight, loose)
                    };
                    if det_w <= 0.0 || det_c <= 0.0 {
                        return;
                    }
                    let f = det_w.powf(gamma) * det_c.powf(delta) * base_w * w;
                    let z = u * root;
                    powers(z, bounds.s, &mut zpos);
                    if paired {
                        powers(-z, bounds.s, &mut zneg);
                        for k in 0..=bounds.s {
                            zsum[k] = zpos[k] + zneg[k];
                        }
                    } else {
                        zsum[..=bounds.s].copy_from_slice(&zpos[..=bounds.s]);
                    }
                    for (slot, idx) in acc.iter_mut().zip(indices) {
                        *slot +=
                            f * xp[idx.m as usize] * yp[idx.r as usize] * zsum[idx.z_pow as usize];
                    }
                };
                for &(u, w) in &u_half {
                    add(u, w, true);
                }
                if let Some(w) = u_mid {
                    add(0.0, w, false);
                }
            }
            acc
        })
        .collect();

    let mut total = vec![0.0; indices.len()];
    for slab in slabs {
        for (t, v) in total.iter_mut().zip(slab) {
            *t += v;
        }
    }
    Ok(total)
}

fn check_params(p: &BetaParams<f64>) -> Result<()> {
    if *p.alpha() >= 2.0 && *p.beta() >= 2.0 {
        Ok(())
    } else {
        Err(Error::QuadratureParams {
            alpha: *p.alpha(),
            beta: *p.beta(),
        })
    }
}

/// Quadrature estimates of several moments from one pair of grid passes.
///
/// `std_error` is `|I(spec) - I(spec.refined())|` and `value` is the refined
/// result. The rule converges at fourth order in the cell width, so the
/// refined value is typically an order of magnitude inside the error bar.
/// `n_samples_or_cells` counts the integrand evaluations of both passes.
/// Requires `alpha, beta >= 2` so the integrand stays bounded.
pub fn quad_moments(
    p: &BetaParams<f64>,
    indices: &[MomentIndex],
    spec: &QuadratureSpec,
) -> Result<Vec<MomentEstimate>> {
    check_params(p)?;
    let fine_spec = spec.refined();
    let evaluations = spec.evaluations()? + fine_spec.evaluations()?;
    let norm = log_beta2(p)?.exp();
    let coarse = raw_integrals(p, indices, spec)?;
    let fine = raw_integrals(p, indices, &fine_spec)?;
    Ok(coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| MomentEstimate {
            value: f / norm,
            std_error: (c - f).abs() / norm,
            n_samples_or_cells: evaluations,
            method: EstimateMethod::Quadrature,
        })
        .collect())
}

pub fn quad_moment(
    p: &BetaParams<f64>,
    idx: MomentIndex,
    spec: &QuadratureSpec,
) -> Result<MomentEstimate> {
    Ok(quad_moments(p, &[idx], spec)?[0])
}

/// Numerical integral of the unnormalized density divided by `B_2(alpha, beta)`;
/// should be 1.
pub fn quad_normalization(p: &BetaParams<f64>, spec: &QuadratureSpec) -> Result<MomentEstimate> {
    quad_moment(p, MomentIndex::new(0, 0, 0), spec)
}
