//! Random matrices with law `B(alpha, beta; I_2)` and Monte Carlo moments.
//!
//! Two independent constructions:
//!
//! * [`MatrixBetaSampler`]: `A ~ W_2(2 alpha)`, `B ~ W_2(2 beta)`,
//!   `A + B = L L^T`, `W = L^{-1} A L^{-T}`; works for any `alpha, beta > 1/2`.
//! * [`StiefelSampler`]: the top-left 2x2 block of `S = Q Q^T` for a
//!   Haar-distributed `n x k` orthonormal frame `Q`, which has law
//!   `B(k/2, (n-k)/2; I_2)`.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::recursion::{lemma_factor_a, lemma_factor_b};
use crate::stats::MeanAccumulator;
use crate::types::{BetaParams, EstimateMethod, MomentEstimate, MomentIndex, Sym2Matrix};

/// Draws abandoned for rounding reasons before giving up.
pub const MAX_ATTEMPTS: u32 = 64;

pub type SampleRng = ChaCha8Rng;

/// `(seed, stream_id)` fully determines a sample sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngSpec {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngSpec {
    pub fn new(seed: u64) -> Self {
        Self { seed, stream_id: 0 }
    }

    pub fn with_stream(self, stream_id: u64) -> Self {
        Self { stream_id, ..self }
    }

    pub fn rng(&self) -> SampleRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Anything that can produce points of `{0 < w < I}`.
pub trait MatrixSampler: Sync {
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Sym2Matrix>;
}

/// Bartlett sampler for the 2x2 Wishart `W_2(dof, I)`.
#[derive(Debug, Clone)]
pub struct Wishart2 {
    dof: f64,
    first: Gamma<f64>,
    second: Gamma<f64>,
}

impl Wishart2 {
    pub fn new(dof: f64) -> Result<Self> {
        if !dof.is_finite() || dof <= 1.0 {
            return Err(Error::WishartDof(dof));
        }
        // chi^2(d) = Gamma(shape d/2, scale 2), valid for fractional d
        let first = Gamma::new(dof / 2.0, 2.0).map_err(|_| Error::WishartDof(dof))?;
        let second = Gamma::new((dof - 1.0) / 2.0, 2.0).map_err(|_| Error::WishartDof(dof))?;
        Ok(Self { dof, first, second })
    }

    pub fn dof(&self) -> f64 {
        self.dof
    }

    /// `L L^T` with `L = [[chi(dof), 0], [N(0,1), chi(dof-1)]]`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Sym2Matrix {
        let l11 = self.first.sample(rng).sqrt();
        let l21: f64 = StandardNormal.sample(rng);
        let l22 = self.second.sample(rng).sqrt();
        Sym2Matrix::new(l11 * l11, l21 * l21 + l22 * l22, l11 * l21)
    }
}

pub fn sample_wishart2<R: Rng + ?Sized>(dof: f64, rng: &mut R) -> Result<Sym2Matrix> {
    Ok(Wishart2::new(dof)?.sample(rng))
}

/// Wishart-ratio construction of `B(alpha, beta; I_2)`.
#[derive(Debug, Clone)]
pub struct MatrixBetaSampler {
    params: BetaParams<f64>,
    numerator: Wishart2,
    rest: Wishart2,
}

impl MatrixBetaSampler {
    pub fn new(params: BetaParams<f64>) -> Result<Self> {
        let numerator = Wishart2::new(2.0 * params.alpha())?;
        let rest = Wishart2::new(2.0 * params.beta())?;
        Ok(Self {
            params,
            numerator,
            rest,
        })
    }

    pub fn params(&self) -> &BetaParams<f64> {
        &self.params
    }
}

/// `L^{-1} A L^{-T}` where `L L^T = t`; `None` if `t` is not numerically PD.
fn whiten(a: &Sym2Matrix, t: &Sym2Matrix) -> Option<Sym2Matrix> {
    if t.x.is_nan() || t.x <= 0.0 {
        return None;
    }
    let l11 = t.x.sqrt();
    let l21 = t.z / l11;
    let l22_sq = t.y - l21 * l21;
    if l22_sq.is_nan() || l22_sq <= 0.0 {
        return None;
    }
    let l22 = l22_sq.sqrt();
    // L^{-1} = [[m11, 0], [m21, m22]]
    let m11 = 1.0 / l11;
    let m22 = 1.0 / l22;
    let m21 = -l21 * m11 * m22;
    Some(Sym2Matrix::new(
        m11 * m11 * a.x,
        m21 * m21 * a.x + 2.0 * m21 * m22 * a.z + m22 * m22 * a.y,
        m11 * (m21 * a.x + m22 * a.z),
    ))
}

impl MatrixSampler for MatrixBetaSampler {
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Sym2Matrix> {
        for _ in 0..MAX_ATTEMPTS {
            let a = self.numerator.sample(rng);
            let b = self.rest.sample(rng);
            let t = Sym2Matrix::new(a.x + b.x, a.y + b.y, a.z + b.z);
            if let Some(w) = whiten(&a, &t) {
                if w.in_domain() {
                    return Ok(w);
                }
            }
        }
        Err(Error::SamplerExhausted(MAX_ATTEMPTS))
    }
}

pub fn sample_matrix_beta<R: Rng + ?Sized>(p: &BetaParams<f64>, rng: &mut R) -> Result<Sym2Matrix> {
    MatrixBetaSampler::new(p.clone())?.draw(rng)
}

/// Frame dimensions for the `S = Q Q^T` construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StiefelSpec {
    pub n: usize,
    pub k: usize,
}

impl StiefelSpec {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k >= 2 && n >= k + 2 {
            Ok(Self { n, k })
        } else {
            Err(Error::StiefelDims { n, k })
        }
    }

    /// `(k/2, (n-k)/2)`
    pub fn beta_params(&self) -> BetaParams<f64> {
        BetaParams::new(self.k as f64 / 2.0, (self.n - self.k) as f64 / 2.0)
            .expect("dimensions validated")
    }
}

/// Haar-distributed `n x k` orthonormal frame: QR of a Gaussian matrix with
/// the sign of each column chosen so that `R` has a positive diagonal.
///
/// Returns `None` when `G` is numerically rank deficient.
pub fn haar_stiefel_frame<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    rng: &mut R,
) -> Option<DMatrix<f64>> {
    let g = DMatrix::<f64>::from_fn(n, k, |_, _| StandardNormal.sample(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    let scale = r.diagonal().amax().max(f64::MIN_POSITIVE);
    for j in 0..k {
        let d = r[(j, j)];
        if d.abs() <= 1e-12 * scale {
            return None;
        }
        if d < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    Some(q)
}

#[derive(Debug, Clone, Copy)]
pub struct StiefelSampler {
    spec: StiefelSpec,
}

impl StiefelSampler {
    pub fn new(spec: StiefelSpec) -> Self {
        Self { spec }
    }

    pub fn spec(&self) -> StiefelSpec {
        self.spec
    }
}

impl MatrixSampler for StiefelSampler {
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Sym2Matrix> {
        let StiefelSpec { n, k } = self.spec;
        for _ in 0..MAX_ATTEMPTS {
            let Some(q) = haar_stiefel_frame(n, k, rng) else {
                continue;
            };
            let row0 = q.row(0);
            let row1 = q.row(1);
            let w = Sym2Matrix::new(row0.dot(&row0), row1.dot(&row1), row0.dot(&row1));
            if w.in_domain() {
                return Ok(w);
            }
        }
        Err(Error::SamplerExhausted(MAX_ATTEMPTS))
    }
}

pub fn sample_stiefel_block<R: Rng + ?Sized>(spec: StiefelSpec, rng: &mut R) -> Result<Sym2Matrix> {
    StiefelSampler::new(spec).draw(rng)
}

pub fn draw_many<S: MatrixSampler, R: Rng + ?Sized>(
    sampler: &S,
    count: usize,
    rng: &mut R,
) -> Result<Vec<Sym2Matrix>> {
    (0..count).map(|_| sampler.draw(rng)).collect()
}

fn accumulate<S: MatrixSampler, R: Rng + ?Sized>(
    sampler: &S,
    indices: &[MomentIndex],
    n_samples: u64,
    rng: &mut R,
) -> Result<Vec<MeanAccumulator>> {
    let mut accs = vec![MeanAccumulator::default(); indices.len()];
    for _ in 0..n_samples {
        let w = sampler.draw(rng)?;
        for (acc, idx) in accs.iter_mut().zip(indices) {
            acc.push(idx.eval(&w));
        }
    }
    Ok(accs)
}

fn to_estimate(acc: &MeanAccumulator) -> MomentEstimate {
    MomentEstimate {
        value: acc.mean(),
        std_error: acc.std_error(),
        n_samples_or_cells: acc.count(),
        method: EstimateMethod::MonteCarlo,
    }
}

/// Sample means of several monomials over the same draws.
pub fn mc_estimates<S: MatrixSampler, R: Rng + ?Sized>(
    sampler: &S,
    indices: &[MomentIndex],
    n_samples: u64,
    rng: &mut R,
) -> Result<Vec<MomentEstimate>> {
    if n_samples < 2 {
        return Err(Error::TooFewSamples(n_samples));
    }
    Ok(accumulate(sampler, indices, n_samples, rng)?
        .iter()
        .map(to_estimate)
        .collect())
}

/// Sample mean of `x^m y^r z^s` with standard error `sd / sqrt(n)`.
pub fn mc_estimate<S: MatrixSampler, R: Rng + ?Sized>(
    sampler: &S,
    idx: MomentIndex,
    n_samples: u64,
    rng: &mut R,
) -> Result<MomentEstimate> {
    Ok(mc_estimates(sampler, &[idx], n_samples, rng)?[0])
}

/// Like [`mc_estimates`], split over `streams` independent RNG streams
/// (`base.stream_id + i`) that may run on different threads. Partial results
/// are merged in stream order, so the output only depends on the arguments.
pub fn mc_estimates_streamed<S: MatrixSampler>(
    sampler: &S,
    indices: &[MomentIndex],
    n_samples: u64,
    base: RngSpec,
    streams: u64,
) -> Result<Vec<MomentEstimate>> {
    if n_samples < 2 {
        return Err(Error::TooFewSamples(n_samples));
    }
    let streams = streams.clamp(1, n_samples);
    let per = n_samples / streams;
    let extra = n_samples % streams;
    let parts: Vec<Result<Vec<MeanAccumulator>>> = (0..streams)
        .into_par_iter()
        .map(|i| {
            let count = per + u64::from(i < extra);
            let mut rng = base.with_stream(base.stream_id + i).rng();
            accumulate(sampler, indices, count, &mut rng)
        })
        .collect();
    let mut total = vec![MeanAccumulator::default(); indices.len()];
    for part in parts {
        for (t, p) in total.iter_mut().zip(part?) {
            t.merge(&p);
        }
    }
    Ok(total.iter().map(to_estimate).collect())
}

/// Which determinant weights the left-hand side of a shift identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftWeight {
    /// `det(W)`, moving to `(alpha + 1, beta)`.
    Det,
    /// `det(I - W)`, moving to `(alpha, beta + 1)`.
    DetComplement,
}

/// Both sides of `E_p[weight * f] = factor * E_shifted[f]`, sampled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftCheck {
    pub index: MomentIndex,
    pub factor: f64,
    /// Estimate of `E_p[weight * f]`.
    pub weighted: MomentEstimate,
    /// Estimate of `E_shifted[f]`, unscaled.
    pub shifted: MomentEstimate,
}

impl ShiftCheck {
    pub fn rhs(&self) -> f64 {
        self.factor * self.shifted.value
    }

    pub fn combined_std_error(&self) -> f64 {
        self.weighted
            .std_error
            .hypot(self.factor * self.shifted.std_error)
    }

    /// Gap in combined standard errors; 0 if both sides are exact.
    pub fn z_score(&self) -> f64 {
        let gap = (self.weighted.value - self.rhs()).abs();
        let se = self.combined_std_error();
        if se == 0.0 {
            if gap == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            gap / se
        }
    }
}

/// Monte Carlo check of the determinant shift identities for each `f` in
/// `indices`. The two sides use streams `rng.stream_id` and
/// `rng.stream_id + 1`.
pub fn shift_identity_checks(
    p: &BetaParams<f64>,
    weight: ShiftWeight,
    indices: &[MomentIndex],
    n_samples: u64,
    rng: RngSpec,
) -> Result<Vec<ShiftCheck>> {
    if n_samples < 2 {
        return Err(Error::TooFewSamples(n_samples));
    }
    let shift = match weight {
        ShiftWeight::Det => lemma_factor_a(p),
        ShiftWeight::DetComplement => lemma_factor_b(p),
    };
    let base = MatrixBetaSampler::new(p.clone())?;
    let mut lhs = vec![MeanAccumulator::default(); indices.len()];
    let mut draws = rng.rng();
    for _ in 0..n_samples {
        let w = base.draw(&mut draws)?;
        let d = match weight {
            ShiftWeight::Det => w.det(),
            ShiftWeight::DetComplement => w.det_complement(),
        };
        for (acc, idx) in lhs.iter_mut().zip(indices) {
            acc.push(d * idx.eval(&w));
        }
    }
    let shifted_sampler = MatrixBetaSampler::new(shift.shifted_params)?;
    let mut shifted_rng = rng.with_stream(rng.stream_id + 1).rng();
    let rhs = accumulate(&shifted_sampler, indices, n_samples, &mut shifted_rng)?;
    Ok(indices
        .iter()
        .zip(lhs.iter().zip(&rhs))
        .map(|(&index, (l, r))| ShiftCheck {
            index,
            factor: shift.value,
            weighted: to_estimate(l),
            shifted: to_estimate(r),
        })
        .collect())
}
