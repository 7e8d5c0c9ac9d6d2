//! Verification suites behind `matbeta verify`.
//!
//! Every check records both sides and a margin (how far inside the
//! tolerance it landed; negative means failure). Reports contain no timings,
//! so a fixed seed gives byte-identical output.

use std::io::{self, Write};

use matbeta::quadrature::{quad_moments, QuadratureSpec};
use matbeta::recursion::{marginal_mean_via_lemma, moment_recursive};
use matbeta::sampling::{
    mc_estimates_streamed, shift_identity_checks, MatrixBetaSampler, MatrixSampler, RngSpec,
    ShiftWeight, StiefelSampler, StiefelSpec,
};
use matbeta::stats::{ks_critical_value, ks_statistic};
use matbeta::{
    closed_form, BetaParams, ExactParams, MomentEstimate, MomentIndex, Rational, Scalar,
};
use statrs::distribution::{Beta, ContinuousCDF};

use crate::error::CliError;
use crate::output::{format_f64, format_rational};

/// Independent RNG streams per Monte Carlo estimate; fixed so results do not
/// depend on the thread count.
pub const MC_STREAMS: u64 = 16;

const WISHART_STREAM: u64 = 0;
const STIEFEL_STREAM: u64 = 1_000;
const SHIFT_DET_STREAM: u64 = 2_000;
const SHIFT_COMPLEMENT_STREAM: u64 = 3_000;
const KS_STREAM: u64 = 4_000;

/// Significance level of the marginal-law test.
pub const KS_LEVEL: f64 = 0.001;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub context: String,
    pub identity: String,
    pub left: String,
    pub right: String,
    pub margin: String,
    pub passed: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn render<W: Write>(&self, out: &mut W) -> io::Result<()> {
        for c in &self.checks {
            writeln!(
                out,
                "{} [{}] {} | {}: {} vs {} | margin {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.suite,
                c.context,
                c.identity,
                c.left,
                c.right,
                c.margin
            )?;
        }
        writeln!(
            out,
            "{} checks, {} failed",
            self.checks.len(),
            self.failures()
        )
    }

    #[allow(clippy::too_many_arguments)]
    fn push(
        &mut self,
        suite: &'static str,
        context: &str,
        identity: String,
        left: String,
        right: String,
        margin: String,
        passed: bool,
    ) {
        self.checks.push(Check {
            suite,
            context: context.to_owned(),
            identity,
            left,
            right,
            margin,
            passed,
        });
    }
}

fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

fn grid_of(values: &[Rational]) -> Vec<ExactParams> {
    values
        .iter()
        .flat_map(|a| {
            values
                .iter()
                .map(move |b| BetaParams::new(a.clone(), b.clone()).expect("> 1/2"))
        })
        .collect()
}

/// `{3/4, 1, 3/2, 2, 7/2}^2`.
pub fn exact_grid() -> Vec<ExactParams> {
    grid_of(&[q(3, 4), q(1, 1), q(3, 2), q(2, 1), q(7, 2)])
}

/// `{2, 5/2, 3}^2`, where the density stays bounded.
pub fn quadrature_grid() -> Vec<ExactParams> {
    grid_of(&[q(2, 1), q(5, 2), q(3, 1)])
}

pub fn context(p: &ExactParams) -> String {
    format!("alpha={} beta={}", p.alpha(), p.beta())
}

/// All `X^m Y^r Z^s` with `m, r <= max_order` and `s <= 2 max_t`.
pub fn index_grid(max_order: u32, max_t: u32) -> Vec<MomentIndex> {
    MomentIndex::grid(max_order, max_order, 2 * max_t)
}

/// Closed form against the shift-identity recursion, bit for bit.
pub fn exact_checks(params: &[ExactParams], max_order: u32, max_t: u32) -> Report {
    let mut report = Report::default();
    for p in params {
        let ctx = context(p);
        let mean = marginal_mean_via_lemma(p);
        let direct = p.alpha().clone() / p.total();
        report.push(
            "exact",
            &ctx,
            "E[X] from the shift identities = alpha/(alpha+beta)".into(),
            format_rational(&mean),
            format_rational(&direct),
            format_rational(&(mean.clone() - direct.clone())),
            mean == direct,
        );
        for idx in index_grid(max_order, max_t) {
            let closed = closed_form::moment(p, idx);
            let recursive = moment_recursive(p, idx);
            report.push(
                "exact",
                &ctx,
                format!("closed form = recursion for E[{idx}]"),
                format_rational(&closed),
                format_rational(&recursive),
                format_rational(&(closed.clone() - recursive.clone())),
                closed == recursive,
            );
        }
    }
    report
}

/// Quadrature against the closed form with tolerance
/// `max(floor, |coarse - refined|)`. The `X^0 Y^0 Z^0` row is the
/// normalization check.
pub fn quadrature_checks(
    params: &[ExactParams],
    max_order: u32,
    max_t: u32,
    spec: &QuadratureSpec,
    floor: f64,
) -> Result<Report, CliError> {
    let mut report = Report::default();
    let indices = index_grid(max_order, max_t);
    for p in params {
        let ctx = format!(
            "{} cells={} points={}",
            context(p),
            spec.cells_per_axis,
            spec.points_per_cell_axis
        );
        let estimates = quad_moments(&p.to_f64(), &indices, spec)?;
        for (idx, est) in indices.iter().zip(&estimates) {
            let closed = closed_form::moment(p, *idx).as_f64();
            let allowed = floor.max(est.std_error);
            let diff = (est.value - closed).abs();
            let identity = if idx.m == 0 && idx.r == 0 && idx.z_pow == 0 {
                "quadrature normalization = 1".to_owned()
            } else {
                format!("quadrature = closed form for E[{idx}]")
            };
            report.push(
                "quadrature",
                &ctx,
                identity,
                format!("{} (err {:.2e})", format_f64(est.value), est.std_error),
                format_f64(closed),
                format!("{:.3e} of {:.3e}", allowed - diff, allowed),
                diff <= allowed,
            );
        }
    }
    Ok(report)
}

/// Monte Carlo settings shared by the sampling checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub samples: u64,
    pub ks_samples: u64,
    pub seed: u64,
    pub sigmas: f64,
}

impl McConfig {
    fn rng(&self, stream: u64) -> RngSpec {
        RngSpec::new(self.seed).with_stream(stream)
    }
}

fn estimate_text(e: &MomentEstimate) -> String {
    format!("{} (se {:.2e})", format_f64(e.value), e.std_error)
}

fn z_margin(z: f64, sigmas: f64) -> String {
    format!("{:.3} se ({z:.3} of {sigmas})", sigmas - z)
}

/// Sample means from `sampler` against the closed form at `p`; returns the
/// estimates for further comparisons.
pub fn sampler_checks<S: MatrixSampler>(
    report: &mut Report,
    label: &str,
    sampler: &S,
    p: &ExactParams,
    indices: &[MomentIndex],
    cfg: &McConfig,
    stream: u64,
) -> Result<Vec<MomentEstimate>, CliError> {
    let estimates =
        mc_estimates_streamed(sampler, indices, cfg.samples, cfg.rng(stream), MC_STREAMS)?;
    let ctx = format!(
        "{label} {} samples={} seed={}",
        context(p),
        cfg.samples,
        cfg.seed
    );
    for (idx, est) in indices.iter().zip(&estimates) {
        let closed = closed_form::moment(p, *idx).as_f64();
        let z = est.z_score(closed);
        report.push(
            "montecarlo",
            &ctx,
            format!("sample mean = closed form for E[{idx}]"),
            estimate_text(est),
            format_f64(closed),
            z_margin(z, cfg.sigmas),
            z <= cfg.sigmas,
        );
    }
    Ok(estimates)
}

/// Two independent estimates of the same moments agree within the combined
/// error bar.
pub fn consistency_checks(
    report: &mut Report,
    ctx: &str,
    indices: &[MomentIndex],
    left: &[MomentEstimate],
    right: &[MomentEstimate],
    sigmas: f64,
) {
    for ((idx, a), b) in indices.iter().zip(left).zip(right) {
        let se = a.std_error.hypot(b.std_error);
        let gap = (a.value - b.value).abs();
        let z = if gap == 0.0 { 0.0 } else { gap / se };
        report.push(
            "montecarlo",
            ctx,
            format!("wishart-ratio mean = projection-block mean for E[{idx}]"),
            estimate_text(a),
            estimate_text(b),
            z_margin(z, sigmas),
            z <= sigmas,
        );
    }
}

/// `f` in `{1, X, X^2, Z^2}`.
pub fn shift_test_functions() -> [MomentIndex; 4] {
    [
        MomentIndex::new(0, 0, 0),
        MomentIndex::new(1, 0, 0),
        MomentIndex::new(2, 0, 0),
        MomentIndex::new(0, 0, 2),
    ]
}

/// Sampled `E[det(W) f] = factor E_{alpha+1}[f]` and the `det(I - W)`
/// analogue.
pub fn shift_checks(report: &mut Report, p: &ExactParams, cfg: &McConfig) -> Result<(), CliError> {
    let fs = shift_test_functions();
    for (weight, name, shifted, stream) in [
        (ShiftWeight::Det, "det(W)", "alpha+1", SHIFT_DET_STREAM),
        (
            ShiftWeight::DetComplement,
            "det(I-W)",
            "beta+1",
            SHIFT_COMPLEMENT_STREAM,
        ),
    ] {
        let checks = shift_identity_checks(&p.to_f64(), weight, &fs, cfg.samples, cfg.rng(stream))?;
        let ctx = format!("{} samples={} seed={}", context(p), cfg.samples, cfg.seed);
        for c in checks {
            let z = c.z_score();
            report.push(
                "montecarlo",
                &ctx,
                format!(
                    "E[{name} * {}] = {:.6} * E_({shifted})[{}]",
                    c.index, c.factor, c.index
                ),
                estimate_text(&c.weighted),
                format!(
                    "{} (se {:.2e})",
                    format_f64(c.rhs()),
                    c.factor * c.shifted.std_error
                ),
                z_margin(z, cfg.sigmas),
                z <= cfg.sigmas,
            );
        }
    }
    Ok(())
}

/// KS distance between sampled X and the Beta(alpha, beta) CDF, against the
/// large-sample critical value at [`KS_LEVEL`]. Returns `(statistic, critical)`.
pub fn ks_check(
    report: &mut Report,
    p: &ExactParams,
    cfg: &McConfig,
) -> Result<(f64, f64), CliError> {
    let pf = p.to_f64();
    let n = usize::try_from(cfg.ks_samples)
        .ok()
        .filter(|&n| n >= 2)
        .ok_or_else(|| {
            CliError::Usage(format!(
                "--ks-samples must be at least 2 (got {})",
                cfg.ks_samples
            ))
        })?;
    let sampler = MatrixBetaSampler::new(pf.clone())?;
    let mut rng = cfg.rng(KS_STREAM).rng();
    let mut xs = Vec::with_capacity(n);
    for _ in 0..n {
        xs.push(sampler.draw(&mut rng)?.x);
    }
    let law = Beta::new(*pf.alpha(), *pf.beta())
        .map_err(|e| CliError::Usage(format!("beta distribution: {e}")))?;
    let d = ks_statistic(&mut xs, |x| law.cdf(x));
    let crit = ks_critical_value(n, KS_LEVEL);
    report.push(
        "montecarlo",
        &format!("{} samples={n} seed={}", context(p), cfg.seed),
        format!(
            "KS distance of X to Beta({}, {}) below the {KS_LEVEL} critical value",
            p.alpha(),
            p.beta()
        ),
        format!("{d:.6e}"),
        format!("{crit:.6e}"),
        format!("{:.3e}", crit - d),
        d < crit,
    );
    Ok((d, crit))
}

/// `(n, k) = (2(alpha + beta), 2 alpha)` when that is a valid frame.
pub fn matching_frame(p: &ExactParams) -> Option<StiefelSpec> {
    let two = Rational::from_i64(2);
    let k = p.alpha().clone() * two.clone();
    let rest = p.beta().clone() * two;
    if !(k.is_integer() && rest.is_integer()) {
        return None;
    }
    let k = num_traits::ToPrimitive::to_usize(&k.to_integer())?;
    let rest = num_traits::ToPrimitive::to_usize(&rest.to_integer())?;
    StiefelSpec::new(k + rest, k).ok()
}

fn frame_params(spec: StiefelSpec) -> ExactParams {
    BetaParams::new(
        Rational::from_ratio(spec.k as i64, 2),
        Rational::from_ratio((spec.n - spec.k) as i64, 2),
    )
    .expect("frame dimensions validated")
}

/// Both samplers against the closed form, against each other when they
/// target the same law, the shift identities and the marginal law.
pub fn montecarlo_checks(
    p: &ExactParams,
    frame: Option<StiefelSpec>,
    max_order: u32,
    max_t: u32,
    cfg: &McConfig,
) -> Result<Report, CliError> {
    let mut report = Report::default();
    let indices = index_grid(max_order, max_t);
    let wishart = MatrixBetaSampler::new(p.to_f64())?;
    let from_ratio = sampler_checks(
        &mut report,
        "wishart-ratio",
        &wishart,
        p,
        &indices,
        cfg,
        WISHART_STREAM,
    )?;
    if let Some(spec) = frame {
        let fp = frame_params(spec);
        let label = format!("projection-block n={} k={}", spec.n, spec.k);
        let from_frame = sampler_checks(
            &mut report,
            &label,
            &StiefelSampler::new(spec),
            &fp,
            &indices,
            cfg,
            STIEFEL_STREAM,
        )?;
        if fp == *p {
            let ctx = format!(
                "{} {label} samples={} seed={}",
                context(p),
                cfg.samples,
                cfg.seed
            );
            consistency_checks(
                &mut report,
                &ctx,
                &indices,
                &from_ratio,
                &from_frame,
                cfg.sigmas,
            );
        }
    }
    shift_checks(&mut report, p, cfg)?;
    ks_check(&mut report, p, cfg)?;
    Ok(report)
}
