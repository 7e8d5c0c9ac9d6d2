//! `moment`, `table`, `sample` and `asymptotics`.

use std::io::Write;

use matbeta::asymptotics::{coefficient_report, DecayStudy};
use matbeta::closed_form;
use matbeta::sampling::{MatrixBetaSampler, MatrixSampler, RngSpec, StiefelSampler, StiefelSpec};
use matbeta::{BetaParams, ExactParams, MomentIndex, Rational, Scalar};

use crate::args::{
    AsymptoticsArgs, Mode, MomentArgs, SampleArgs, SamplerKind, ShapeArgs, TableArgs, TableFormat,
    TextFormat,
};
use crate::error::{CliError, Exit};
use crate::output::{format_f64, format_rational, write_json, OutputRecord};
use crate::parse::{check_shape, parse_range, parse_rational};

pub fn parse_params(alpha: &str, beta: &str) -> Result<ExactParams, CliError> {
    let a = parse_rational(alpha)?;
    let b = parse_rational(beta)?;
    check_shape("alpha", &a)?;
    check_shape("beta", &b)?;
    Ok(BetaParams::new(a, b)?)
}

fn shape(args: &ShapeArgs) -> Result<ExactParams, CliError> {
    parse_params(&args.alpha, &args.beta)
}

fn evaluate(p: &ExactParams, idx: MomentIndex, mode: Mode) -> String {
    match mode {
        Mode::Exact => format_rational(&closed_form::moment(p, idx)),
        Mode::Float => format_f64(closed_form::moment(&p.to_f64(), idx)),
    }
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Exact => "exact",
        Mode::Float => "float",
    }
}

fn moment_record(
    command: &str,
    p: &ExactParams,
    idx: MomentIndex,
    mode: Mode,
    value: String,
) -> OutputRecord {
    OutputRecord::new(command)
        .param("alpha", p.alpha())
        .param("beta", p.beta())
        .param("m", idx.m)
        .param("r", idx.r)
        .param("z", idx.z_pow)
        .value("value", value)
        .meta("mode", mode_name(mode))
}

pub fn moment<W: Write>(args: &MomentArgs, out: &mut W) -> Result<Exit, CliError> {
    let p = shape(&args.shape)?;
    let idx = MomentIndex::new(args.m, args.r, args.z);
    let value = evaluate(&p, idx, args.mode);
    match args.format {
        TextFormat::Text => writeln!(out, "{value}")?,
        TextFormat::Json => write_json(out, &[moment_record("moment", &p, idx, args.mode, value)])?,
    }
    Ok(Exit::Success)
}

pub fn table<W: Write>(args: &TableArgs, out: &mut W) -> Result<Exit, CliError> {
    let p = shape(&args.shape)?;
    let (ms, rs, zs) = (
        parse_range(&args.m)?,
        parse_range(&args.r)?,
        parse_range(&args.z)?,
    );
    let mut indices = Vec::with_capacity(ms.len() * rs.len() * zs.len());
    for &m in &ms {
        for &r in &rs {
            indices.extend(zs.iter().map(|&z| MomentIndex::new(m, r, z)));
        }
    }
    match args.format {
        TableFormat::Csv => {
            writeln!(out, "alpha,beta,m,r,z,value")?;
            for idx in indices {
                let value = evaluate(&p, idx, args.mode);
                writeln!(
                    out,
                    "{},{},{},{},{},{value}",
                    p.alpha(),
                    p.beta(),
                    idx.m,
                    idx.r,
                    idx.z_pow
                )?;
            }
        }
        TableFormat::Json => {
            let records: Vec<_> = indices
                .into_iter()
                .map(|idx| moment_record("table", &p, idx, args.mode, evaluate(&p, idx, args.mode)))
                .collect();
            write_json(out, &records)?;
        }
    }
    Ok(Exit::Success)
}

enum AnySampler {
    Wishart(MatrixBetaSampler),
    Stiefel(StiefelSampler),
}

pub fn sample<W: Write>(args: &SampleArgs, out: &mut W) -> Result<Exit, CliError> {
    let (sampler, mut params) = match args.sampler {
        SamplerKind::Wishart => {
            if args.n.is_some() || args.k.is_some() {
                return Err(CliError::Usage(
                    "--n/--k apply only to --sampler stiefel".into(),
                ));
            }
            let (Some(alpha), Some(beta)) = (&args.alpha, &args.beta) else {
                return Err(CliError::Usage(
                    "--sampler wishart needs --alpha and --beta".into(),
                ));
            };
            let p = parse_params(alpha, beta)?;
            let record = OutputRecord::new("sample")
                .param("sampler", "wishart")
                .param("alpha", p.alpha())
                .param("beta", p.beta());
            (
                AnySampler::Wishart(MatrixBetaSampler::new(p.to_f64())?),
                record,
            )
        }
        SamplerKind::Stiefel => {
            if args.alpha.is_some() || args.beta.is_some() {
                return Err(CliError::Usage(
                    "--alpha/--beta apply only to --sampler wishart".into(),
                ));
            }
            let (Some(n), Some(k)) = (args.n, args.k) else {
                return Err(CliError::Usage(
                    "--sampler stiefel needs --n and --k".into(),
                ));
            };
            let spec = StiefelSpec::new(n, k)?;
            let record = OutputRecord::new("sample")
                .param("sampler", "stiefel")
                .param("n", n)
                .param("k", k);
            (AnySampler::Stiefel(StiefelSampler::new(spec)), record)
        }
    };
    params = params.meta("seed", args.seed).meta("count", args.count);

    let mut rng = RngSpec::new(args.seed).rng();
    let mut draw = || match &sampler {
        AnySampler::Wishart(s) => s.draw(&mut rng),
        AnySampler::Stiefel(s) => s.draw(&mut rng),
    };
    match args.format {
        TableFormat::Csv => {
            writeln!(out, "x,y,z")?;
            for _ in 0..args.count {
                let w = draw()?;
                writeln!(
                    out,
                    "{},{},{}",
                    format_f64(w.x),
                    format_f64(w.y),
                    format_f64(w.z)
                )?;
            }
        }
        TableFormat::Json => {
            // Streamed so large counts never sit in memory.
            write!(out, "[")?;
            for i in 0..args.count {
                let w = draw()?;
                let record = params
                    .clone()
                    .value("x", format_f64(w.x))
                    .value("y", format_f64(w.y))
                    .value("z", format_f64(w.z))
                    .meta("index", i);
                if i > 0 {
                    write!(out, ",")?;
                }
                write!(out, "\n  ")?;
                serde_json::to_writer(&mut *out, &record)?;
            }
            writeln!(out, "\n]")?;
        }
    }
    Ok(Exit::Success)
}

pub fn asymptotics<W: Write>(args: &AsymptoticsArgs, out: &mut W) -> Result<Exit, CliError> {
    let ratio: Rational = parse_rational(&args.ratio)?;
    let study = DecayStudy::doubling(args.m, args.t, ratio, args.n_min, args.n_max)?;
    let report = coefficient_report(&study)?;
    let slope = report.slope.map_or_else(
        || "n/a (fewer than 3 points)".to_owned(),
        |s| format!("{s:.6}"),
    );
    let base = OutputRecord::new("asymptotics")
        .param("m", args.m)
        .param("t", args.t)
        .param("ratio", &study.ratio)
        .param("n_min", args.n_min)
        .param("n_max", args.n_max);
    let scaled = |value: &Rational, n: u64| value.as_f64() * (n as f64).powi(args.t as i32);

    match args.format {
        TextFormat::Text => {
            writeln!(
                out,
                "E[S11^{} S12^{}] for k = {} n",
                args.m,
                2 * args.t,
                study.ratio
            )?;
            writeln!(out, "n,k,value,value_decimal,value_times_n^t")?;
            for row in &report.table {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    row.n,
                    row.k,
                    format_rational(&row.value),
                    format_f64(row.value.as_f64()),
                    format_f64(scaled(&row.value, row.n))
                )?;
            }
            writeln!(
                out,
                "fitted log-log slope: {slope} (expected {})",
                -(args.t as i64)
            )?;
            writeln!(
                out,
                "empirical coefficient (extrapolated value * n^t): {}",
                format_f64(report.empirical)
            )?;
            writeln!(
                out,
                "limit of the closed form, (2t-1)!! (1-r)^t r^(t+m): {} = {}",
                format_rational(&report.analytic),
                format_f64(report.analytic.as_f64())
            )?;
            writeln!(
                out,
                "relative gap empirical vs limit: {:.3e}",
                report.relative_gap()
            )?;
            writeln!(
                out,
                "quoted constant, (2t-1)!!/2^t r^t (1-t)^(t+m): {} = {} ({})",
                format_rational(&report.quoted),
                format_f64(report.quoted.as_f64()),
                if report.quoted_matches(0.02) {
                    "agrees with the empirical coefficient"
                } else {
                    "does not match the empirical coefficient"
                }
            )?;
        }
        TextFormat::Json => {
            let mut records: Vec<_> = report
                .table
                .iter()
                .map(|row| {
                    base.clone()
                        .value("n", row.n)
                        .value("k", row.k)
                        .value("value", format_rational(&row.value))
                        .value("value_decimal", format_f64(row.value.as_f64()))
                        .value("value_times_n^t", format_f64(scaled(&row.value, row.n)))
                        .meta("kind", "row")
                })
                .collect();
            let mut summary = base
                .clone()
                .value("empirical_coefficient", format_f64(report.empirical))
                .value("limit_coefficient", format_rational(&report.analytic))
                .value(
                    "limit_coefficient_decimal",
                    format_f64(report.analytic.as_f64()),
                )
                .value("quoted_coefficient", format_rational(&report.quoted))
                .value("quoted_matches", report.quoted_matches(0.02))
                .meta("kind", "summary")
                .meta("points", report.table.len());
            if let Some(s) = report.slope {
                summary = summary.value("slope", format_f64(s));
            }
            summary.error = Some(format!("{:.3e}", report.relative_gap()));
            records.push(summary);
            write_json(out, &records)?;
        }
    }
    Ok(Exit::Success)
}
