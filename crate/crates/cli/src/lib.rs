//! Command-line front end for the `matbeta` moment engines.
//!
//! [`run`] parses arguments, dispatches to a subcommand and maps every
//! outcome to one of three exit codes: 0 success, 1 a verification check
//! failed, 2 bad arguments.

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub mod args;
pub mod commands;
pub mod error;
pub mod output;
pub mod parse;
pub mod verify;

pub use error::{CliError, Exit};

use args::{Cli, Command, Suite, VerifyArgs};
use matbeta::quadrature::QuadratureSpec;
use verify::{McConfig, Report};

pub fn run<I, T, W, E>(argv: I, out: &mut W, err: &mut E) -> Exit
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    W: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version arrive as "errors" too.
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                Exit::Usage
            } else {
                let _ = write!(out, "{text}");
                Exit::Success
            };
        }
    };
    let result = match &cli.command {
        Command::Moment(a) => commands::moment(a, out),
        Command::Table(a) => commands::table(a, out),
        Command::Verify(a) => verify_command(a, out),
        Command::Sample(a) => commands::sample(a, out),
        Command::Asymptotics(a) => commands::asymptotics(a, out),
    };
    let result = result.and_then(|exit| {
        out.flush()?;
        Ok(exit)
    });
    match result {
        Ok(exit) => exit,
        Err(e) => {
            let exit = e.exit();
            if exit != Exit::Success {
                let _ = writeln!(err, "error: {e}");
            }
            exit
        }
    }
}

fn verify_command<W: Write>(args: &VerifyArgs, out: &mut W) -> Result<Exit, CliError> {
    let single = match (&args.alpha, &args.beta) {
        (Some(a), Some(b)) => Some(commands::parse_params(a, b)?),
        (None, None) => None,
        _ => {
            return Err(CliError::Usage(
                "--alpha and --beta must be given together".into(),
            ))
        }
    };
    if args.sigmas.is_nan() || args.sigmas <= 0.0 || args.tolerance.is_nan() || args.tolerance < 0.0
    {
        return Err(CliError::Usage(
            "--sigmas must be positive and --tolerance nonnegative".into(),
        ));
    }
    let frame = match (args.n, args.k) {
        (Some(n), Some(k)) => Some(matbeta::sampling::StiefelSpec::new(n, k)?),
        (None, None) => None,
        _ => return Err(CliError::Usage("--n and --k must be given together".into())),
    };
    let run_suite = |s: Suite| args.suite == s || args.suite == Suite::All;
    let mut report = Report::default();

    if run_suite(Suite::Exact) {
        let params = single.clone().map_or_else(verify::exact_grid, |p| vec![p]);
        let order = args.max_order.unwrap_or(6);
        report.extend(verify::exact_checks(
            &params,
            order,
            args.max_t.unwrap_or(order),
        ));
    }
    if run_suite(Suite::Quadrature) {
        let params = single
            .clone()
            .map_or_else(verify::quadrature_grid, |p| vec![p]);
        let spec = QuadratureSpec::new(args.cells, args.points);
        report.extend(verify::quadrature_checks(
            &params,
            args.max_order.unwrap_or(3),
            args.max_t.unwrap_or(2),
            &spec,
            args.tolerance,
        )?);
    }
    if run_suite(Suite::Montecarlo) {
        let p = match &single {
            Some(p) => p.clone(),
            None => commands::parse_params("2", "2")?,
        };
        let cfg = McConfig {
            samples: args.samples,
            ks_samples: args.ks_samples,
            seed: args.seed,
            sigmas: args.sigmas,
        };
        let frame = frame.or_else(|| verify::matching_frame(&p));
        report.extend(verify::montecarlo_checks(
            &p,
            frame,
            args.max_order.unwrap_or(2),
            args.max_t.unwrap_or(1),
            &cfg,
        )?);
    }
    report.render(out)?;
    Ok(if report.passed() {
        Exit::Success
    } else {
        Exit::CheckFailed
    })
}
