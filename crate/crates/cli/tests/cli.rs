use std::process::{Command, Output};

use matbeta::{closed_form, BetaParams, MomentIndex, Rational, Scalar};
use matbeta_cli::output::OutputRecord;
use matbeta_cli::parse::parse_rational;
use matbeta_cli::{run, Exit};
use proptest::prelude::*;

fn matbeta(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_matbeta"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = matbeta(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn exit_code(args: &[&str]) -> (i32, String) {
    let out = matbeta(args);
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn moment_examples() {
    let m = |extra: &[&str]| {
        let mut args = vec!["moment", "--alpha", "1", "--beta", "1"];
        args.extend_from_slice(extra);
        stdout(&args).trim().to_owned()
    };
    assert_eq!(
        m(&["--m", "1", "--r", "0", "--z", "0", "--mode", "exact"]),
        "1/2"
    );
    assert_eq!(m(&["--m", "0", "--r", "0", "--z", "3"]), "0");
    assert_eq!(
        m(&["--m", "1", "--r", "1", "--z", "0", "--mode", "exact"]),
        "2/9"
    );
    let float: f64 = m(&["--m", "1", "--r", "1", "--mode", "float"])
        .parse()
        .unwrap();
    assert_eq!(float, 2.0 / 9.0);
}

#[test]
fn invalid_parameters_exit_2_and_name_the_constraint() {
    let (code, err) = exit_code(&["moment", "--alpha", "1/2", "--beta", "1"]);
    assert_eq!(code, 2);
    assert!(err.contains("alpha") && err.contains("1/2"), "{err}");
    let (code, err) = exit_code(&["moment", "--alpha", "1", "--beta", "-3"]);
    assert_eq!(code, 2);
    assert!(err.contains("beta"), "{err}");
    let (code, err) = exit_code(&["moment", "--alpha", "2/x", "--beta", "1"]);
    assert_eq!(code, 2);
    assert!(err.contains("malformed"), "{err}");
    assert_eq!(exit_code(&["moment", "--alpha", "1"]).0, 2);
    assert_eq!(exit_code(&["nonsense"]).0, 2);
    assert_eq!(
        exit_code(&["table", "--alpha", "1", "--beta", "1", "--m", "0..3:0"]).0,
        2
    );
}

#[test]
fn help_and_version_succeed() {
    assert_eq!(exit_code(&["--help"]).0, 0);
    assert_eq!(exit_code(&["--version"]).0, 0);
    assert_eq!(exit_code(&["verify", "--help"]).0, 0);
}

#[test]
fn table_small_grid() {
    let text = stdout(&[
        "table", "--alpha", "1", "--beta", "1", "--m", "0..1", "--r", "0..1", "--z", "0,2",
    ]);
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "alpha,beta,m,r,z,value");
    assert_eq!(lines.len(), 9);
    for needle in ["1,1,1,0,0,1/2", "1,1,1,1,0,2/9", "1,1,0,0,2,1/18"] {
        assert!(lines.contains(&needle), "{needle}");
    }
}

#[test]
fn table_empty_range_is_header_only() {
    let text = stdout(&["table", "--alpha", "1", "--beta", "1", "--m", "2..1"]);
    assert_eq!(text, "alpha,beta,m,r,z,value\n");
}

#[test]
fn table_is_symmetric_in_m_and_r() {
    let text = stdout(&[
        "table", "--alpha", "3/2", "--beta", "7/2", "--m", "0..3", "--r", "0..3", "--z", "0..4",
    ]);
    let rows: Vec<Vec<&str>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    for row in &rows {
        let mirror = rows
            .iter()
            .find(|o| o[2] == row[3] && o[3] == row[2] && o[4] == row[4])
            .unwrap();
        assert_eq!(row[5], mirror[5]);
    }
}

#[test]
fn json_table_round_trips_to_library_values() {
    let text = stdout(&[
        "table", "--alpha", "3/4", "--beta", "5/2", "--m", "0..2", "--r", "0..2", "--z", "0..4",
        "--format", "json",
    ]);
    let records: Vec<OutputRecord> = serde_json::from_str(&text).unwrap();
    assert_eq!(records.len(), 45);
    let p = BetaParams::new(Rational::from_ratio(3, 4), Rational::from_ratio(5, 2)).unwrap();
    for rec in records {
        let idx = MomentIndex::new(
            rec.params["m"].parse().unwrap(),
            rec.params["r"].parse().unwrap(),
            rec.params["z"].parse().unwrap(),
        );
        assert_eq!(
            parse_rational(&rec.values["value"]).unwrap(),
            closed_form::moment(&p, idx)
        );
        assert_eq!(rec.metadata["mode"], "exact");
    }
}

#[test]
fn verify_exact_passes() {
    let text = stdout(&["verify", "--suite", "exact", "--max-order", "4"]);
    assert!(
        text.ends_with("5650 checks, 0 failed\n"),
        "{}",
        text.lines().last().unwrap()
    );
    assert!(text.lines().all(|l| !l.starts_with("FAIL")));
}

#[test]
fn verify_quadrature_passes_at_2_2() {
    let text = stdout(&[
        "verify",
        "--suite",
        "quadrature",
        "--alpha",
        "2",
        "--beta",
        "2",
    ]);
    assert!(text.ends_with("80 checks, 0 failed\n"));
}

#[test]
fn verify_reports_failures_with_exit_1() {
    // An absurdly tight acceptance band must fail some sampled check.
    let (code, _) = exit_code(&[
        "verify",
        "--suite",
        "montecarlo",
        "--samples",
        "2000",
        "--ks-samples",
        "2000",
        "--sigmas",
        "1e-9",
    ]);
    assert_eq!(code, 1);
}

#[test]
fn verify_bad_arguments_exit_2() {
    assert_eq!(
        exit_code(&[
            "verify",
            "--suite",
            "quadrature",
            "--alpha",
            "1",
            "--beta",
            "1"
        ])
        .0,
        2
    );
    assert_eq!(exit_code(&["verify", "--alpha", "2"]).0, 2);
    assert_eq!(exit_code(&["verify", "--suite", "everything"]).0, 2);
    assert_eq!(
        exit_code(&["verify", "--suite", "montecarlo", "--samples", "1"]).0,
        2
    );
}

#[test]
fn samples_stay_in_domain() {
    for args in [
        &[
            "sample",
            "--sampler",
            "wishart",
            "--alpha",
            "3/4",
            "--beta",
            "0.6",
            "--count",
            "5000",
        ][..],
        &[
            "sample",
            "--sampler",
            "stiefel",
            "--n",
            "5",
            "--k",
            "2",
            "--count",
            "5000",
        ][..],
    ] {
        let text = stdout(args);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x,y,z"));
        let mut count = 0;
        for line in lines {
            let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
            let w = matbeta::Sym2Matrix::new(v[0], v[1], v[2]);
            assert!(w.in_domain(), "{line}");
            count += 1;
        }
        assert_eq!(count, 5000);
    }
}

#[test]
fn stiefel_column_means_match_closed_form() {
    let n = 200_000;
    let text = stdout(&[
        "sample",
        "--sampler",
        "stiefel",
        "--n",
        "8",
        "--k",
        "4",
        "--count",
        &n.to_string(),
        "--seed",
        "3",
    ]);
    let z2: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| {
            l.rsplit(',')
                .next()
                .unwrap()
                .parse::<f64>()
                .unwrap()
                .powi(2)
        })
        .collect();
    let mean = z2.iter().sum::<f64>() / n as f64;
    let var = z2.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let se = (var / n as f64).sqrt();
    assert!(
        (mean - 1.0 / 35.0).abs() < 5.0 * se,
        "{mean} vs 1/35 (se {se})"
    );
}

#[test]
fn sample_rejects_bad_frames_and_flag_mixes() {
    assert_eq!(
        exit_code(&["sample", "--sampler", "stiefel", "--n", "8", "--k", "1"]).0,
        2
    );
    assert_eq!(
        exit_code(&["sample", "--sampler", "stiefel", "--n", "5", "--k", "4"]).0,
        2
    );
    assert_eq!(
        exit_code(&[
            "sample",
            "--sampler",
            "stiefel",
            "--alpha",
            "2",
            "--beta",
            "2"
        ])
        .0,
        2
    );
    assert_eq!(
        exit_code(&["sample", "--sampler", "wishart", "--alpha", "2"]).0,
        2
    );
    assert_eq!(
        exit_code(&[
            "sample",
            "--sampler",
            "wishart",
            "--alpha",
            "2",
            "--beta",
            "2",
            "--n",
            "8"
        ])
        .0,
        2
    );
}

#[test]
fn sample_json_is_an_array_of_records() {
    let text = stdout(&[
        "sample",
        "--sampler",
        "wishart",
        "--alpha",
        "2",
        "--beta",
        "2",
        "--count",
        "3",
        "--format",
        "json",
    ]);
    let records: Vec<OutputRecord> = serde_json::from_str(&text).unwrap();
    assert_eq!(records.len(), 3);
    assert_eq!(records[2].metadata["index"], "2");
    assert_eq!(records[0].params["sampler"], "wishart");
    let empty = stdout(&[
        "sample",
        "--sampler",
        "wishart",
        "--alpha",
        "2",
        "--beta",
        "2",
        "--count",
        "0",
        "--format",
        "json",
    ]);
    assert!(serde_json::from_str::<Vec<OutputRecord>>(&empty)
        .unwrap()
        .is_empty());
}

#[test]
fn asymptotics_reports_slope_and_constants() {
    let text = stdout(&[
        "asymptotics",
        "--m",
        "0",
        "--t",
        "1",
        "--ratio",
        "1/2",
        "--n-min",
        "40",
        "--n-max",
        "1280",
    ]);
    let slope_line = text
        .lines()
        .find(|l| l.starts_with("fitted log-log slope"))
        .unwrap();
    let slope: f64 = slope_line
        .split_whitespace()
        .nth(3)
        .unwrap()
        .parse()
        .unwrap();
    assert!((slope + 1.0).abs() < 0.1, "{slope}");
    assert!(text.contains("(1-r)^t r^(t+m): 1/4"));
    assert!(text.contains("(1-t)^(t+m): 0 ="));
    assert!(text.contains("does not match"));
    assert_eq!(
        text.lines()
            .filter(|l| l.starts_with(|c: char| c.is_ascii_digit()))
            .count(),
        6
    );
}

#[test]
fn asymptotics_zero_t_is_flat() {
    let text = stdout(&["asymptotics", "--m", "0", "--t", "0", "--format", "json"]);
    let records: Vec<OutputRecord> = serde_json::from_str(&text).unwrap();
    let (rows, summary) = records.split_at(records.len() - 1);
    assert!(rows.iter().all(|r| r.values["value"] == "1"));
    assert_eq!(summary[0].values["slope"].parse::<f64>().unwrap(), 0.0);
}

#[test]
fn asymptotics_invalid_schedule_exit_2() {
    assert_eq!(exit_code(&["asymptotics", "--ratio", "1/3"]).0, 2);
    assert_eq!(
        exit_code(&["asymptotics", "--ratio", "1/40", "--n-min", "40"]).0,
        2
    );
    assert_eq!(exit_code(&["asymptotics", "--ratio", "3/2"]).0, 2);
    assert_eq!(
        exit_code(&["asymptotics", "--n-min", "80", "--n-max", "40"]).0,
        2
    );
}

fn run_in_process(args: &[String]) -> (Exit, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["matbeta".to_owned()];
    argv.extend_from_slice(args);
    let exit = run(argv, &mut out, &mut err);
    (exit, String::from_utf8(out).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_output_round_trips(
        an in 3i64..40, ad in 1i64..6, bn in 3i64..40, bd in 1i64..6,
        m in 0u32..5, r in 0u32..5, z in 0u32..7,
    ) {
        prop_assume!(2 * an > ad && 2 * bn > bd);
        let (alpha, beta) = (format!("{an}/{ad}"), format!("{bn}/{bd}"));
        let args: Vec<String> = ["moment", "--alpha", &alpha, "--beta", &beta, "--m", &m.to_string(), "--r", &r.to_string(), "--z", &z.to_string()]
            .iter().map(|s| s.to_string()).collect();
        let (exit, text) = run_in_process(&args);
        prop_assert_eq!(exit, Exit::Success);
        let p = BetaParams::new(Rational::from_ratio(an, ad), Rational::from_ratio(bn, bd)).unwrap();
        let expected = closed_form::moment(&p, MomentIndex::new(m, r, z));
        prop_assert_eq!(parse_rational(text.trim()).unwrap(), expected.clone());

        let mut float_args = args.clone();
        float_args.extend(["--mode".to_owned(), "float".to_owned()]);
        let (_, text) = run_in_process(&float_args);
        let v: f64 = text.trim().parse().unwrap();
        prop_assert!((v - expected.as_f64()).abs() <= 1e-13 * expected.as_f64().abs());
    }

    #[test]
    fn exit_codes_are_always_0_1_or_2(args in prop::collection::vec(
        prop::sample::select(vec!["--alpha", "--beta", "--m", "--z", "--mode", "float", "1", "3/4", "0.5", "-1", "1/0", "x", "7", ""]),
        0..8,
    )) {
        let mut argv = vec!["moment".to_owned()];
        argv.extend(args.into_iter().map(str::to_owned));
        let (exit, _) = run_in_process(&argv);
        prop_assert!(matches!(exit.code(), 0..=2));
    }
}
