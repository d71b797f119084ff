use std::path::Path;
use std::process::{Command, Output};

use choquard_cli::commands::fmt;
use choquard_cli::{parse_config, run_command, validate_for, Command as Cmd, ConfigError, RunConfig, Status};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_choquard")).args(args).output().expect("binary runs")
}

fn with_config(dir: &Path, text: &str) -> String {
    let p = dir.join("run.cfg");
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn defaults_fill_omitted_keys() {
    let cfg = parse_config("N=5\nmu=0.5").unwrap();
    assert_eq!(cfg, RunConfig::default());
    assert_eq!(cfg.quad.radial_nodes, 256);
    assert_eq!(cfg.quad.angular_nodes, 128);
    assert_eq!(cfg.tol, 1e-9);
}

#[test]
fn comments_and_blank_lines_are_ignored() {
    let cfg = parse_config("# header\n\nN = 6   # dimension\n  eps_schedule = 0.2, 0.1\n").unwrap();
    assert_eq!(cfg.dim, 6);
    assert_eq!(cfg.eps_schedule, vec![0.2, 0.1]);
}

#[test]
fn mu_at_least_n_is_rejected_by_key() {
    match parse_config("mu=6.0") {
        Err(ConfigError::Invalid { key, .. }) => assert_eq!(key, "mu"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn parse_errors_carry_line_numbers() {
    assert!(matches!(parse_config("N=five"), Err(ConfigError::Parse { line: 1, .. })));
    assert!(matches!(parse_config("N=5\n\nradius=2"), Err(ConfigError::Parse { line: 3, .. })));
    assert!(matches!(parse_config("N=5\nN=6"), Err(ConfigError::Parse { line: 2, .. })));
    assert!(matches!(parse_config("tol"), Err(ConfigError::Parse { line: 1, .. })));
}

#[test]
fn value_checks_name_the_key() {
    for (text, want) in [
        ("eps=1.5", "eps"),
        ("eps_schedule=0.01,0.02", "eps_schedule"),
        ("radial_nodes=4", "radial_nodes"),
        ("tol=0", "tol"),
        ("max_iter=0", "max_iter"),
        ("lambda=-1", "lambda"),
        ("sample_points=1", "sample_points"),
    ] {
        match parse_config(text) {
            Err(ConfigError::Invalid { key, .. }) => assert_eq!(key, want, "{text}"),
            other => panic!("{text}: {other:?}"),
        }
    }
}

#[test]
fn solver_commands_need_the_solver_regime() {
    let cfg = parse_config("N=3\nmu=0.5").unwrap();
    assert!(validate_for(Cmd::Constants, &cfg).is_ok());
    assert!(validate_for(Cmd::Solve, &cfg).is_err());
    assert!(validate_for(Cmd::Continuation, &cfg).is_err());
    let cfg = parse_config("mu=4.5").unwrap();
    assert!(validate_for(Cmd::Bubble, &cfg).is_err());
}

#[test]
fn command_names_round_trip() {
    for c in Cmd::ALL {
        assert_eq!(Cmd::from_name(c.name()), Some(c));
    }
    assert_eq!(Cmd::from_name("nope"), None);
}

#[test]
fn floats_use_shortest_round_trip() {
    for x in [0.1, 1.0, 1e-10, 6.290094680964245, -0.0, 12345.678] {
        assert_eq!(fmt(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
    }
    assert_eq!(fmt(1.0), "1.0");
}

#[test]
fn critical_point_on_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bin(&["critical-point", "--out", &tmp.path().to_string_lossy()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lambda_bar = text.lines().find_map(|l| l.strip_prefix("lambda_bar=")).unwrap();
    assert!((lambda_bar.parse::<f64>().unwrap() - 1.0).abs() < 1e-8, "{lambda_bar}");
    assert!(text.lines().any(|l| l == "nondegenerate=true"));
    let file = std::fs::read_to_string(tmp.path().join("critical_point.txt")).unwrap();
    assert_eq!(file.trim_end(), text.trim_end());
}

#[test]
fn constants_at_mu_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = with_config(tmp.path(), "N=5\nmu=0\n");
    let out = bin(&["constants", "--config", &cfg, "--out", &tmp.path().join("o").to_string_lossy()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().lines().any(|l| l == "C_HLS=1.0"));
}

#[test]
fn config_errors_exit_2_and_write_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    for text in ["eps_schedule=0.01,0.02\n", "N=five\n", "radius=1\n", "mu=6.0\n"] {
        let cfg = with_config(tmp.path(), text);
        let dir = tmp.path().join("o");
        let out = bin(&["continuation", "--config", &cfg, "--out", &dir.to_string_lossy()]);
        assert_eq!(out.status.code(), Some(2), "{text}");
        assert!(!dir.exists(), "{text}");
        assert!(!out.stderr.is_empty());
    }
    let dir = tmp.path().join("o");
    let out = bin(&["solve", "--config", &tmp.path().join("missing.cfg").to_string_lossy(), "--out", &dir.to_string_lossy()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.exists());
}

#[test]
fn non_convergence_exits_1_with_partial_report() {
    let cfg = parse_config("max_iter=1").unwrap();
    let (out, status) = run_command(Cmd::Solve, &cfg);
    assert!(matches!(status, Status::NotConverged(_)));
    let csv = String::from_utf8(out.files["solve.csv"].clone()).unwrap();
    assert!(csv.starts_with("eps,lambda_fit,lambda_fit_scaled,energy,residual,iters,converged\n"));
    assert!(csv.trim_end().ends_with(",1,false"));

    let tmp = tempfile::tempdir().unwrap();
    let c = with_config(tmp.path(), "max_iter=1\n");
    let dir = tmp.path().join("o");
    let out = bin(&["solve", "--config", &c, "--out", &dir.to_string_lossy()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(dir.join("solve.csv").exists() && dir.join("solution.csv").exists());
}

#[test]
fn continuation_is_byte_identical() {
    let cfg = RunConfig::default();
    let (a, sa) = run_command(Cmd::Continuation, &cfg);
    let (b, sb) = run_command(Cmd::Continuation, &cfg);
    assert_eq!(sa, Status::Success);
    assert_eq!(sb, Status::Success);
    assert_eq!(a, b);
    let csv = String::from_utf8(a.files["continuation.csv"].clone()).unwrap();
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn every_csv_has_a_header() {
    let cfg = parse_config("sample_points=4\ntau_points=2\nlambda_points=2\nradial_nodes=64").unwrap();
    for cmd in [Cmd::Bubble, Cmd::Robin, Cmd::ReducedEnergy] {
        let (out, status) = run_command(cmd, &cfg);
        assert_eq!(status, Status::Success, "{}", cmd.name());
        for (name, bytes) in &out.files {
            let text = String::from_utf8(bytes.clone()).unwrap();
            let mut lines = text.lines();
            let header = lines.next().unwrap();
            assert!(header.chars().next().unwrap().is_ascii_alphabetic(), "{name}: {header}");
            let cols = header.split(',').count();
            if name.ends_with(".csv") {
                assert!(lines.all(|l| l.split(',').count() == cols), "{name}");
            }
        }
    }
}

#[test]
fn bubble_command_reports_a_small_residual() {
    let cfg = parse_config("sample_points=5\nlambda=1").unwrap();
    let (out, status) = run_command(Cmd::Bubble, &cfg);
    assert_eq!(status, Status::Success);
    let worst: f64 = out
        .stdout
        .iter()
        .find_map(|l| l.strip_prefix("max_relative_residual="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(worst < 1e-4, "{worst}");
}

#[test]
fn verify_expansion_on_a_short_schedule() {
    let cfg = parse_config("eps_schedule=0.05,0.02").unwrap();
    let (out, status) = run_command(Cmd::VerifyExpansion, &cfg);
    assert_eq!(status, Status::Success);
    let csv = String::from_utf8(out.files["expansion.csv"].clone()).unwrap();
    let last = csv.lines().last().unwrap();
    let rel: f64 = last.rsplit(',').next().unwrap().parse().unwrap();
    assert!(rel < 0.25, "{rel}");
}
