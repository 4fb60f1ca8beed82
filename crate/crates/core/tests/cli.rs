use std::process::{Command, Output};

use mero_wright::cli::{fmt_num, from_json, CommandResult};

fn exe() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mero-wright"))
}

fn run(args: &[&str]) -> Output {
    exe().args(args).output().unwrap()
}

const CLASS: [&str; 4] = ["--alpha", "0.5", "--eta", "1"];

fn with(extra: &[&'static str]) -> Vec<&'static str> {
    CLASS.iter().copied().chain(extra.iter().copied()).collect()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&[]).status.code(), Some(2));
}

#[test]
fn sigma_in_every_format() {
    let json = run(&with(&["sigma", "--to", "3"]));
    assert_eq!(json.status.code(), Some(0));
    let report = from_json(std::str::from_utf8(&json.stdout).unwrap()).unwrap();
    let CommandResult::Sigma { rows } = &report.result else {
        panic!("wrong result kind")
    };
    let values: Vec<String> = rows.iter().map(|r| fmt_num(r.sigma.unwrap())).collect();

    let csv =
        String::from_utf8(run(&with(&["--format", "csv", "sigma", "--to", "3"])).stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("k,sigma,ln_sigma"));
    for (line, v) in lines.zip(&values) {
        assert_eq!(line.split(',').nth(1), Some(v.as_str()));
    }

    let text =
        String::from_utf8(run(&with(&["--format", "text", "sigma", "--to", "3"])).stdout).unwrap();
    assert!(text.contains("pass: true (exit 0)"));
    for v in &values {
        assert!(text.contains(v.as_str()));
    }
}

#[test]
fn empty_sigma_range() {
    let out = run(&with(&[
        "--format", "csv", "sigma", "--from", "5", "--to", "4",
    ]));
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap().trim(),
        "k,sigma,ln_sigma"
    );
}

#[test]
fn extremal_coefficients() {
    let out = run(&with(&["--format", "csv", "extremal", "--k", "2"]));
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0], format!("1,{}", fmt_num(0.0)));
    let a2: f64 = rows[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!((a2 - 0.6).abs() < 1e-14);
    assert_eq!(run(&with(&["extremal", "--k", "0"])).status.code(), Some(2));
}

#[test]
fn bounds_rows() {
    let out = run(&with(&["--format", "csv", "bounds", "--r", "0.5"]));
    let csv = String::from_utf8(out.stdout).unwrap();
    let cells: Vec<f64> = csv
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(|c| c.parse().unwrap())
        .collect();
    let want = [0.5, 5.0 / 3.0, 7.0 / 3.0, 4.0 - 2.0 / 3.0, 4.0 + 2.0 / 3.0];
    for (c, w) in cells.iter().zip(want) {
        assert!((c - w).abs() < 1e-14, "{c} vs {w}");
    }
    assert_eq!(run(&with(&["bounds", "--r", "1.0"])).status.code(), Some(2));
}

#[test]
fn radii_csv_columns() {
    let out = run(&with(&[
        "--k-max", "6", "--delta", "0.2", "--kappa", "0.1", "--format", "csv", "radii",
    ]));
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(
        csv.starts_with("k,starlike_candidate,starlike_printed,convex_candidate,convex_printed\n")
    );
    assert_eq!(csv.lines().count(), 7);
    assert_eq!(
        run(&with(&["--delta", "1", "radii"])).status.code(),
        Some(2)
    );
}

#[test]
fn convolve_exit_codes() {
    let five = ["--upper", "5", "--k-max", "7"];
    let mut args = with(&five);
    args.extend(["convolve", "--f", "0.02,0.001", "--g", "0.01"]);
    assert_eq!(run(&args).status.code(), Some(0));
    let mut args = with(&five);
    args.extend([
        "convolve",
        "--mode",
        "quadratic",
        "--f",
        "0.02",
        "--g",
        "0.01",
    ]);
    assert_eq!(run(&args).status.code(), Some(0));
    // f is not a member
    let mut args = with(&five);
    args.extend(["convolve", "--f", "0.5", "--g", "0.01"]);
    assert_eq!(run(&args).status.code(), Some(1));
    assert_eq!(
        run(&with(&["convolve", "--mode", "nope", "--g", "0.1"]))
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn out_file_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"wright": {"upper": [[1, 1]], "lower": [[1, 1]]},
            "class": {"alpha": 0.5, "eta": 1},
            "function": {"coeffs": [0.3, 0.1]},
            "plan": {"radii": [0.5, 0.9], "angles": 64, "include_real_axis_ramp": false},
            "output": "text"}"#,
    )
    .unwrap();
    let out = dir.path().join("member.txt");
    let status = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "member",
    ])
    .status;
    assert_eq!(status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("command: member\n"));

    // flags win over the file
    let status = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "--coeffs",
        "0.9",
        "member",
    ])
    .status;
    assert_eq!(status.code(), Some(1));
    assert_eq!(
        run(&["--config", "/nonexistent.json", "member"])
            .status
            .code(),
        Some(2)
    );
}
