//! End-to-end checks of the command-line surface: flags, formats, exit
//! codes.

use std::process::{Command, Output};

fn su2phase(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_su2phase"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 output")
}

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines
        .next()
        .expect("header row")
        .split(',')
        .map(str::to_owned)
        .collect();
    let rows = lines
        .map(|line| {
            line.split(',')
                .map(|cell| cell.parse::<f64>().expect("numeric cell"))
                .collect()
        })
        .collect();
    (header, rows)
}

#[test]
fn verify_passes_at_default_tolerance() {
    let output = su2phase(&["verify", "--max-n", "12", "--seed", "7"]);
    assert!(output.status.success(), "{output:?}");
    let doc: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();
    assert_eq!(doc["meta"]["seed"], 7);
    assert_eq!(doc["data"]["passed"], true);
    let identities = doc["data"]["identities"].as_array().unwrap();
    assert_eq!(identities.len(), 4);
    for identity in identities {
        assert!(identity["max_residual"].as_f64().unwrap() <= 1e-10);
    }
}

#[test]
fn verify_single_photon_even_odd_split() {
    // N = 1: both parity halves sit at exactly one half on the diagonal,
    // so the contract residual is at rounding level.
    let output = su2phase(&["verify", "--max-n", "1", "--tol", "1e-10"]);
    assert!(output.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();
    let identities = doc["data"]["identities"].as_array().unwrap();
    assert!(identities[0]["max_residual"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn verify_fails_below_the_floating_point_floor() {
    let output = su2phase(&["verify", "--max-n", "8", "--tol", "1e-18"]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn dmat_spin_half_beam_splitter() {
    let output = su2phase(&["dmat", "--j", "1/2", "--beta", "1.5707963267948966"]);
    assert!(output.status.success());
    let (header, rows) = parse_csv(&stdout(&output));
    assert_eq!(header, ["m_row", "m_col", "re", "im"]);
    assert_eq!(rows.len(), 4);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let expected = [
        (0.5, 0.5, r),
        (0.5, -0.5, -r),
        (-0.5, 0.5, r),
        (-0.5, -0.5, r),
    ];
    for (row, (m_row, m_col, re)) in rows.iter().zip(expected) {
        assert_eq!(row[0], m_row);
        assert_eq!(row[1], m_col);
        assert!((row[2] - re).abs() < 1e-14);
        assert_eq!(row[3].abs(), 0.0);
    }
}

#[test]
fn dmat_oracle_agrees_with_production() {
    let args = ["--j", "5/2", "--beta", "0.9"];
    let direct = su2phase(&[&["dmat"], &args[..]].concat());
    let oracle = su2phase(&[&["dmat"], &args[..], &["--oracle"]].concat());
    let (_, direct_rows) = parse_csv(&stdout(&direct));
    let (_, oracle_rows) = parse_csv(&stdout(&oracle));
    for (a, b) in direct_rows.iter().zip(&oracle_rows) {
        assert!((a[2] - b[2]).abs() < 1e-11);
    }
}

#[test]
fn dmat_rejects_unsupported_spin() {
    let output = su2phase(&["dmat", "--j", "101", "--beta", "0.5"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn curve_noon_four_is_constant_sixteen() {
    let output = su2phase(&[
        "curve",
        "--probe",
        "noon",
        "--n",
        "4",
        "--measurement",
        "dpc",
        "--steps",
        "40",
    ]);
    assert!(output.status.success());
    let (header, rows) = parse_csv(&stdout(&output));
    assert_eq!(header, ["phi", "cfi", "qfi"]);
    assert_eq!(rows.len(), 40);
    for row in &rows {
        assert!(
            (row[1] - 16.0).abs() <= 1e-8 * 16.0,
            "phi={}: {}",
            row[0],
            row[1]
        );
        assert!((row[2] - 16.0).abs() <= 1e-10);
    }
}

#[test]
fn curve_rejects_degenerate_ranges() {
    let output = su2phase(&["curve", "--steps", "1"]);
    assert_eq!(output.status.code(), Some(2));
    let output = su2phase(&["curve", "--phi-min", "2.0", "--phi-max", "1.0"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn estimate_reports_ratio_near_one() {
    let output = su2phase(&[
        "estimate", "--probe", "noon", "--n", "2", "--phi", "0.3", "--nu", "2000", "--trials",
        "40", "--seed", "1",
    ]);
    assert!(output.status.success(), "{output:?}");
    let doc: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();
    let data = &doc["data"];
    assert_eq!(data["rng_algorithm"], "chacha12");
    assert_eq!(data["fisher_information"].as_f64().unwrap(), 4.0);
    let ratio = data["ratio"].as_f64().unwrap();
    assert!(ratio > 0.5 && ratio < 2.0, "ratio {ratio}");

    // Same seed, same numbers.
    let again = su2phase(&[
        "estimate", "--probe", "noon", "--n", "2", "--phi", "0.3", "--nu", "2000", "--trials",
        "40", "--seed", "1",
    ]);
    let doc2: serde_json::Value = serde_json::from_str(&stdout(&again)).unwrap();
    assert_eq!(
        data["empirical_variance"],
        doc2["data"]["empirical_variance"]
    );
}

#[test]
fn estimate_csv_row_matches_header() {
    let output = su2phase(&[
        "estimate", "--probe", "noon", "--n", "1", "--nu", "500", "--trials", "10", "--format",
        "csv",
    ]);
    assert!(output.status.success());
    let (header, rows) = parse_csv(&stdout(&output));
    assert_eq!(rows.len(), 1);
    assert_eq!(header.len(), rows[0].len());
    assert!(header.contains(&"ratio".to_owned()));
}

#[test]
fn output_file_flag_writes_the_file() {
    let dir = std::env::temp_dir().join("su2phase-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("dmat.csv");
    let output = su2phase(&[
        "dmat",
        "--j",
        "1",
        "--beta",
        "0.4",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    assert!(stdout(&output).is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    assert!(written.starts_with("m_row,m_col,re,im\n"));
    assert!(written.ends_with('\n'));
    std::fs::remove_file(path).ok();
}

#[test]
fn unknown_flags_are_usage_errors() {
    let output = su2phase(&["curve", "--does-not-exist"]);
    assert_eq!(output.status.code(), Some(2));
    let output = su2phase(&["dmat", "--beta", "0.5"]); // missing --j
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn json_curve_carries_meta() {
    let output = su2phase(&[
        "curve", "--probe", "ec", "--alpha", "1.0", "--steps", "3", "--format", "json",
    ]);
    assert!(output.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();
    assert!(doc["meta"]["truncation_residual"].as_f64().unwrap() < 1e-12);
    assert!(doc["meta"]["version"].is_string());
    assert_eq!(doc["data"].as_array().unwrap().len(), 3);
}
