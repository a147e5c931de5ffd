use std::process::Command;

use prismbell_cli::emit::{format_real, render, round_real, Meta, OutputFormat, Payload};
use prismbell_core::{Regime, SweepRow};
use proptest::prelude::*;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_prismbell"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn exact_prints_decagonal_value() {
    let (code, stdout, _) = run(&["exact", "--n", "10", "--epsilon", "1", "--rho", "1", "--regime", "A"]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "regime,n,epsilon,rho,i_value,i_stderr\nA,10,1,1,2.8,0\n");
}

#[test]
fn usage_errors_exit_two() {
    let (code, stdout, stderr) = run(&["exact", "--n", "5", "--epsilon", "1", "--rho", "1", "--regime", "A"]);
    assert_eq!(code, 2);
    assert!(stdout.is_empty());
    assert!(stderr.contains("n must be even"));
    let (code, _, stderr) = run(&["simulate", "--n", "4", "--epsilon", "0", "--rho", "1", "--regime", "A"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("--trials"));
    let (code, _, _) = run(&["frobnicate"]);
    assert_eq!(code, 2);
    let (code, stdout, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("simulate"));
}

#[test]
fn unwritable_output_exits_one() {
    let (code, _, stderr) = run(&["lhv", "--out", "/nonexistent-dir/cert.json", "--format", "json"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("/nonexistent-dir/cert.json"));
}

#[test]
fn simulate_max_violation_is_exact() {
    let (code, stdout, _) = run(&[
        "simulate",
        "--n",
        "4",
        "--epsilon",
        "0",
        "--rho",
        "1",
        "--regime",
        "A",
        "--trials",
        "1000",
        "--seed",
        "7",
    ]);
    assert_eq!(code, 0);
    assert_eq!(stdout.lines().nth(1), Some("A,4,0,1,4,0"));
}

#[test]
fn lhv_certificate_json() {
    let (code, stdout, _) = run(&["lhv", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["max_i"], 2);
    assert_eq!(v["strategies"].as_array().unwrap().len(), 16);
    assert_eq!(v["meta"]["mode"], "enumeration");
}

#[test]
fn sweep_to_file_with_plot_script() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("rows.csv");
    let script = dir.path().join("plot.gp");
    let (code, stdout, _) = run(&[
        "sweep",
        "--n",
        "6",
        "--epsilon",
        "1",
        "--rho",
        "0,0.5,1",
        "--regime",
        "A",
        "--out",
        data.to_str().unwrap(),
        "--plot-script",
        script.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let text = std::fs::read_to_string(&data).unwrap();
    let values: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').nth(1).unwrap().parse().unwrap())
        .collect();
    let expected = [2.0, 2.0 + 0.5 * 8.0 / 6.0, 2.0 + 8.0 / 6.0];
    for (v, e) in values.iter().zip(expected) {
        assert!((v - e).abs() < 1e-11, "{v} vs {e}");
    }
    let gp = std::fs::read_to_string(&script).unwrap();
    assert!(gp.contains(data.to_str().unwrap()));
}

#[test]
fn sweep_json_has_rows_and_meta() {
    let (code, stdout, _) = run(&[
        "sweep",
        "--n",
        "4,10",
        "--epsilon",
        "0:1:0.5",
        "--rho",
        "1",
        "--format",
        "json",
        "--seed",
        "3",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 2 * 2 * 3);
    assert_eq!(v["meta"]["seed"], 3);
    assert_eq!(v["meta"]["mode"], "exact");
    assert_eq!(v["rows"][0]["regime"], "A");
}

fn arb_row() -> impl Strategy<Value = SweepRow> {
    (
        prop_oneof![Just(Regime::A), Just(Regime::B)],
        (2u32..500).prop_map(|h| 2 * h),
        0.0f64..=1.0,
        0.0f64..=1.0,
        0.0f64..=4.0,
        0.0f64..0.1,
    )
        .prop_map(|(regime, n, epsilon, rho, i_value, i_stderr)| SweepRow {
            regime,
            n,
            epsilon,
            rho,
            i_value,
            i_stderr,
        })
}

proptest! {
    #[test]
    fn emitted_csv_and_json_parse_back(rows in prop::collection::vec(arb_row(), 0..20)) {
        let payload = Payload::Rows { rows: &rows, table: None, meta: Meta::new(0, "exact") };

        let csv_text = render(payload, OutputFormat::Csv).unwrap();
        let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
        let parsed: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
        prop_assert_eq!(parsed.len(), rows.len());
        for (rec, row) in parsed.iter().zip(&rows) {
            prop_assert_eq!(rec[0].to_string(), row.regime.to_string());
            prop_assert_eq!(rec[1].parse::<u32>().unwrap(), row.n);
            for (field, value) in [(&rec[2], row.epsilon), (&rec[3], row.rho), (&rec[4], row.i_value), (&rec[5], row.i_stderr)] {
                let back: f64 = field.parse().unwrap();
                prop_assert_eq!(back, round_real(value));
                prop_assert_eq!(format_real(back), field);
                prop_assert!((back - value).abs() <= 1e-11 * value.abs().max(1e-300));
            }
        }

        let json_text = render(payload, OutputFormat::Json).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json_text).unwrap();
        let json_rows = v["rows"].as_array().unwrap();
        prop_assert_eq!(json_rows.len(), rows.len());
        for (jr, row) in json_rows.iter().zip(&rows) {
            prop_assert_eq!(jr["i_value"].as_f64().unwrap(), round_real(row.i_value));
            prop_assert_eq!(jr["epsilon"].as_f64().unwrap(), round_real(row.epsilon));
        }
    }
}
