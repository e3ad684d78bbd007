use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fermicorr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fermicorr")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

const BONDING: &str = "FCIVEC 1 d=4 n=2 sz2=0
1100 0.5 0.0
1001 0.5 0.0
0110 -0.5 0.0
0011 0.5 0.0
";

#[test]
fn solve_writes_state_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    for (u, energy) in [("0", -2.0), ("4", 2.0 - 8f64.sqrt())] {
        let out = dir.path().join(format!("dimer_u{u}.fcivec"));
        let chain = format!("2,1,{u}");
        let o = fermicorr(&["solve", "--hubbard", &chain, "--out", path(&out), "--no-timestamp"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let side = read_json(&out.with_extension("json"));
        assert!((side["energy"].as_f64().unwrap() - energy).abs() < 1e-9);
        assert!(side["residual_norm"].as_f64().unwrap() < 1e-8);
        assert_eq!(side["near_degenerate"], Value::Bool(false));
        assert_eq!(side["provenance"]["config"]["hubbard"], Value::String(chain));
        assert!(side["provenance"].get("generated_unix").is_none());
        assert!(std::fs::read_to_string(&out).unwrap().starts_with("FCIVEC 1 d=4 n=2 sz2=0"));
    }
}

#[test]
fn input_errors_exit_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.fcivec");
    let missing = fermicorr(&["solve", "--fcidump", "/nonexistent/FCIDUMP", "--out", path(&out)]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("nonexistent"));
    assert_eq!(fermicorr(&["solve", "--hubbard", "2,1", "--out", path(&out)]).status.code(), Some(2));
    assert_eq!(fermicorr(&["solve", "--hubbard", "2,1,4"]).status.code(), Some(2));
    assert_eq!(fermicorr(&["sample-bases", "--bogus"]).status.code(), Some(2));
    assert_eq!(fermicorr(&["frobnicate"]).status.code(), Some(2));
    let bad = dir.path().join("bad.fcivec");
    std::fs::write(&bad, "not a state\n").unwrap();
    let csv = dir.path().join("s.csv");
    assert_eq!(fermicorr(&["sample-bases", "--state", path(&bad), "--out", path(&csv)]).status.code(), Some(2));
}

#[test]
fn non_convergence_exits_with_code_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.fcivec");
    let o = fermicorr(&["solve", "--hubbard", "6,1,4", "--tol", "1e-30", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn report_of_bonding_state() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("bonding.fcivec");
    std::fs::write(&state, BONDING).unwrap();
    let out = dir.path().join("report.json");
    let o = fermicorr(&["report", "--state", path(&state), "--out", path(&out), "--no-timestamp"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let doc = read_json(&out);
    let stored = &doc["stored"];
    assert!(stored["nonfreeness_bits"].as_f64().unwrap().abs() < 1e-9);
    assert!((stored["total_orbital_correlation_bits"].as_f64().unwrap() - 4.0).abs() < 1e-9);
    assert!((stored["mutual_information_ssr_bits"][0][1].as_f64().unwrap() - 3.0).abs() < 1e-9);
    let natural = &doc["natural"];
    assert!(natural["total_orbital_correlation_bits"].as_f64().unwrap().abs() < 1e-9);
    assert!(natural["ci_entropy_bits"].as_f64().unwrap().abs() < 1e-9);
    for suffix in ["stored", "natural", "occupations"] {
        let csv = std::fs::read_to_string(dir.path().join(format!("report.{suffix}.csv"))).unwrap();
        assert!(csv.starts_with("# fermicorr "), "{suffix}");
        assert!(csv.contains("# command: report"));
    }

    // Snapshot stability: a second run reproduces every byte.
    let first = std::fs::read(&out).unwrap();
    assert!(fermicorr(&["report", "--state", path(&state), "--out", path(&out), "--no-timestamp"])
        .status
        .success());
    assert_eq!(first, std::fs::read(&out).unwrap());
}

#[test]
fn report_of_determinant_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("det.fcivec");
    std::fs::write(&state, "FCIVEC 1 d=6 n=3 sz2=none\n110100 1.0 0.0\n").unwrap();
    let out = dir.path().join("r.json");
    assert!(fermicorr(&["report", "--state", path(&state), "--out", path(&out)]).status.success());
    let doc = read_json(&out);
    for key in ["nonfreeness_bits", "total_orbital_correlation_bits", "ci_entropy_bits"] {
        assert!(doc["stored"][key].as_f64().unwrap().abs() < 1e-12, "{key}");
    }
    assert!(doc["provenance"]["generated_unix"].is_u64());
}

#[test]
fn sample_bases_csv_layout_and_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("bonding.fcivec");
    std::fs::write(&state, BONDING).unwrap();
    let csv = dir.path().join("s.csv");
    let svg = dir.path().join("s.svg");
    let o = fermicorr(&[
        "sample-bases",
        "--state",
        path(&state),
        "--out",
        path(&csv),
        "--svg",
        path(&svg),
        "--n-samples",
        "500",
        "--mode",
        "near-identity",
        "--scale",
        "0.3",
        "--restricted",
        "--seed",
        "9",
        "--no-timestamp",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "sample_id,I_B_bits,ci_entropy_bits");
    assert_eq!(body.len(), 503);
    let min_i: f64 = body[501].strip_prefix("MIN_I,").unwrap().parse().unwrap();
    let min_h: f64 = body[502].strip_prefix("MIN_H,").unwrap().parse().unwrap();
    assert!(min_i.abs() < 1e-9 && min_h.abs() < 1e-9);
    for (k, row) in body[1..501].iter().enumerate() {
        let f: Vec<&str> = row.split(',').collect();
        assert_eq!(f[0].parse::<usize>().unwrap(), k);
        assert!(f[1].parse::<f64>().unwrap() >= min_i - 1e-9);
        assert!(f[2].parse::<f64>().unwrap() >= min_h - 1e-9);
    }
    assert!(text.contains("\"mode\":\"near-identity\",\"scale\":0.3,\"restricted\":true"));
    let svg = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(svg.matches("<circle").count(), 500);
    assert!(svg.contains("command: sample-bases"));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("bonding.fcivec");
    std::fs::write(&state, BONDING).unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "no-timestamp = true\n[sample-bases]\nn-samples = 40\nseed = 5\n").unwrap();
    let csv = dir.path().join("s.csv");
    let o = fermicorr(&[
        "--config",
        path(&cfg),
        "sample-bases",
        "--state",
        path(&state),
        "--out",
        path(&csv),
        "--seed",
        "6",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.contains("\"n-samples\":40,\"seed\":6"));
    assert!(!text.contains("generated_unix"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 43);

    std::fs::write(&cfg, "[sample-bases]\nwhatever = 1\n").unwrap();
    let o = fermicorr(&["--config", path(&cfg), "sample-bases", "--state", path(&state), "--out", path(&csv)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn selftest_passes() {
    let o = fermicorr(&["selftest"]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.lines().all(|l| l.starts_with("PASS")));
}
