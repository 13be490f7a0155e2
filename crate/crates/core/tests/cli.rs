//! Black-box tests of the command-line contract: exit codes, report shape,
//! determinism, and diagnostics for malformed inputs.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_entrocheck"))
}

#[test]
fn empty_campaign_exits_zero_with_warning() {
    let dir = tempfile::tempdir().unwrap();
    let campaign = dir.path().join("empty.json");
    std::fs::write(&campaign, r#"{"seed": 1, "entries": []}"#).unwrap();
    let out = bin()
        .args(["verify", "--campaign"])
        .arg(&campaign)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("warning"), "stderr: {stderr}");
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["results"].as_array().unwrap().len(), 0);
}

#[test]
fn corrupt_density_file_exits_two_naming_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let pmf = dir.path().join("broken.pmf.json");
    std::fs::write(&pmf, "{ definitely not a density").unwrap();
    let campaign = dir.path().join("c.json");
    std::fs::write(
        &campaign,
        format!(
            r#"{{"seed": 1, "entries": [{{"check": "discrete_sd_ratio", "source": "file", "path": {}}}]}}"#,
            serde_json::to_string(&pmf).unwrap()
        ),
    )
    .unwrap();
    let out = bin()
        .args(["verify", "--campaign"])
        .arg(&campaign)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("broken.pmf.json"), "stderr: {stderr}");
}

#[test]
fn unknown_check_exits_two() {
    let out = bin().args(["scan", "not_a_check"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_is_deterministic_given_seed() {
    let dir = tempfile::tempdir().unwrap();
    let campaign = dir.path().join("small.json");
    std::fs::write(
        &campaign,
        r#"{
  "seed": 7,
  "entries": [
    {"check": "ruzsa_triangle", "source": "generator", "trials": 20},
    {"check": "sum_difference", "source": "generator", "trials": 20},
    {"check": "det_minkowski", "source": "generator", "trials": 20}
  ]
}"#,
    )
    .unwrap();
    let run = || {
        let out = bin()
            .args(["verify", "--seed", "7", "--campaign"])
            .arg(&campaign)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        serde_json::to_string(&v["results"]).unwrap()
    };
    assert_eq!(run(), run());
}

#[test]
fn verify_accepts_file_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let pmf = dir.path().join("geom.json");
    std::fs::write(
        &pmf,
        r#"{"type": "finite", "version": 1, "group": {"kind": "finite_product", "moduli": [8]},
            "probs": [0.38, 0.24, 0.14, 0.09, 0.06, 0.04, 0.03, 0.02]}"#,
    )
    .unwrap();
    let campaign = dir.path().join("c.json");
    std::fs::write(
        &campaign,
        format!(
            r#"{{"seed": 0, "entries": [{{"check": "discrete_sd_ratio", "source": "file", "path": {}}}]}}"#,
            serde_json::to_string(&pmf).unwrap()
        ),
    )
    .unwrap();
    let out = bin()
        .args(["verify", "--campaign"])
        .arg(&campaign)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["results"][0]["status"], "observational");
}

#[test]
fn csv_format_emits_rows() {
    let dir = tempfile::tempdir().unwrap();
    let campaign = dir.path().join("c.json");
    std::fs::write(
        &campaign,
        r#"{"seed": 3, "entries": [{"check": "submodularity", "source": "generator", "trials": 10}]}"#,
    )
    .unwrap();
    let out = bin()
        .args(["verify", "--format", "csv", "--campaign"])
        .arg(&campaign)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("check,lhs,rhs,slack,pass"));
    assert!(text.lines().count() >= 2);
}

#[test]
fn table_lists_exponential_anchor() {
    let out = bin().args(["table", "--format", "csv"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("Exp(1),2.000000"), "stdout: {stdout}");
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("Exp(1)"), "stderr: {stderr}");
}

#[test]
fn det_subcommand_reports_three_clean_ensembles() {
    let out = bin()
        .args(["det", "--dim", "2", "--trials", "50", "--seed", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let ens = v["ensembles"].as_array().unwrap();
    assert_eq!(ens.len(), 3);
    for e in ens {
        assert_eq!(e["violations"], 0);
    }
}

#[test]
fn search_writes_trace_and_density() {
    let dir = tempfile::tempdir().unwrap();
    let stem = dir.path().join("trace");
    let problem = dir.path().join("p.json");
    std::fs::write(
        &problem,
        r#"{
  "problem": {
    "objective": {"kind": "maximize_sigma_minus"},
    "space": {"kind": "log_concave_grid", "knots": 24}
  },
  "config": {"method": "nelder_mead", "restarts": 2, "seed": 4, "max_evals": 400}
}"#,
    )
    .unwrap();
    let out = bin()
        .args(["search", "--seed", "4", "--campaign"])
        .arg(&problem)
        .arg("--out")
        .arg(&stem)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let trace: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(format!("{}.json", stem.display())).unwrap())
            .unwrap();
    assert!(trace["trace"]["best_objective"].as_f64().unwrap() > 1.0);
    let csv = std::fs::read_to_string(format!("{}.csv", stem.display())).unwrap();
    assert!(csv.starts_with("iteration,objective"));
    let density = std::fs::read_to_string(format!("{}.density.json", stem.display())).unwrap();
    assert!(density.contains("\"type\""));
}
