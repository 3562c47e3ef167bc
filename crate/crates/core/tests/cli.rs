use std::path::Path;
use std::process::{Command, Output};

fn dynlpp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dynlpp")).args(args).output().expect("binary runs")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn sweep_writes_reproducible_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let json = dir.path().join("summary.json");
    let common = ["sweep", "--n", "3,4", "--alpha", "0.5,20", "--reps", "150", "--seed", "9", "--no-timestamp"];
    let out = dynlpp(&[&common[..], &["--out", a.to_str().unwrap(), "--json-summary", json.to_str().unwrap()]].concat());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = dynlpp(&[&common[..], &["--out", b.to_str().unwrap(), "--threads", "2"]].concat());
    assert!(out.status.success());
    let csv = read(&a);
    assert_eq!(csv, read(&b));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "n,d,t,alpha,Q_t,Q_t_se,corr,corr_se,l2,l2_se,overlap,overlap_se,overlap_fraction,var_T,var_T_se,replicates,seed"
    );
    assert_eq!(lines.len(), 5);
    for line in &lines[1..] {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), 17);
        for i in [5, 7, 9, 11, 14] {
            let se: f64 = cells[i].parse().unwrap();
            assert!(se.is_finite() && se >= 0.0);
        }
    }
    let summary: serde_json::Value = serde_json::from_str(&read(&json)).unwrap();
    assert_eq!(summary["pilots"].as_array().unwrap().len(), 2);
    assert!(summary["pilots"][0]["seed"].is_u64());
    assert_eq!(summary["cells"][1]["capped"], serde_json::Value::Bool(true));
}

#[test]
fn timestamp_line_is_optional() {
    let out = dynlpp(&["sweep", "--n", "2", "--t", "0.5", "--reps", "100"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# generated"));
    assert!(text.lines().nth(1).unwrap().starts_with("n,d,t,"));
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# small sweep\ndist = geom:0.5\nn = 2\nt = 0.25\nreps = 100\nno_timestamp = true\n").unwrap();
    let out = dynlpp(&["sweep", "--config", cfg.to_str().unwrap(), "--n", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!((row[0], row[1], row[15]), ("3", "2", "100"));
    let out = dynlpp(&["sweep", "--config", cfg.to_str().unwrap(), "--alpha", "1", "--pilot-reps", "1000"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn configuration_errors_exit_with_2() {
    for args in [
        &["sweep", "--n", "4", "--t", "1.5"][..],
        &["sweep", "--n", "4"],
        &["sweep", "--n", "4", "--t", "0.5", "--dist", "exp:-1"],
        &["sweep", "--n", "4", "--alpha", "1", "--pilot-reps", "10"],
        &["fit-exponent", "--n", "4,8", "--reps", "10"],
        &["sweep", "--config", "/nonexistent/run.cfg"],
        &["sweep", "--bogus"],
    ] {
        assert_eq!(dynlpp(args).status.code(), Some(2), "{args:?}");
    }
    let out = dynlpp(&["sweep", "--n", "2", "--t", "0.5", "--reps", "100", "--out", "/nonexistent/dir/x.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/dir/x.csv"));
}

#[test]
fn identity_suite_verdicts() {
    let out = dynlpp(&["identities", "--dist", "const:1", "--n", "2", "--reps", "100"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["passed"], serde_json::Value::Bool(true));
    let out = dynlpp(&["identities", "--dist", "unif01", "--n", "2", "--reps", "200", "--vertex-sample", "2"]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let skipped: Vec<_> = doc["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|v| v["status"] == "skipped")
        .collect();
    assert_eq!(skipped.len(), 3);
    assert!(skipped.iter().all(|v| v["identity"] == "influence_bounds"));
}

#[test]
fn audit_fit_and_oracle_commands() {
    let out = dynlpp(&["dist-audit", "--dist", "pareto:3,exp:1", "--k", "2,5", "--no-timestamp"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.lines().nth(1).unwrap().starts_with("pareto:3,2.0000000000000000e0,"));

    let out = dynlpp(&["fit-exponent", "--n", "2,4,8,16", "--reps", "200", "--no-timestamp"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("slope "));

    let out = dynlpp(&["oracle", "--configs", "5", "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 4 * 6);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
}
