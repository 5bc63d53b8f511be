mod common;

use common::*;
use nbcrit::l2engine::{convergence_curve, panel_integrate};
use nbcrit::{ApproximantSpec64, CurveGrid, DistanceReport64, MoebiusTable, QuadratureConfig64, ZetaEngine64};

#[test]
fn sieve_ten_matches_fixture() {
    let out = stdout(&["sieve", "--limit", "10"]);
    let (header, rows) = csv_rows(&out);
    assert_eq!(header, declared_header("sieve"));
    assert_eq!(rows.len(), 10);
    let mu: Vec<i32> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(mu, [1, -1, -1, 0, -1, 1, -1, 0, 0, 1]);
    let mertens: Vec<i32> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert_eq!(mertens, [1, 0, -1, -1, -2, -1, -2, -2, -2, -1]);
}

#[test]
fn distance_json_equals_library_call() {
    let out = stdout(&["distance", "--kind", "regularized", "--eps", "0.2", "--n", "100"]);
    let json: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_valid("distance_report.schema.json", &json);
    let cli: DistanceReport64 = serde_json::from_value(json).unwrap();

    let table = MoebiusTable::sieve(100).unwrap();
    let zeta = ZetaEngine64::new(1e-13).unwrap();
    let spec = ApproximantSpec64::regularized(0.2, 100);
    let lib = panel_integrate(&spec, true, &QuadratureConfig64::default(), &table, &zeta).unwrap();
    assert_eq!(cli, lib);
    assert!(cli.distance > 0.0 && cli.error_estimate > 0.0);
}

#[test]
fn distance_sweep_csv_has_declared_header() {
    let out = stdout(&["distance", "--n", "1,10", "--format", "csv", "--x-min", "1e-3"]);
    let (header, rows) = csv_rows(&out);
    assert_eq!(header, declared_header("distance"));
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1][0], "10");
}

#[test]
fn eps_sweep_report_equals_convergence_curve() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let args = ["report", "--experiment", "eps-sweep", "--eps", "0.4,0.2,0.1,0.05", "--x-min", "1e-4", "--out-dir", d];
    stdout(&args);
    let csv = std::fs::read_to_string(dir.path().join("eps-sweep.csv")).unwrap();
    let (header, rows) = csv_rows(&csv);
    assert_eq!(header, declared_header("report_eps_sweep"));

    let cfg = QuadratureConfig64::default().with_x_min(1e-4);
    let table = MoebiusTable::sieve(10_000).unwrap();
    let zeta = ZetaEngine64::new(1e-13).unwrap();
    let grid = CurveGrid::EpsToZero(vec![0.4, 0.2, 0.1, 0.05]);
    let curve = convergence_curve(&grid, &ApproximantSpec64::regularized_limit(0.4), &cfg, &table, &zeta).unwrap();
    assert_eq!(rows.len(), curve.len());
    for (row, r) in rows.iter().zip(&curve) {
        assert_eq!(row[0].parse::<f64>().unwrap(), r.spec.eps);
        assert_eq!(row[1].parse::<f64>().unwrap(), r.distance);
        assert_eq!(row[2].parse::<f64>().unwrap(), r.error_estimate);
    }

    let plot = std::fs::read_to_string(dir.path().join("plot.csv")).unwrap();
    let (plot_header, plot_rows) = csv_rows(&plot);
    assert_eq!(plot_header, "eps,distance");
    assert!(plot_rows.iter().all(|r| r.len() == 2));

    let summary = read_json(&dir.path().join("summary.json"));
    assert_valid("report_summary.schema.json", &summary);
    assert_eq!(summary["monotone_nonincreasing"], true);
    assert_valid("run_manifest.schema.json", &read_json(&dir.path().join("manifest.json")));
}

#[test]
fn zratio_at_zero_eps_has_unit_sup_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("z.csv");
    stdout(&["lemma", "--which", "zratio", "--eps-grid", "0", "--out", out.to_str().unwrap()]);
    let summary = read_json(&dir.path().join("z.csv.summary.json"));
    assert_valid("lemma_summary.schema.json", &summary);
    assert_eq!(summary["per_eps"][0]["sup_ratio"], 1.0);
    let (header, rows) = csv_rows(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(header, declared_header("lemma"));
    assert!(rows.iter().all(|r| r[6].parse::<f64>().unwrap() == 1.0));
}

#[test]
fn plancherel_report_defect_is_small_and_positive() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    stdout(&["report", "--experiment", "plancherel", "--n", "1", "--weight-eps", "0.25", "--t-max", "200", "--doublings", "0", "--out-dir", d]);
    let summary = read_json(&dir.path().join("summary.json"));
    assert_valid("report_summary.schema.json", &summary);
    assert_eq!(summary["defect_positive"], true);
    assert_eq!(summary["within_two_percent"], true);
}

#[test]
fn every_json_output_validates() {
    let zeta: serde_json::Value = serde_json::from_str(&stdout(&["zeta", "--sigma", "0.5,2", "--tau", "0,3"])).unwrap();
    assert_valid("zeta_values.schema.json", &zeta);

    let dir = tempfile::tempdir().unwrap();
    for which in ["bs", "cauchy"] {
        let out = dir.path().join(format!("{which}.csv"));
        let mut args = vec!["lemma", "--which", which, "--tau-grid", "1:100:4:log", "--out", out.to_str().unwrap()];
        if which == "cauchy" {
            args.extend(["--n-list", "2,4,8", "--x-min", "1e-3"]);
        } else {
            args.extend(["--n-list", "10,100"]);
        }
        stdout(&args);
        let summary = read_json(&dir.path().join(format!("{which}.csv.summary.json")));
        assert_valid("lemma_summary.schema.json", &summary);
        assert_valid("run_manifest.schema.json", &read_json(&dir.path().join(format!("{which}.csv.manifest.json"))));
    }
    let bs = read_json(&dir.path().join("bs.csv.summary.json"));
    assert!(bs["hypothesis"].as_str().unwrap().contains("alpha"));

    for exp in ["n-cauchy", "slow-bound", "zratio", "bs"] {
        let sub = dir.path().join(exp);
        let mut args = vec!["report", "--experiment", exp, "--out-dir", sub.to_str().unwrap(), "--x-min", "1e-3"];
        args.extend(["--n-list", "2,4,8", "--tau-grid", "1:100:4:log"]);
        stdout(&args);
        assert_valid("report_summary.schema.json", &read_json(&sub.join("summary.json")));
        let key = format!("report_{}", exp.replace('-', "_"));
        let (header, _) = csv_rows(&std::fs::read_to_string(sub.join(format!("{exp}.csv"))).unwrap());
        assert_eq!(header, declared_header(&key), "{exp}");
    }
}

#[test]
fn schema_rejects_malformed_report() {
    let bad = serde_json::json!({ "spec": { "kind": "natural", "n": 1, "eps": 0.0 }, "distance": -1.0 });
    assert!(!schema_errors("distance_report.schema.json", &bad).is_empty());
}

#[test]
fn eval_and_mellin_csv_headers() {
    let (header, rows) = csv_rows(&stdout(&["eval", "--kind", "natural", "--n", "3", "--x-grid", "0.1:2:4"]));
    assert_eq!(header, declared_header("eval"));
    assert_eq!(rows.len(), 4);
    // F_3(2) = 1/2 − 1/4 − 1/6 = 1/12
    assert!((rows[3][1].parse::<f64>().unwrap() - 1.0 / 12.0).abs() < 1e-15);

    let out = stdout(&["mellin", "--kind", "natural", "--n", "2", "--tau-grid", "0:1:2", "--x-min", "1e-3"]);
    let (header, rows) = csv_rows(&out);
    assert_eq!(header, declared_header("mellin"));
    assert_eq!(rows.len(), 4);
    assert!(rows[0][5].starts_with("numeric("));
    assert!(rows[1][5].starts_with("closed("));
}

#[test]
fn floats_print_with_seventeen_digits() {
    let (_, rows) = csv_rows(&stdout(&["eval", "--kind", "natural", "--n", "1", "--x-grid", "0.3:0.3:1"]));
    let mantissa = rows[0][1].split('e').next().unwrap().replace(['-', '.'], "");
    assert_eq!(mantissa.len(), 17);
}

#[test]
fn exit_codes_follow_the_contract() {
    assert_eq!(run(&["sieve", "--limit", "10", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));

    let bad = run(&["distance", "--eps", "abc"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("--eps"));

    let grid = run(&["eval", "--x-grid", "1:2"]);
    assert_eq!(grid.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&grid.stderr).contains("--x-grid"));

    assert_eq!(run(&["zeta", "--sigma", "1"]).status.code(), Some(2));
    assert_eq!(run(&["sieve", "--limit", "0"]).status.code(), Some(2));
    assert_eq!(run(&["--table-limit", "5", "distance", "--n", "100"]).status.code(), Some(2));
    assert_eq!(run(&["distance", "--n", "100", "--max-panels", "10"]).status.code(), Some(3));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn table_limit_comes_from_the_environment() {
    let out = bin()
        .env("NBCRIT_TABLE_LIMIT", "5")
        .args(["distance", "--n", "100"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let bad = bin().env("NBCRIT_TABLE_LIMIT", "many").args(["distance"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("NBCRIT_TABLE_LIMIT"));
}

#[test]
fn replay_reproduces_digests_and_flags_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.csv");
    stdout(&["--threads", "2", "distance", "--n", "1,5", "--format", "csv", "--x-min", "1e-3", "--out", out.to_str().unwrap()]);
    let manifest = dir.path().join("d.csv.manifest.json");
    let m = read_json(&manifest);
    assert_valid("run_manifest.schema.json", &m);
    assert_eq!(m["threads"], 2);
    assert_eq!(m["outputs"].as_array().unwrap().len(), 1);

    let again = dir.path().join("again");
    let ok = run(&["replay", "--manifest", manifest.to_str().unwrap(), "--out-dir", again.to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stdout));
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(again.join("d.csv")).unwrap());

    let text = std::fs::read_to_string(&manifest).unwrap();
    let digest = m["outputs"][0]["sha256"].as_str().unwrap();
    std::fs::write(&manifest, text.replace(digest, &"0".repeat(64))).unwrap();
    let bad = run(&["replay", "--manifest", manifest.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stdout).contains("MISMATCH"));
}
