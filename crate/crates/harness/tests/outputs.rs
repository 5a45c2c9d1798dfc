use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use airdata_mhe_harness::config::load_config;
use airdata_mhe_harness::output::{read_rows, write_run, ReportRow, SUITE_CSV, TRACE_HEADER};
use airdata_mhe_harness::pipeline::{run_scenario, RunOptions};
use airdata_mhe_harness::suite::run_suite;

fn preset(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("presets").join(name)
}

const NO_TIMING: RunOptions = RunOptions { timing: false };

fn read_trace(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|v| v.parse::<f64>().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn trace_schema_and_time_column() {
    let cfg = load_config(&preset("6-F.toml")).unwrap();
    let run = run_scenario(&cfg, NO_TIMING).unwrap();
    let tmp = tempfile::tempdir().unwrap();
    write_run(tmp.path(), &run, cfg.sim.ts).unwrap();
    let (header, rows) = read_trace(&tmp.path().join("trace.csv"));
    assert_eq!(header.len(), 32);
    assert_eq!(header, TRACE_HEADER);
    assert_eq!(rows.len(), 2501);
    for (k, row) in rows.iter().enumerate() {
        assert_eq!(row.len(), 32);
        assert_eq!(row[0], k as f64 * 0.04);
    }
}

#[test]
fn rerun_is_byte_identical() {
    let cfg = load_config(&preset("1-F.toml")).unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        write_run(d.path(), &run_scenario(&cfg, NO_TIMING).unwrap(), cfg.sim.ts).unwrap();
    }
    for f in ["trace.csv", "events.csv", "solver.csv", "metrics.csv"] {
        assert_eq!(
            std::fs::read(a.path().join(f)).unwrap(),
            std::fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
}

/// Recomputes the run metrics from the exported files alone.
#[test]
fn metrics_recomputed_from_csv_match() {
    let cfg = load_config(&preset("7-F.toml")).unwrap();
    let run = run_scenario(&cfg, NO_TIMING).unwrap();
    let tmp = tempfile::tempdir().unwrap();
    write_run(tmp.path(), &run, cfg.sim.ts).unwrap();
    let (header, rows) = read_trace(&tmp.path().join("trace.csv"));
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let (ta, ea, tv, ev) = (
        col("truth_alpha_deg"),
        col("est_alpha_deg"),
        col("truth_Vc_kts"),
        col("est_vc_kts"),
    );
    let n = rows.len() as f64;
    let a: Vec<f64> = rows.iter().map(|r| (r[ea] - r[ta]).abs()).collect();
    let v: Vec<f64> = rows.iter().map(|r| (r[ev] - r[tv]).abs()).collect();
    let m = &run.metrics;
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-9 * y.abs().max(1.0);
    assert!(close(a.iter().sum::<f64>() / n, m.aee_alpha_mean_deg));
    assert!(close(a.iter().copied().fold(0.0, f64::max), m.aee_alpha_max_deg));
    assert!(close(v.iter().sum::<f64>() / n, m.aee_vcas_mean_kts));
    assert!(close(v.iter().copied().fold(0.0, f64::max), m.aee_vcas_max_kts));

    // health flags drop exactly at the logged events
    let mut r = csv::Reader::from_path(tmp.path().join("events.csv")).unwrap();
    let mut first_flag = BTreeMap::new();
    for rec in r.records() {
        let rec = rec.unwrap();
        first_flag
            .entry(rec[0].to_string())
            .or_insert(rec[2].parse::<f64>().unwrap());
    }
    let names = ["AOA1", "AOA2", "AOA3", "VCAS1", "VCAS2", "VCAS3"];
    for (i, name) in names.iter().enumerate() {
        let h = col(["h_a1", "h_a2", "h_a3", "h_v1", "h_v2", "h_v3"][i]);
        let drop = rows.iter().find(|r| r[h] == 0.0).map(|r| r[0]);
        assert_eq!(drop, first_flag.get(*name).copied(), "{name}");
        // every preset fault starts at 40 s
        let delay = drop.map(|t| t - 40.0);
        match (delay, m.detection_delay_s[i]) {
            (Some(x), Some(y)) => assert!((x - y).abs() < 1e-9),
            (x, y) => assert_eq!(x, y),
        }
    }
    let row = read_rows(&tmp.path().join("metrics.csv")).unwrap();
    assert_eq!(row, vec![ReportRow::from_run(&run)]);
}

#[test]
fn suite_rows_follow_file_order_and_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("presets");
    let report = run_suite(&dir, 4, Some(tmp.path()), NO_TIMING).unwrap();
    let names: Vec<String> = report.rows().into_iter().map(|r| r.scenario).collect();
    assert_eq!(names.len(), 16);
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    assert_eq!(report.exit_code(), 0);
    let back = read_rows(&tmp.path().join(SUITE_CSV)).unwrap();
    assert_eq!(back, report.rows());
    assert!(tmp.path().join("4-F").join("trace.csv").exists());
    let again = run_suite(&dir, 1, None, NO_TIMING).unwrap();
    assert_eq!(again.rows(), report.rows());
}

#[test]
fn suite_isolates_bad_files() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::copy(preset("1-H.toml"), tmp.path().join("a.toml")).unwrap();
    std::fs::write(tmp.path().join("b.toml"), "[scenario]\nbogus = 1\n").unwrap();
    let text = std::fs::read_to_string(preset("1-H.toml"))
        .unwrap()
        .replace("max_aee_alpha_mean_deg = 0.3", "max_aee_alpha_mean_deg = 1e-9");
    std::fs::write(tmp.path().join("c.toml"), text.replace("\"1-H\"", "\"strict\"")).unwrap();
    let report = run_suite(tmp.path(), 2, None, NO_TIMING).unwrap();
    let status: Vec<String> = report.rows().into_iter().map(|r| r.status).collect();
    assert_eq!(status, ["ok", "error", "fail"]);
    assert_eq!(
        report.entries.iter().map(|e| e.exit_code).collect::<Vec<_>>(),
        [0, 2, 1]
    );
    assert_eq!(report.exit_code(), 2);
}
