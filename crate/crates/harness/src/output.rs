//! CSV files written per run and per suite.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use airdata_mhe::fdi::ChannelId;
use airdata_mhe::units::{deg, kts};
use serde::{Deserialize, Serialize};

use crate::config::display_value;
use crate::error::RunError;
use crate::metrics::RunMetrics;
use crate::pipeline::RunResult;

pub const TRACE_HEADER: [&str; 32] = [
    "t_s",
    "truth_alpha_deg",
    "truth_Wx_kts",
    "truth_Wz_kts",
    "truth_Vz_ms",
    "truth_Vc_kts",
    "alpha1_deg",
    "alpha2_deg",
    "alpha3_deg",
    "vc1_kts",
    "vc2_kts",
    "vc3_kts",
    "vz_ms",
    "fused_alpha_deg",
    "fused_vc_kts",
    "est_alpha_deg",
    "est_Wx_kts",
    "est_Wz_kts",
    "est_vc_kts",
    "J_alpha1_deg",
    "J_alpha2_deg",
    "J_alpha3_deg",
    "J_vc1_kts",
    "J_vc2_kts",
    "J_vc3_kts",
    "h_a1",
    "h_a2",
    "h_a3",
    "h_v1",
    "h_v2",
    "h_v3",
    "solver_ms",
];

pub const TRACE_FILE: &str = "trace.csv";
pub const EVENTS_FILE: &str = "events.csv";
pub const METRICS_FILE: &str = "metrics.csv";
pub const SOLVER_FILE: &str = "solver.csv";
pub const SUITE_CSV: &str = "suite_report.csv";
pub const SUITE_TABLE: &str = "suite_report.txt";

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> RunError + '_ {
    move |source| RunError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn writer(path: &Path) -> Result<csv::Writer<File>, RunError> {
    csv::Writer::from_path(path).map_err(csv_err(path))
}

/// One row per sample; `t_s` is `k * ts`.
pub fn write_trace(path: &Path, run: &RunResult, ts: f64) -> Result<(), RunError> {
    let mut w = writer(path)?;
    let e = csv_err(path);
    w.write_record(TRACE_HEADER).map_err(&e)?;
    for (k, r) in run.records.iter().enumerate() {
        let s = &r.truth;
        let mut row: Vec<String> = Vec::with_capacity(32);
        let mut push = |v: f64| row.push(v.to_string());
        push(k as f64 * ts);
        push(deg(s.state.alpha));
        push(kts(s.state.wx));
        push(kts(s.state.wz));
        push(s.vz);
        push(kts(s.vc));
        for ch in 0..3 {
            push(deg(r.meas[ch]));
        }
        for ch in 3..6 {
            push(kts(r.meas[ch]));
        }
        push(r.meas[6]);
        push(deg(r.fused.alpha));
        push(kts(r.fused.vc));
        push(deg(r.estimate.alpha));
        push(kts(r.estimate.wx));
        push(kts(r.estimate.wz));
        push(kts(r.est_vc));
        for (ch, id) in ChannelId::ALL.iter().enumerate() {
            push(display_value(id.family, r.rms[ch]));
        }
        for h in r.healthy {
            row.push(if h { "1" } else { "0" }.into());
        }
        row.push(r.solver_ms.to_string());
        w.write_record(&row).map_err(&e)?;
    }
    w.flush().map_err(io_err(path))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventRow {
    pub channel: String,
    pub sample: usize,
    pub t_s: f64,
    /// Residual RMS at detection, in deg or kts.
    pub rms: f64,
    pub fault_active: bool,
}

pub fn write_events(path: &Path, run: &RunResult) -> Result<(), RunError> {
    let mut w = writer(path)?;
    let e = csv_err(path);
    for ev in &run.events {
        w.serialize(EventRow {
            channel: ev.channel.to_string(),
            sample: ev.sample,
            t_s: ev.t,
            rms: display_value(ev.channel.family, ev.rms),
            fault_active: ev.fault_active,
        })
        .map_err(&e)?;
    }
    if run.events.is_empty() {
        w.write_record(["channel", "sample", "t_s", "rms", "fault_active"])
            .map_err(&e)?;
    }
    w.flush().map_err(io_err(path))
}

/// Per-iteration solver record: KKT solve count, κ, step length and equality residual.
pub fn write_solver(path: &Path, run: &RunResult) -> Result<(), RunError> {
    let mut w = writer(path)?;
    let e = csv_err(path);
    let iters = run
        .records
        .iter()
        .filter_map(|r| r.report.as_ref())
        .map(|r| r.kappas.len())
        .max()
        .unwrap_or(0);
    let mut header = vec![
        "sample".to_string(),
        "solver_ms".into(),
        "kkt_solves".into(),
        "degraded".into(),
    ];
    for j in 1..=iters {
        header.extend([format!("kappa_{j}"), format!("step_{j}"), format!("residual_{j}")]);
    }
    w.write_record(&header).map_err(&e)?;
    for (k, r) in run.records.iter().enumerate().skip(1) {
        let mut row = vec![k.to_string(), r.solver_ms.to_string()];
        match &r.report {
            Some(rep) => {
                row.push(rep.kkt_solves.to_string());
                row.push("0".into());
                for j in 0..iters {
                    for v in [rep.kappas.get(j), rep.steps.get(j), rep.kkt_residuals.get(j)] {
                        row.push(v.map(f64::to_string).unwrap_or_default());
                    }
                }
            }
            None => {
                row.push("0".into());
                row.push(if r.degraded { "1" } else { "0" }.into());
                row.extend(std::iter::repeat_n(String::new(), 3 * iters));
            }
        }
        w.write_record(&row).map_err(&e)?;
    }
    w.flush().map_err(io_err(path))
}

/// Flat metrics row shared by `metrics.csv` and the suite report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub scenario: String,
    /// `ok`, `fail` (an expectation failed) or `error`.
    pub status: String,
    pub aee_alpha_max_deg: Option<f64>,
    pub aee_alpha_mean_deg: Option<f64>,
    pub aee_vcas_max_kts: Option<f64>,
    pub aee_vcas_mean_kts: Option<f64>,
    pub delay_aoa1_s: Option<f64>,
    pub delay_aoa2_s: Option<f64>,
    pub delay_aoa3_s: Option<f64>,
    pub delay_vcas1_s: Option<f64>,
    pub delay_vcas2_s: Option<f64>,
    pub delay_vcas3_s: Option<f64>,
    pub false_alarms: Option<usize>,
    pub missed: Option<usize>,
    pub solver_mean_ms: Option<f64>,
    pub solver_max_ms: Option<f64>,
    pub degraded_steps: Option<usize>,
    pub wx_discarded: Option<bool>,
    pub estimation_unreliable: Option<bool>,
    /// Failed expectations, or the error message.
    pub message: String,
}

impl ReportRow {
    pub fn from_run(run: &RunResult) -> Self {
        let m: &RunMetrics = &run.metrics;
        let d = m.detection_delay_s;
        let failed: Vec<String> = run
            .expectations
            .iter()
            .filter(|e| !e.passed)
            .map(|e| format!("{}: {}", e.name, e.detail))
            .collect();
        ReportRow {
            scenario: run.name.clone(),
            status: if failed.is_empty() { "ok" } else { "fail" }.into(),
            aee_alpha_max_deg: Some(m.aee_alpha_max_deg),
            aee_alpha_mean_deg: Some(m.aee_alpha_mean_deg),
            aee_vcas_max_kts: Some(m.aee_vcas_max_kts),
            aee_vcas_mean_kts: Some(m.aee_vcas_mean_kts),
            delay_aoa1_s: d[0],
            delay_aoa2_s: d[1],
            delay_aoa3_s: d[2],
            delay_vcas1_s: d[3],
            delay_vcas2_s: d[4],
            delay_vcas3_s: d[5],
            false_alarms: Some(m.false_alarms),
            missed: Some(m.missed),
            solver_mean_ms: Some(m.solver_mean_ms),
            solver_max_ms: Some(m.solver_max_ms),
            degraded_steps: Some(m.degraded_steps),
            wx_discarded: Some(m.wx_discarded),
            estimation_unreliable: Some(m.estimation_unreliable),
            message: failed.join("; "),
        }
    }

    pub fn error(scenario: &str, message: String) -> Self {
        ReportRow {
            scenario: scenario.into(),
            status: "error".into(),
            aee_alpha_max_deg: None,
            aee_alpha_mean_deg: None,
            aee_vcas_max_kts: None,
            aee_vcas_mean_kts: None,
            delay_aoa1_s: None,
            delay_aoa2_s: None,
            delay_aoa3_s: None,
            delay_vcas1_s: None,
            delay_vcas2_s: None,
            delay_vcas3_s: None,
            false_alarms: None,
            missed: None,
            solver_mean_ms: None,
            solver_max_ms: None,
            degraded_steps: None,
            wx_discarded: None,
            estimation_unreliable: None,
            message,
        }
    }

    pub fn delays(&self) -> [Option<f64>; 6] {
        [
            self.delay_aoa1_s,
            self.delay_aoa2_s,
            self.delay_aoa3_s,
            self.delay_vcas1_s,
            self.delay_vcas2_s,
            self.delay_vcas3_s,
        ]
    }
}

pub fn write_rows(path: &Path, rows: &[ReportRow]) -> Result<(), RunError> {
    let mut w = writer(path)?;
    for r in rows {
        w.serialize(r).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn read_rows(path: &Path) -> Result<Vec<ReportRow>, RunError> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    r.deserialize()
        .collect::<Result<Vec<ReportRow>, _>>()
        .map_err(csv_err(path))
}

fn cell(v: Option<f64>, prec: usize) -> String {
    v.map(|x| format!("{x:.prec$}")).unwrap_or_else(|| "-".into())
}

/// Fixed-width table: AEE (max/mean) per family, then detection delays.
pub fn format_table(rows: &[ReportRow]) -> String {
    let mut s = String::new();
    s.push_str(&format!(
        "{:<24} {:>7} {:>7} {:>7} {:>7}  {:>6} {:>6} {:>6} {:>6} {:>6} {:>6}  {:>3} {:>3}  {:>6}  {}\n",
        "scenario",
        "a.max",
        "a.mean",
        "v.max",
        "v.mean",
        "AOA1",
        "AOA2",
        "AOA3",
        "VCAS1",
        "VCAS2",
        "VCAS3",
        "FA",
        "MD",
        "ms",
        "status"
    ));
    s.push_str(&format!(
        "{:<24} {:>7} {:>7} {:>7} {:>7}  {:-^41}\n",
        "", "[deg]", "[deg]", "[kts]", "[kts]", " delay [s] "
    ));
    for r in rows {
        let d = r.delays();
        s.push_str(&format!(
            "{:<24} {:>7} {:>7} {:>7} {:>7}  {:>6} {:>6} {:>6} {:>6} {:>6} {:>6}  {:>3} {:>3}  {:>6}  {}\n",
            r.scenario,
            cell(r.aee_alpha_max_deg, 3),
            cell(r.aee_alpha_mean_deg, 3),
            cell(r.aee_vcas_max_kts, 3),
            cell(r.aee_vcas_mean_kts, 3),
            cell(d[0], 3),
            cell(d[1], 3),
            cell(d[2], 3),
            cell(d[3], 3),
            cell(d[4], 3),
            cell(d[5], 3),
            r.false_alarms.map_or("-".into(), |v| v.to_string()),
            r.missed.map_or("-".into(), |v| v.to_string()),
            cell(r.solver_mean_ms, 3),
            if r.message.is_empty() {
                r.status.clone()
            } else {
                format!("{} ({})", r.status, r.message)
            },
        ));
    }
    s
}

/// Writes trace, events, solver and metrics files into `dir`.
pub fn write_run(dir: &Path, run: &RunResult, ts: f64) -> Result<Vec<PathBuf>, RunError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let files = [TRACE_FILE, EVENTS_FILE, SOLVER_FILE, METRICS_FILE].map(|f| dir.join(f));
    write_trace(&files[0], run, ts)?;
    write_events(&files[1], run)?;
    write_solver(&files[2], run)?;
    write_rows(&files[3], &[ReportRow::from_run(run)])?;
    Ok(files.to_vec())
}

pub fn write_text(path: &Path, text: &str) -> Result<(), RunError> {
    let f = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(f);
    w.write_all(text.as_bytes())
        .and_then(|_| w.flush())
        .map_err(io_err(path))
}
