//! Batch runs over a directory of scenario files.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::config::{load_config, scenario_files};
use crate::error::RunError;
use crate::output::{format_table, write_rows, write_run, write_text, ReportRow, SUITE_CSV, SUITE_TABLE};
use crate::pipeline::{run_scenario, RunOptions, RunResult};

#[derive(Debug)]
pub struct SuiteEntry {
    pub path: PathBuf,
    pub row: ReportRow,
    /// Full result, absent when the scenario could not be loaded or run.
    pub run: Option<RunResult>,
    pub exit_code: i32,
}

#[derive(Debug, Default)]
pub struct SuiteReport {
    pub entries: Vec<SuiteEntry>,
}

impl SuiteReport {
    pub fn rows(&self) -> Vec<ReportRow> {
        self.entries.iter().map(|e| e.row.clone()).collect()
    }

    /// 2 if any file was rejected, otherwise 1 if any scenario failed.
    pub fn exit_code(&self) -> i32 {
        self.entries.iter().map(|e| e.exit_code).max().unwrap_or(0)
    }

    pub fn table(&self) -> String {
        format_table(&self.rows())
    }
}

fn run_one(path: &Path, out: Option<&Path>, opts: RunOptions) -> SuiteEntry {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("?").to_string();
    let failed = |e: RunError| SuiteEntry {
        path: path.to_path_buf(),
        row: ReportRow::error(&stem, e.to_string()),
        run: None,
        exit_code: e.exit_code(),
    };
    let cfg = match load_config(path) {
        Ok(c) => c,
        Err(e) => return failed(e.into()),
    };
    let run = match run_scenario(&cfg, opts) {
        Ok(r) => r,
        Err(e) => return failed(e),
    };
    if let Some(dir) = out {
        if let Err(e) = write_run(&dir.join(&run.name), &run, cfg.sim.ts) {
            return failed(e);
        }
    }
    let row = ReportRow::from_run(&run);
    let exit_code = if run.passed() { 0 } else { 1 };
    SuiteEntry {
        path: path.to_path_buf(),
        row,
        run: Some(run),
        exit_code,
    }
}

/// Runs every `*.toml` in `dir` on `jobs` threads; rows follow file-name order.
///
/// With `out` set, per-run files go to `out/<name>/` and the aggregated
/// report to `out/suite_report.csv` and `out/suite_report.txt`.
pub fn run_suite(dir: &Path, jobs: usize, out: Option<&Path>, opts: RunOptions) -> Result<SuiteReport, RunError> {
    let files = scenario_files(dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| RunError::Io {
            path: dir.to_path_buf(),
            source: std::io::Error::other(e),
        })?;
    let entries: Vec<SuiteEntry> = pool.install(|| files.par_iter().map(|p| run_one(p, out, opts)).collect());
    let report = SuiteReport { entries };
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|source| RunError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        write_rows(&dir.join(SUITE_CSV), &report.rows())?;
        write_text(&dir.join(SUITE_TABLE), &report.table())?;
    }
    Ok(report)
}
