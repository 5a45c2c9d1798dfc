use std::path::{Path, PathBuf};
use std::process::ExitCode;

use airdata_mhe_harness::config::load_config;
use airdata_mhe_harness::error::RunError;
use airdata_mhe_harness::output::{format_table, write_run, ReportRow};
use airdata_mhe_harness::pipeline::{run_scenario, RunOptions};
use airdata_mhe_harness::suite::run_suite;
use clap::{Parser, Subcommand};

/// Default output directory when `--out` is not given.
const OUT_ENV: &str = "MHE_FDI_OUT";

#[derive(Parser)]
#[command(
    name = "mhe-fdi",
    about = "Air data estimation with sensor fault isolation on simulated flights"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one scenario file.
    Run {
        config: PathBuf,
        /// Output directory (default: $MHE_FDI_OUT or ./out).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        quiet: bool,
        /// Write solver_ms = 0 so reruns are byte-identical.
        #[arg(long)]
        no_timing: bool,
    },
    /// Run every *.toml file of a directory.
    Suite {
        dir: PathBuf,
        #[arg(long, default_value_t = default_jobs())]
        jobs: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        quiet: bool,
        #[arg(long)]
        no_timing: bool,
    },
    /// Print the version.
    Version,
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn out_dir(arg: Option<PathBuf>) -> PathBuf {
    arg.or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn run(config: &Path, out: &Path, seed: Option<u64>, quiet: bool, opts: RunOptions) -> Result<i32, RunError> {
    let mut cfg = load_config(config)?;
    if let Some(s) = seed {
        cfg.sim.seed = s;
    }
    let result = run_scenario(&cfg, opts)?;
    let dir = out.join(&result.name);
    let files = write_run(&dir, &result, cfg.sim.ts)?;
    if !quiet {
        print!("{}", format_table(&[ReportRow::from_run(&result)]));
        for e in &result.expectations {
            println!(
                "  [{}] {}: {}",
                if e.passed { "pass" } else { "FAIL" },
                e.name,
                e.detail
            );
        }
        for f in files {
            println!("wrote {}", f.display());
        }
    }
    Ok(if result.passed() { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.cmd {
        Cmd::Version => {
            println!("mhe-fdi {}", env!("CARGO_PKG_VERSION"));
            0
        }
        Cmd::Run {
            config,
            out,
            seed,
            quiet,
            no_timing,
        } => match run(&config, &out_dir(out), seed, quiet, RunOptions { timing: !no_timing }) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                e.exit_code()
            }
        },
        Cmd::Suite {
            dir,
            jobs,
            out,
            quiet,
            no_timing,
        } => {
            let out = out_dir(out);
            match run_suite(&dir, jobs.max(1), Some(&out), RunOptions { timing: !no_timing }) {
                Ok(report) => {
                    if !quiet {
                        print!("{}", report.table());
                        println!("wrote {}", out.join(airdata_mhe_harness::output::SUITE_CSV).display());
                    }
                    report.exit_code()
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    e.exit_code()
                }
            }
        }
    };
    ExitCode::from(code as u8)
}
