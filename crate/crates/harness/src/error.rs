use std::path::PathBuf;

use airdata_mhe::airmodel::ModelError;
use airdata_mhe::mhe::MheError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("duration {duration} s is not a whole number of {ts} s samples")]
    SampleCount { duration: f64, ts: f64 },
    #[error("scenario infeasible at sample {sample} (t = {t} s): {source}")]
    Infeasible {
        sample: usize,
        t: f64,
        #[source]
        source: ModelError,
    },
    #[error("AOA {alpha_deg:.2} deg leaves the simulated envelope at sample {sample} (t = {t} s)")]
    AlphaEnvelope { sample: usize, t: f64, alpha_deg: f64 },
    #[error("{axis} wind reaches {peak_kts:.2} kts, beyond the declared {envelope_kts} kts envelope")]
    WindEnvelope {
        axis: char,
        peak_kts: f64,
        envelope_kts: f64,
    },
    #[error("invalid fault profile on {channel}")]
    InvalidFault { channel: String },
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: Box<toml::de::Error>,
    },
    #[error("{path}: {message}")]
    Invalid { path: PathBuf, message: String },
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("estimator initialization failed: {0}")]
    Init(#[source] MheError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl RunError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            _ => 1,
        }
    }
}
