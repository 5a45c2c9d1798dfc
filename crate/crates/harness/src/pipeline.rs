//! Closed loop of simulator, detector, fusion and estimator for one scenario.

use std::time::Instant;

use airdata_mhe::airmodel::{h_output, tas_from_cas, EstimState, FlightParams, OutputVec};
use airdata_mhe::fdi::{ChannelId, RawMeasurement, SensorBank, SensorMask, SensorVariances};
use airdata_mhe::mhe::{Bounds, Estimator, SolveReport};

use crate::config::{InitMode, ScenarioConfig};
use crate::error::RunError;
use crate::metrics::{evaluate, ExpectationOutcome, RunMetrics};
use crate::sim::{channel_index, simulate, TruthSample, TruthTrace, N_MEAS};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunOptions {
    /// Measure the wall time of every estimator update. When off the solver
    /// time is reported as 0 and outputs are byte-for-byte reproducible.
    pub timing: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { timing: true }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleRecord {
    pub truth: TruthSample,
    pub meas: [f64; N_MEAS],
    pub fused: OutputVec,
    /// Prediction the residuals of this sample were formed against.
    pub prediction_used: OutputVec,
    /// Prediction produced by this sample for the next one.
    pub prediction_next: OutputVec,
    pub estimate: EstimState,
    /// CAS implied by the estimate (m/s).
    pub est_vc: f64,
    /// Residual RMS per channel in `ChannelId::ALL` order.
    pub rms: [f64; 6],
    pub healthy: [bool; 6],
    pub mask: SensorMask,
    pub solver_ms: f64,
    /// `None` at the initial sample and whenever the update was skipped.
    pub report: Option<SolveReport>,
    pub degraded: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectionEvent {
    pub channel: ChannelId,
    pub sample: usize,
    pub t: f64,
    pub rms: f64,
    /// A simulated fault was active on the channel at detection.
    pub fault_active: bool,
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub name: String,
    pub records: Vec<SampleRecord>,
    pub events: Vec<DetectionEvent>,
    pub metrics: RunMetrics,
    pub expectations: Vec<ExpectationOutcome>,
}

impl RunResult {
    pub fn passed(&self) -> bool {
        self.expectations.iter().all(|e| e.passed)
    }
}

fn median3(v: [f64; 3]) -> f64 {
    let mut s = v;
    s.sort_by(f64::total_cmp);
    s[1]
}

/// Wind triangle solved on the median AOA and CAS readings, kept strictly
/// inside the state bounds.
pub fn initial_state_from_measurements(
    meas: &RawMeasurement,
    th: &FlightParams,
    bounds: &Bounds,
) -> Result<EstimState, airdata_mhe::airmodel::ModelError> {
    let alpha = median3(meas.aoa);
    let tas = tas_from_cas(median3(meas.vcas), th.z)?;
    let gamma_a = th.theta - alpha;
    let wx = th.vg - tas * gamma_a.cos();
    let wz = meas.vz - (th.vg - wx) * gamma_a.tan();
    let mut v = [alpha, wx, wz];
    for (j, x) in v.iter_mut().enumerate() {
        let margin = 1e-3 * (bounds.x_ub[j] - bounds.x_lb[j]);
        *x = x.clamp(bounds.x_lb[j] + margin, bounds.x_ub[j] - margin);
    }
    Ok(EstimState::new(v[0], v[1], v[2]))
}

fn per_channel<T: Copy + Default>(bank: &SensorBank, f: impl Fn(&airdata_mhe::fdi::Channel) -> T) -> [T; 6] {
    let mut out = [T::default(); 6];
    for id in ChannelId::ALL {
        out[channel_index(id)] = f(bank.channel(id));
    }
    out
}

/// Runs the closed loop over an already simulated trace.
pub fn run_trace(cfg: &ScenarioConfig, trace: &TruthTrace, opts: RunOptions) -> Result<RunResult, RunError> {
    let w = &cfg.mhe.weights;
    let base = SensorVariances {
        alpha: w.r_alpha,
        vz: w.r_vz,
        vc: w.r_vc,
    };
    let mut bank = SensorBank::new(cfg.detector);
    let mut records = Vec::with_capacity(trace.len());
    let mut events = Vec::new();

    let first = trace.samples[0];
    let raw0 = trace.raw_measurement(0);
    let x0 = match cfg.init {
        InitMode::Truth => first.state,
        InitMode::Measurements => initial_state_from_measurements(&raw0, &first.params, &cfg.mhe.bounds)
            .map_err(|e| RunError::Init(airdata_mhe::mhe::MheError::Model { stage: 0, err: e }))?,
    };
    let meas0 = OutputVec {
        alpha: median3(raw0.aoa),
        vz: raw0.vz,
        vc: median3(raw0.vcas),
    };
    let mut est =
        Estimator::new(cfg.mhe, x0, first.params, meas0, w.base_measurement_variances()).map_err(RunError::Init)?;
    let est_vc = |x: &EstimState, th: &FlightParams, fb: f64| h_output(x, th).map(|y| y.vc).unwrap_or(fb);
    records.push(SampleRecord {
        truth: first,
        meas: trace.corrupted[0],
        fused: meas0,
        prediction_used: meas0,
        prediction_next: est.prediction(),
        estimate: x0,
        est_vc: est_vc(&x0, &first.params, meas0.vc),
        rms: [0.0; 6],
        healthy: [true; 6],
        mask: SensorMask::AllAvailable,
        solver_ms: 0.0,
        report: None,
        degraded: false,
    });

    for k in 1..trace.len() {
        let truth = trace.samples[k];
        let raw = trace.raw_measurement(k);
        let pred = est.prediction();
        bank.update_residuals(&raw, &pred);
        for ev in bank.detect() {
            let ch = channel_index(ev.channel);
            events.push(DetectionEvent {
                channel: ev.channel,
                sample: k,
                t: truth.t,
                rms: ev.rms,
                fault_active: trace.fault_active[k][ch],
            });
        }
        let fused = bank.fuse(&raw, &base, &pred);
        let mask = bank.sensor_mask();
        let start = opts.timing.then(Instant::now);
        let out = est.step(fused.output(), fused.variances(), truth.params, mask.output_mask());
        let solver_ms = start.map_or(0.0, |s| s.elapsed().as_secs_f64() * 1e3);
        records.push(SampleRecord {
            truth,
            meas: trace.corrupted[k],
            fused: fused.output(),
            prediction_used: pred,
            prediction_next: out.prediction,
            estimate: out.estimate,
            est_vc: est_vc(&out.estimate, &truth.params, fused.vc_m),
            rms: per_channel(&bank, |c| c.rms()),
            healthy: per_channel(&bank, |c| !c.is_faulty()),
            mask,
            solver_ms,
            report: out.report,
            degraded: out.degraded.is_some(),
        });
    }
    let metrics = RunMetrics::compute(&records, &events, trace);
    let expectations = evaluate(&cfg.expect, &metrics);
    Ok(RunResult {
        name: cfg.sim.name.clone(),
        records,
        events,
        metrics,
        expectations,
    })
}

/// Simulates and runs a scenario.
pub fn run_scenario(cfg: &ScenarioConfig, opts: RunOptions) -> Result<RunResult, RunError> {
    let trace = simulate(&cfg.sim)?;
    run_trace(cfg, &trace, opts)
}
