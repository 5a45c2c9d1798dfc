use alloc::vec;
use alloc::vec::Vec;

use super::{linearize, solve_qp, Bounds, MheConfig, MheError, SolveReport};
use crate::airmodel::{discrete_step, h_output, EstimState, FlightParams, OutputMask, OutputVec, ProcessInput};
use crate::smallmat::Vec3;

/// Sliding window of iterates and data.
///
/// States, parameters and measurements have `N + 1` entries, inputs `N`.
/// The arrival-cost reference `prior` always equals `states[0]`, the oldest
/// retained estimate from the previous sample.
#[derive(Clone, Debug, PartialEq)]
pub struct HorizonWindow {
    pub states: Vec<EstimState>,
    pub inputs: Vec<ProcessInput>,
    pub params: Vec<FlightParams>,
    pub meas: Vec<OutputVec>,
    /// Diagonal of the effective measurement covariance per stage.
    pub meas_var: Vec<Vec3>,
    pub prior: EstimState,
}

impl HorizonWindow {
    pub fn horizon(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_consistent(&self) -> bool {
        let n = self.inputs.len();
        n >= 1
            && self.states.len() == n + 1
            && self.params.len() == n + 1
            && self.meas.len() == n + 1
            && self.meas_var.len() == n + 1
            && self.prior == self.states[0]
    }

    /// Most recent filtered estimate.
    pub fn latest(&self) -> EstimState {
        self.states[self.states.len() - 1]
    }
}

/// Cold-start window: every stage at `x0`, zero inputs, replicated data.
pub fn initialize_window(
    x0: EstimState,
    params0: FlightParams,
    meas0: OutputVec,
    meas_var0: Vec3,
    horizon: usize,
) -> HorizonWindow {
    let n = horizon.max(1);
    HorizonWindow {
        states: vec![x0; n + 1],
        inputs: vec![ProcessInput::default(); n],
        params: vec![params0; n + 1],
        meas: vec![meas0; n + 1],
        meas_var: vec![meas_var0; n + 1],
        prior: x0,
    }
}

/// Result of one estimator update.
#[derive(Clone, Debug, PartialEq)]
pub struct StepOutput {
    /// Filtered estimate at the newest sample.
    pub estimate: EstimState,
    /// One-step-ahead output prediction for the next sample.
    pub prediction: OutputVec,
    pub window: HorizonWindow,
    pub report: SolveReport,
}

fn project_inside(x: EstimState, bounds: &Bounds) -> EstimState {
    let mut v = x.to_vec();
    for j in 0..3 {
        let margin = 1e-6 * (bounds.x_ub[j] - bounds.x_lb[j]);
        v[j] = v[j].clamp(bounds.x_lb[j] + margin, bounds.x_ub[j] - margin);
    }
    EstimState::from_vec(v)
}

/// Output predicted one sample ahead of `x` with a zero input.
pub fn predict_output(x: &EstimState, th: &FlightParams, cfg: &MheConfig) -> Result<OutputVec, MheError> {
    let model = |err| MheError::Model { stage: 0, err };
    let next = discrete_step(x, &ProcessInput::default(), th, cfg.ts, cfg.vg_min).map_err(model)?;
    h_output(&next, th).map_err(model)
}

/// One real-time iteration: shift, linearize, solve the QP, update, predict.
///
/// The input window is left untouched; the shifted and updated window is
/// returned.
pub fn mhe_step(
    win: &HorizonWindow,
    new_meas: OutputVec,
    new_meas_var: Vec3,
    new_params: FlightParams,
    cfg: &MheConfig,
    mask: OutputMask,
) -> Result<StepOutput, MheError> {
    if !win.is_consistent() || win.horizon() != cfg.horizon {
        return Err(MheError::WindowShape);
    }
    let n = win.horizon();
    let newest = win.states[n];
    let newest_params = win.params[n];
    let predicted = discrete_step(&newest, &ProcessInput::default(), &newest_params, cfg.ts, cfg.vg_min)
        .map_err(|err| MheError::Model { stage: n, err })?;

    let mut next = win.clone();
    next.states.remove(0);
    next.states.push(project_inside(predicted, &cfg.bounds));
    next.inputs.remove(0);
    next.inputs.push(ProcessInput::default());
    next.params.remove(0);
    next.params.push(new_params);
    next.meas.remove(0);
    next.meas.push(new_meas);
    next.meas_var.remove(0);
    next.meas_var.push(new_meas_var);
    next.prior = next.states[0];

    let qp = linearize(&next, cfg, mask)?;
    let (dev, report) = solve_qp(&qp, &cfg.barrier, &cfg.weights.cost_matrices())?;
    for (x, d) in next.states.iter_mut().zip(dev.dx.iter()) {
        *x = EstimState::from_vec(x.to_vec() + *d);
    }
    for (u, d) in next.inputs.iter_mut().zip(dev.du.iter()) {
        *u = ProcessInput::from_vec(u.to_vec() + *d);
    }
    next.prior = next.states[0];
    let estimate = next.states[n];
    let prediction = predict_output(&estimate, &new_params, cfg).map_err(|e| match e {
        MheError::Model { err, .. } => MheError::Model { stage: n, err },
        other => other,
    })?;
    Ok(StepOutput {
        estimate,
        prediction,
        window: next,
        report,
    })
}

/// Outcome of [`Estimator::step`].
#[derive(Clone, Debug, PartialEq)]
pub struct StepOutcome {
    pub estimate: EstimState,
    pub prediction: OutputVec,
    pub report: Option<SolveReport>,
    /// Set when the step failed and the previous estimate was held.
    pub degraded: Option<MheError>,
}

/// Stateful wrapper around [`mhe_step`] that holds the previous estimate and
/// prediction for a sample whenever the model leaves its domain.
#[derive(Clone, Debug)]
pub struct Estimator {
    cfg: MheConfig,
    window: HorizonWindow,
    estimate: EstimState,
    prediction: OutputVec,
}

impl Estimator {
    pub fn new(
        cfg: MheConfig,
        x0: EstimState,
        params0: FlightParams,
        meas0: OutputVec,
        meas_var0: Vec3,
    ) -> Result<Self, MheError> {
        let window = initialize_window(x0, params0, meas0, meas_var0, cfg.horizon);
        let prediction = predict_output(&x0, &params0, &cfg)?;
        Ok(Estimator {
            cfg,
            window,
            estimate: x0,
            prediction,
        })
    }

    pub fn config(&self) -> &MheConfig {
        &self.cfg
    }

    pub fn window(&self) -> &HorizonWindow {
        &self.window
    }

    pub fn estimate(&self) -> EstimState {
        self.estimate
    }

    /// Prediction of the outputs at the sample about to arrive.
    pub fn prediction(&self) -> OutputVec {
        self.prediction
    }

    pub fn step(&mut self, meas: OutputVec, meas_var: Vec3, params: FlightParams, mask: OutputMask) -> StepOutcome {
        match mhe_step(&self.window, meas, meas_var, params, &self.cfg, mask) {
            Ok(out) => {
                self.window = out.window;
                self.estimate = out.estimate;
                self.prediction = out.prediction;
                StepOutcome {
                    estimate: out.estimate,
                    prediction: out.prediction,
                    report: Some(out.report),
                    degraded: None,
                }
            }
            Err(err) => StepOutcome {
                estimate: self.estimate,
                prediction: self.prediction,
                report: None,
                degraded: Some(err),
            },
        }
    }
}
