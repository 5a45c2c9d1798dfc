//! Constrained moving-horizon estimator.
//!
//! One Gauss-Newton SQP iteration is performed per sample ([`mhe_step`]). Its
//! QP subproblem is solved by a primal barrier interior-point loop with a
//! fixed number of iterations ([`solve_qp`]), and every Newton direction comes
//! from a Riccati recursion over the horizon ([`solve_kkt`]).
//!
//! Stage indices are window-local: states `0..=N`, inputs `0..N`, with stage 0
//! carrying the arrival cost.

use core::fmt;

use crate::airmodel::{ModelError, DEFAULT_VG_MIN};
use crate::smallmat::{Mat3, SingularMatrix, Vec3, Vector};
use crate::units::{ms, rad};

mod barrier;
mod ipm;
mod kkt;
mod qp;
mod window;

pub use barrier::{barrier_terms, BarrierTerms};
pub use ipm::{line_search, solve_qp, SolveReport};
pub use kkt::{assemble_kkt, solve_kkt, Deviation, KktWork};
pub use qp::{linearize, QpData};
pub use window::{initialize_window, mhe_step, predict_output, Estimator, HorizonWindow, StepOutcome, StepOutput};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MheError {
    /// Model evaluation failed at a window stage.
    Model { stage: usize, err: ModelError },
    /// A deviation sits on or outside its box.
    InfeasiblePoint { stage: usize, component: usize },
    /// The zero deviation is not strictly inside the shifted bounds.
    InfeasibleInitialization { stage: usize, component: usize },
    /// The 6×6 innovation matrix of the Riccati recursion could not be inverted.
    IllConditionedKkt { stage: usize, err: SingularMatrix },
    /// Window buffers do not match the configured horizon.
    WindowShape,
}

impl fmt::Display for MheError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MheError::Model { stage, err } => write!(f, "model error at stage {stage}: {err}"),
            MheError::InfeasiblePoint { stage, component } => {
                write!(
                    f,
                    "iterate not strictly interior at stage {stage}, component {component}"
                )
            }
            MheError::InfeasibleInitialization { stage, component } => write!(
                f,
                "bounds do not straddle the current iterate at stage {stage}, component {component}"
            ),
            MheError::IllConditionedKkt { stage, err } => {
                write!(f, "ill-conditioned KKT system at stage {stage}: {err}")
            }
            MheError::WindowShape => write!(f, "horizon window buffers inconsistent with horizon"),
        }
    }
}

impl core::error::Error for MheError {}

/// Tuning variances of the MHE cost, in SI units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Weights {
    /// Arrival-cost variance of AOA (rad²).
    pub p_alpha: f64,
    /// Arrival-cost variance of each wind component ((m/s)²).
    pub p_w: f64,
    /// Variance of the AOA mismatch input ((rad/s)²).
    pub q_alpha: f64,
    /// Variance of the wind accelerations ((m/s²)²).
    pub q_w: f64,
    /// Base AOA measurement variance (rad²).
    pub r_alpha: f64,
    /// Vertical-speed measurement variance ((m/s)²).
    pub r_vz: f64,
    /// Base VCAS measurement variance ((m/s)²).
    pub r_vc: f64,
}

impl Default for Weights {
    fn default() -> Self {
        Weights {
            p_alpha: rad(0.5) * rad(0.5),
            p_w: 4.0,
            q_alpha: rad(2.0) * rad(2.0),
            q_w: 4.0,
            r_alpha: rad(0.057) * rad(0.057),
            r_vz: 0.3 * 0.3,
            r_vc: ms(0.5) * ms(0.5),
        }
    }
}

impl Weights {
    pub fn is_valid(&self) -> bool {
        [
            self.p_alpha,
            self.p_w,
            self.q_alpha,
            self.q_w,
            self.r_alpha,
            self.r_vz,
            self.r_vc,
        ]
        .iter()
        .all(|v| v.is_finite() && *v > 0.0)
    }

    /// Arrival-cost and process-noise matrices `(P, Q)`.
    pub fn cost_matrices(&self) -> CostMatrices {
        CostMatrices {
            p: Mat3::from_diagonal(&Vector([self.p_alpha, self.p_w, self.p_w])),
            q: Mat3::from_diagonal(&Vector([self.q_alpha, self.q_w, self.q_w])),
        }
    }

    pub fn base_measurement_variances(&self) -> Vec3 {
        Vector([self.r_alpha, self.r_vz, self.r_vc])
    }
}

/// Arrival-cost covariance `P` and process-noise covariance `Q` (both SPD).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostMatrices {
    pub p: Mat3,
    pub q: Mat3,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BarrierConfig {
    pub kappa_init: f64,
    /// Number of barrier weights in the decreasing sequence.
    pub n_kappa: usize,
    /// Newton iterations per barrier weight.
    pub n_qp: usize,
    /// Maximum number of step halvings in the line search.
    pub ns_max: u32,
    pub kappa_decay: f64,
}

impl Default for BarrierConfig {
    fn default() -> Self {
        BarrierConfig {
            kappa_init: 1e-2,
            n_kappa: 2,
            n_qp: 2,
            ns_max: 10,
            kappa_decay: 0.1,
        }
    }
}

impl BarrierConfig {
    pub fn is_valid(&self) -> bool {
        self.kappa_init > 0.0
            && self.kappa_init.is_finite()
            && self.n_kappa >= 1
            && self.n_qp >= 1
            && self.ns_max >= 1
            && self.kappa_decay > 0.0
    }

    pub fn iterations(&self) -> usize {
        self.n_kappa * self.n_qp
    }

    /// Barrier weight used during iteration `j` (zero based).
    pub fn kappa_at(&self, j: usize) -> f64 {
        let stage = (j / self.n_qp) as i32;
        self.kappa_init * libm::pow(self.kappa_decay, f64::from(stage))
    }
}

/// Box constraints on states and inputs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bounds {
    pub x_lb: Vec3,
    pub x_ub: Vec3,
    pub u_lb: Vec3,
    pub u_ub: Vec3,
}

impl Default for Bounds {
    /// AOA in [-10°, 30°], |u_alpha| ≤ 10 deg/s, |W| ≤ 120 kts, |u_w| ≤ 30 kts/s.
    fn default() -> Self {
        let w = ms(120.0);
        let uw = ms(30.0);
        let ua = rad(10.0);
        Bounds {
            x_lb: Vector([rad(-10.0), -w, -w]),
            x_ub: Vector([rad(30.0), w, w]),
            u_lb: Vector([-ua, -uw, -uw]),
            u_ub: Vector([ua, uw, uw]),
        }
    }
}

impl Bounds {
    pub fn is_valid(&self) -> bool {
        (0..3).all(|j| self.x_lb[j] < self.x_ub[j] && self.u_lb[j] < self.u_ub[j])
    }

    /// True when `x` is strictly inside the state box.
    pub fn contains_state(&self, x: &Vec3) -> bool {
        (0..3).all(|j| self.x_lb[j] < x[j] && x[j] < self.x_ub[j])
    }

    pub fn contains_input(&self, u: &Vec3) -> bool {
        (0..3).all(|j| self.u_lb[j] < u[j] && u[j] < self.u_ub[j])
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MheConfig {
    /// Sampling interval (s).
    pub ts: f64,
    /// Number of transitions in the window (N + 1 states).
    pub horizon: usize,
    pub vg_min: f64,
    pub bounds: Bounds,
    pub barrier: BarrierConfig,
    pub weights: Weights,
}

impl Default for MheConfig {
    fn default() -> Self {
        MheConfig {
            ts: 0.04,
            horizon: 3,
            vg_min: DEFAULT_VG_MIN,
            bounds: Bounds::default(),
            barrier: BarrierConfig::default(),
            weights: Weights::default(),
        }
    }
}

impl MheConfig {
    pub fn is_valid(&self) -> bool {
        self.ts > 0.0
            && self.horizon >= 1
            && self.bounds.is_valid()
            && self.barrier.is_valid()
            && self.weights.is_valid()
    }
}
