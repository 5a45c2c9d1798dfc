//! Longitudinal kinematic model with wind states.
//!
//! State `x = [alpha, Wx, Wz]`, process input `u = [u_alpha, u_wx, u_wz]` and
//! measurable parameters `[Vg, theta, q, nx, nz, z]`. The AOA rate uses only
//! inertial quantities:
//!
//! ```text
//! dalpha/dt = q + (g / Vg) * (cos(theta - alpha) - nz cos(alpha) - nx sin(alpha)) + u_alpha
//! dw/dt     = u_w
//! ```
//!
//! Outputs are AOA (identity), vertical speed from the vertical-plane wind
//! triangle and calibrated airspeed from the standard atmosphere.

use core::fmt;

use crate::smallmat::{Mat3, Matrix, Vec3, Vector};

/// Standard gravity (m/s²).
pub const G0: f64 = 9.80665;
/// Specific gas constant of dry air (J/(kg·K)).
pub const R_AIR: f64 = 287.053;
/// Ratio of specific heats.
pub const GAMMA: f64 = 1.4;
/// Sea-level standard pressure (Pa).
pub const P0: f64 = 101_325.0;
/// Sea-level standard temperature (K).
pub const T0: f64 = 288.15;
/// Sea-level standard speed of sound, `sqrt(GAMMA * R_AIR * T0)` (m/s).
pub const A0: f64 = 340.294_065_081_952_3;
/// Tropospheric lapse rate (K/m).
pub const LAPSE: f64 = 0.0065;
/// Tropopause altitude (m).
pub const TROPOPAUSE: f64 = 11_000.0;
/// Temperature of the isothermal layer above the tropopause (K).
pub const T_TROPOPAUSE: f64 = 216.65;
/// Highest altitude accepted by [`isa_atmosphere`] (m).
pub const Z_MAX: f64 = 20_000.0;
/// Smallest admissible `cos(theta - alpha)`.
pub const EPS_COS: f64 = 1e-3;
/// Default ground-speed floor for the AOA dynamics (m/s).
pub const DEFAULT_VG_MIN: f64 = 30.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModelError {
    AltitudeOutOfRange { z: f64 },
    SingularGeometry { cos_gamma: f64, vg_minus_wx: f64 },
    Supersonic { mach: f64 },
    GroundSpeedTooLow { vg: f64, vg_min: f64 },
    NonFinite,
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::AltitudeOutOfRange { z } => {
                write!(f, "altitude {z} m outside [0, {Z_MAX}] m")
            }
            ModelError::SingularGeometry { cos_gamma, vg_minus_wx } => write!(
                f,
                "singular wind triangle (cos(theta-alpha) = {cos_gamma}, Vg - Wx = {vg_minus_wx})"
            ),
            ModelError::Supersonic { mach } => write!(f, "Mach {mach} not subsonic"),
            ModelError::GroundSpeedTooLow { vg, vg_min } => {
                write!(f, "ground speed {vg} m/s below floor {vg_min} m/s")
            }
            ModelError::NonFinite => write!(f, "non-finite model input"),
        }
    }
}

impl core::error::Error for ModelError {}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlightParams {
    /// Horizontal ground speed (m/s).
    pub vg: f64,
    /// Pitch angle (rad).
    pub theta: f64,
    /// Pitch rate (rad/s).
    pub q: f64,
    /// Horizontal (body x) load factor.
    pub nx: f64,
    /// Vertical (body z, positive up) load factor.
    pub nz: f64,
    /// Altitude (m).
    pub z: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EstimState {
    pub alpha: f64,
    pub wx: f64,
    pub wz: f64,
}

impl EstimState {
    pub fn new(alpha: f64, wx: f64, wz: f64) -> Self {
        EstimState { alpha, wx, wz }
    }

    pub fn to_vec(self) -> Vec3 {
        Vector([self.alpha, self.wx, self.wz])
    }

    pub fn from_vec(v: Vec3) -> Self {
        EstimState {
            alpha: v[0],
            wx: v[1],
            wz: v[2],
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ProcessInput {
    pub u_alpha: f64,
    pub u_wx: f64,
    pub u_wz: f64,
}

impl ProcessInput {
    pub fn to_vec(self) -> Vec3 {
        Vector([self.u_alpha, self.u_wx, self.u_wz])
    }

    pub fn from_vec(v: Vec3) -> Self {
        ProcessInput {
            u_alpha: v[0],
            u_wx: v[1],
            u_wz: v[2],
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct OutputVec {
    /// AOA (rad).
    pub alpha: f64,
    /// Vertical speed, positive up (m/s).
    pub vz: f64,
    /// Calibrated airspeed (m/s).
    pub vc: f64,
}

impl OutputVec {
    pub fn to_vec(self) -> Vec3 {
        Vector([self.alpha, self.vz, self.vc])
    }

    pub fn from_vec(v: Vec3) -> Self {
        OutputVec {
            alpha: v[0],
            vz: v[1],
            vc: v[2],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AtmoState {
    /// Static pressure (Pa).
    pub p: f64,
    /// Temperature (K).
    pub t: f64,
    /// Density (kg/m³).
    pub rho: f64,
    /// Speed of sound (m/s).
    pub a: f64,
}

/// Which output rows carry no information because every sensor of the
/// corresponding family has been isolated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct OutputMask {
    pub aoa_lost: bool,
    pub vcas_lost: bool,
}

impl OutputMask {
    pub const ALL_AVAILABLE: OutputMask = OutputMask {
        aoa_lost: false,
        vcas_lost: false,
    };
}

/// Two-layer standard atmosphere (troposphere and isothermal lower stratosphere).
pub fn isa_atmosphere(z: f64) -> Result<AtmoState, ModelError> {
    if !(0.0..=Z_MAX).contains(&z) {
        return Err(ModelError::AltitudeOutOfRange { z });
    }
    let exponent = G0 / (LAPSE * R_AIR);
    let (t, p) = if z <= TROPOPAUSE {
        let t = T0 - LAPSE * z;
        (t, P0 * libm::pow(t / T0, exponent))
    } else {
        let p11 = P0 * libm::pow(T_TROPOPAUSE / T0, exponent);
        let p = p11 * libm::exp(-G0 * (z - TROPOPAUSE) / (R_AIR * T_TROPOPAUSE));
        (T_TROPOPAUSE, p)
    };
    Ok(AtmoState {
        p,
        t,
        rho: p / (R_AIR * t),
        a: libm::sqrt(GAMMA * R_AIR * t),
    })
}

fn air_path(x: &EstimState, th: &FlightParams) -> Result<(f64, f64), ModelError> {
    let gamma_a = th.theta - x.alpha;
    let cos_g = libm::cos(gamma_a);
    let horiz = th.vg - x.wx;
    if !cos_g.is_finite() || !horiz.is_finite() {
        return Err(ModelError::NonFinite);
    }
    if cos_g <= EPS_COS || horiz <= 0.0 {
        return Err(ModelError::SingularGeometry {
            cos_gamma: cos_g,
            vg_minus_wx: horiz,
        });
    }
    Ok((gamma_a, horiz))
}

/// True airspeed from the wind triangle: `(Vg - Wx) / cos(theta - alpha)`.
pub fn tas_from_state(x: &EstimState, th: &FlightParams) -> Result<f64, ModelError> {
    let (gamma_a, horiz) = air_path(x, th)?;
    Ok(horiz / libm::cos(gamma_a))
}

/// `(1 + s)^e - 1` without cancellation for small `s`.
fn pow_m1(s: f64, e: f64) -> f64 {
    libm::expm1(e * libm::log1p(s))
}

/// Calibrated airspeed for a true airspeed at altitude `z`.
pub fn cas_from_tas(tas: f64, z: f64) -> Result<f64, ModelError> {
    let atmo = isa_atmosphere(z)?;
    let mach = tas / atmo.a;
    if !(mach < 1.0) {
        return Err(ModelError::Supersonic { mach });
    }
    let qc = atmo.p * pow_m1(0.2 * mach * mach, 3.5);
    let ratio = pow_m1(qc / P0, 2.0 / 7.0);
    Ok(A0 * libm::sqrt(5.0 * ratio.max(0.0)))
}

/// Inverse of [`cas_from_tas`].
pub fn tas_from_cas(cas: f64, z: f64) -> Result<f64, ModelError> {
    let atmo = isa_atmosphere(z)?;
    let m0 = cas / A0;
    let qc = P0 * pow_m1(0.2 * m0 * m0, 3.5);
    let mach = libm::sqrt(5.0 * pow_m1(qc / atmo.p, 2.0 / 7.0).max(0.0));
    if !(mach < 1.0) {
        return Err(ModelError::Supersonic { mach });
    }
    Ok(mach * atmo.a)
}

/// `dVc/dVtas` at the given true airspeed and altitude.
fn cas_sensitivity(tas: f64, z: f64) -> Result<(f64, f64), ModelError> {
    let atmo = isa_atmosphere(z)?;
    let mach = tas / atmo.a;
    if !(mach < 1.0) {
        return Err(ModelError::Supersonic { mach });
    }
    let base = 1.0 + 0.2 * mach * mach;
    let qc = atmo.p * pow_m1(0.2 * mach * mach, 3.5);
    let vc = A0 * libm::sqrt(5.0 * pow_m1(qc / P0, 2.0 / 7.0).max(0.0));
    let dqc_dv = 1.4 * atmo.p * mach * libm::pow(base, 2.5) / atmo.a;
    let dx_dqc = (2.0 / 7.0) * libm::pow(qc / P0 + 1.0, -5.0 / 7.0) / P0;
    let dvc_dx = if vc > 0.0 { 5.0 * A0 * A0 / (2.0 * vc) } else { 0.0 };
    Ok((vc, dvc_dx * dx_dqc * dqc_dv))
}

pub fn h_output(x: &EstimState, th: &FlightParams) -> Result<OutputVec, ModelError> {
    let (gamma_a, horiz) = air_path(x, th)?;
    let vz = horiz * libm::tan(gamma_a) + x.wz;
    let tas = horiz / libm::cos(gamma_a);
    let vc = cas_from_tas(tas, th.z)?;
    Ok(OutputVec { alpha: x.alpha, vz, vc })
}

fn check_vg(th: &FlightParams, vg_min: f64) -> Result<(), ModelError> {
    if !th.vg.is_finite() {
        return Err(ModelError::NonFinite);
    }
    if th.vg <= vg_min {
        return Err(ModelError::GroundSpeedTooLow { vg: th.vg, vg_min });
    }
    Ok(())
}

/// Kinematic AOA rate without the mismatch input.
pub fn f_alpha(alpha: f64, th: &FlightParams, vg_min: f64) -> Result<f64, ModelError> {
    check_vg(th, vg_min)?;
    let bracket = libm::cos(th.theta - alpha) - th.nz * libm::cos(alpha) - th.nx * libm::sin(alpha);
    Ok(th.q + G0 / th.vg * bracket)
}

/// `d f_alpha / d alpha`.
pub fn df_alpha(alpha: f64, th: &FlightParams, vg_min: f64) -> Result<f64, ModelError> {
    check_vg(th, vg_min)?;
    let bracket = libm::sin(th.theta - alpha) + th.nz * libm::sin(alpha) - th.nx * libm::cos(alpha);
    Ok(G0 / th.vg * bracket)
}

/// Forward-Euler transition `F(x, u, params)`.
pub fn discrete_step(
    x: &EstimState,
    u: &ProcessInput,
    th: &FlightParams,
    ts: f64,
    vg_min: f64,
) -> Result<EstimState, ModelError> {
    let f = f_alpha(x.alpha, th, vg_min)?;
    Ok(EstimState {
        alpha: x.alpha + ts * f + ts * u.u_alpha,
        wx: x.wx + ts * u.u_wx,
        wz: x.wz + ts * u.u_wz,
    })
}

/// `diag(1 + ts * df/dalpha, 1, 1)`.
pub fn jacobian_a(x: &EstimState, th: &FlightParams, ts: f64, vg_min: f64) -> Result<Mat3, ModelError> {
    let d = df_alpha(x.alpha, th, vg_min)?;
    Ok(Mat3::from_diagonal(&Vector([1.0 + ts * d, 1.0, 1.0])))
}

/// Analytic output Jacobian, without the forced zeros or masking.
pub fn jacobian_c_exact(x: &EstimState, th: &FlightParams) -> Result<Mat3, ModelError> {
    let (gamma_a, horiz) = air_path(x, th)?;
    let cos_g = libm::cos(gamma_a);
    let tan_g = libm::tan(gamma_a);
    let tas = horiz / cos_g;
    let (_, dvc_dtas) = cas_sensitivity(tas, th.z)?;
    Ok(Matrix([
        [1.0, 0.0, 0.0],
        [-horiz / (cos_g * cos_g), -tan_g, 1.0],
        [-dvc_dtas * tas * tan_g, -dvc_dtas / cos_g, 0.0],
    ]))
}

/// Output Jacobian as used by the estimator.
///
/// `C(2,2)` (Vz w.r.t. Wx) and `C(3,3)` (Vc w.r.t. Wz) are set to zero, and
/// row 1 or row 3 is cleared when every AOA or VCAS sensor is lost.
pub fn jacobian_c(x: &EstimState, th: &FlightParams, mask: OutputMask) -> Result<Mat3, ModelError> {
    let mut c = jacobian_c_exact(x, th)?;
    c.0[1][1] = 0.0;
    c.0[2][2] = 0.0;
    if mask.aoa_lost {
        c.0[0] = [0.0; 3];
    }
    if mask.vcas_lost {
        c.0[2] = [0.0; 3];
    }
    Ok(c)
}
