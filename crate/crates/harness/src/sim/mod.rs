//! Synthetic truth, wind, sensor noise and fault injection.

pub mod fault;
pub mod noise;
pub mod trajectory;
pub mod wind;

use airdata_mhe::airmodel::{
    f_alpha, h_output, tas_from_cas, tas_from_state, EstimState, FlightParams, DEFAULT_VG_MIN, G0,
};
use airdata_mhe::fdi::{ChannelId, Family, RawMeasurement};
use airdata_mhe::units::deg;

pub use fault::{FaultInjector, FaultKind, FaultProfile};
pub use trajectory::{Maneuver, Profile};
pub use wind::{AxisWind, WindProfile, WindShape};

use crate::error::SimError;
use wind::AxisRealization;

/// Number of measurement channels: three AOA, three VCAS and one Vz.
pub const N_MEAS: usize = 7;
pub const VZ_INDEX: usize = 6;
/// Integration sub-steps per sample.
pub const SUBSTEPS: usize = 10;
/// AOA range the synthetic trajectories must stay in (rad).
pub const ALPHA_ENVELOPE: (f64, f64) = (-0.174_532_925_199_432_95, 0.436_332_312_998_582_4);

pub fn channel_index(id: ChannelId) -> usize {
    match id.family {
        Family::Aoa => id.index,
        Family::Vcas => 3 + id.index,
    }
}

/// Extra AOA rate `amplitude * sin(2π f t)` present in the truth but not in
/// the estimator model.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Mismatch {
    pub amplitude: f64,
    pub freq: f64,
}

/// Noise standard deviations (rad, m/s, m/s).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseStd {
    pub alpha: f64,
    pub vz: f64,
    pub vc: f64,
}

impl NoiseStd {
    pub fn of_channel(&self, i: usize) -> f64 {
        match i {
            0..=2 => self.alpha,
            3..=5 => self.vc,
            _ => self.vz,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub maneuver: Maneuver,
    /// Initial altitude (m).
    pub altitude: f64,
    /// Initial calibrated airspeed (m/s).
    pub cas: f64,
    pub duration: f64,
    pub ts: f64,
    pub seed: u64,
    pub mismatch: Mismatch,
    pub wind: WindProfile,
    pub noise: NoiseStd,
    pub faults: Vec<FaultProfile>,
}

impl Scenario {
    /// Samples `k = 0..=n`; errors unless `duration / ts` is an integer.
    pub fn sample_count(&self) -> Result<usize, SimError> {
        let n = self.duration / self.ts;
        if !(n.is_finite() && n >= 1.0 && (n - n.round()).abs() < 1e-9 * n.max(1.0)) {
            return Err(SimError::SampleCount {
                duration: self.duration,
                ts: self.ts,
            });
        }
        Ok(n.round() as usize)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruthSample {
    pub t: f64,
    pub state: EstimState,
    pub params: FlightParams,
    pub vz: f64,
    pub vc: f64,
    pub tas: f64,
}

/// Per-sample truth and per-channel measurement bookkeeping.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TruthTrace {
    pub ts: f64,
    pub samples: Vec<TruthSample>,
    pub clean: Vec<[f64; N_MEAS]>,
    pub fault: Vec<[f64; N_MEAS]>,
    pub noise: Vec<[f64; N_MEAS]>,
    pub corrupted: Vec<[f64; N_MEAS]>,
    pub fault_active: Vec<[bool; 6]>,
}

impl TruthTrace {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn raw_measurement(&self, k: usize) -> RawMeasurement {
        let m = &self.corrupted[k];
        RawMeasurement {
            aoa: [m[0], m[1], m[2]],
            vz: m[VZ_INDEX],
            vcas: [m[3], m[4], m[5]],
        }
    }
}

struct Kinematics<'a> {
    profile: Profile,
    wx: AxisRealization,
    wz: AxisRealization,
    mismatch: &'a Mismatch,
}

impl Kinematics<'_> {
    /// Flight parameters at `t` for altitude `z`, with the wind components.
    fn params(&self, t: f64, z: f64) -> (FlightParams, f64, f64) {
        let (ac, ac_dot) = self.profile.alpha.eval(t);
        let (gc, gc_dot) = self.profile.gamma.eval(t);
        let (v, v_dot) = self.profile.tas.eval(t);
        let (wx, wx_dot) = self.wx.eval(t);
        let (wz, _) = self.wz.eval(t);
        let theta = ac + gc;
        let vg = v * gc.cos() + wx;
        let vg_dot = v_dot * gc.cos() - v * gc.sin() * gc_dot + wx_dot;
        // load factors that make the kinematic AOA equation reproduce ac_dot
        let a = gc_dot * vg / G0 + gc.cos();
        let b = vg_dot / G0;
        let nz = (a * theta.cos() - b * ac.sin()) / gc.cos();
        let nx = (b * ac.cos() + a * theta.sin()) / gc.cos();
        (
            FlightParams {
                vg,
                theta,
                q: ac_dot + gc_dot,
                nx,
                nz,
                z,
            },
            wx,
            wz,
        )
    }

    fn rates(&self, t: f64, alpha: f64, z: f64) -> Result<(f64, f64), airdata_mhe::airmodel::ModelError> {
        let (th, wx, wz) = self.params(t, z);
        let m = self.mismatch.amplitude * (2.0 * std::f64::consts::PI * self.mismatch.freq * t).sin();
        let alpha_dot = f_alpha(alpha, &th, DEFAULT_VG_MIN)? + m;
        let z_dot = (th.vg - wx) * (th.theta - alpha).tan() + wz;
        Ok((alpha_dot, z_dot))
    }
}

fn check_envelope(r: &AxisRealization, axis: char, duration: f64, dt: f64, envelope: f64) -> Result<(), SimError> {
    let n = (duration / dt).ceil() as usize;
    let peak = (0..=n).map(|i| r.eval(i as f64 * dt).0.abs()).fold(0.0, f64::max);
    if peak > envelope {
        return Err(SimError::WindEnvelope {
            axis,
            peak_kts: airdata_mhe::units::kts(peak),
            envelope_kts: airdata_mhe::units::kts(envelope),
        });
    }
    Ok(())
}

/// Clean truth: states, parameters and fault-free readings at every sample.
pub fn generate_truth(sc: &Scenario) -> Result<TruthTrace, SimError> {
    let n = sc.sample_count()?;
    let h = sc.ts / SUBSTEPS as f64;
    let tas0 = tas_from_cas(sc.cas, sc.altitude).map_err(|source| SimError::Infeasible {
        sample: 0,
        t: 0.0,
        source,
    })?;
    let mut rx = noise::rng_for(sc.seed, noise::stream::WIND_X);
    let mut rz = noise::rng_for(sc.seed, noise::stream::WIND_Z);
    let kin = Kinematics {
        profile: Profile::for_maneuver(sc.maneuver, sc.cas, tas0),
        wx: AxisRealization::new(&sc.wind.x, sc.duration, h, &mut rx),
        wz: AxisRealization::new(&sc.wind.z, sc.duration, h, &mut rz),
        mismatch: &sc.mismatch,
    };
    check_envelope(&kin.wx, 'x', sc.duration, h, sc.wind.envelope)?;
    check_envelope(&kin.wz, 'z', sc.duration, h, sc.wind.envelope)?;

    let mut trace = TruthTrace {
        ts: sc.ts,
        ..TruthTrace::default()
    };
    let mut alpha = kin.profile.alpha.eval(0.0).0;
    let mut z = sc.altitude;
    for k in 0..=n {
        let t = k as f64 * sc.ts;
        let infeasible = |source| SimError::Infeasible { sample: k, t, source };
        if k > 0 {
            let t0 = (k - 1) as f64 * sc.ts;
            for j in 0..SUBSTEPS {
                let tj = t0 + j as f64 * h;
                let (k1a, k1z) = kin.rates(tj, alpha, z).map_err(infeasible)?;
                let (k2a, k2z) = kin
                    .rates(tj + 0.5 * h, alpha + 0.5 * h * k1a, z + 0.5 * h * k1z)
                    .map_err(infeasible)?;
                let (k3a, k3z) = kin
                    .rates(tj + 0.5 * h, alpha + 0.5 * h * k2a, z + 0.5 * h * k2z)
                    .map_err(infeasible)?;
                let (k4a, k4z) = kin.rates(tj + h, alpha + h * k3a, z + h * k3z).map_err(infeasible)?;
                alpha += h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
                z += h / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
            }
        }
        if !(ALPHA_ENVELOPE.0 < alpha && alpha < ALPHA_ENVELOPE.1) {
            return Err(SimError::AlphaEnvelope {
                sample: k,
                t,
                alpha_deg: deg(alpha),
            });
        }
        let (params, wx, wz) = kin.params(t, z);
        let state = EstimState::new(alpha, wx, wz);
        let y = h_output(&state, &params).map_err(infeasible)?;
        let tas = tas_from_state(&state, &params).map_err(infeasible)?;
        trace.samples.push(TruthSample {
            t,
            state,
            params,
            vz: y.vz,
            vc: y.vc,
            tas,
        });
        trace.clean.push([y.alpha, y.alpha, y.alpha, y.vc, y.vc, y.vc, y.vz]);
    }
    let len = trace.samples.len();
    trace.fault = vec![[0.0; N_MEAS]; len];
    trace.noise = vec![[0.0; N_MEAS]; len];
    trace.corrupted = trace.clean.clone();
    trace.fault_active = vec![[false; 6]; len];
    Ok(trace)
}

/// Adds the configured faults to the fault column and refreshes `corrupted`.
pub fn inject_faults(trace: &mut TruthTrace, faults: &[FaultProfile], seed: u64) -> Result<(), SimError> {
    for (i, p) in faults.iter().enumerate() {
        if !p.is_valid() {
            return Err(SimError::InvalidFault {
                channel: p.target.to_string(),
            });
        }
        let ch = channel_index(p.target);
        let mut inj = FaultInjector::new(*p, noise::rng_for(seed, noise::stream::fault(i)));
        for k in 0..trace.len() {
            let t = trace.samples[k].t;
            trace.fault[k][ch] += inj.fault_value(t, trace.clean[k][ch]);
            trace.fault_active[k][ch] |= p.is_active(t);
        }
    }
    refresh(trace);
    Ok(())
}

/// Fills the noise column from per-channel seeded streams.
pub fn corrupt(trace: &mut TruthTrace, std: &NoiseStd, seed: u64) {
    for ch in 0..N_MEAS {
        let mut rng = noise::rng_for(seed, noise::stream::measurement(ch));
        let s = std.of_channel(ch);
        for k in 0..trace.len() {
            trace.noise[k][ch] = noise::gaussian(&mut rng, s);
        }
    }
    refresh(trace);
}

fn refresh(trace: &mut TruthTrace) {
    for k in 0..trace.len() {
        for ch in 0..N_MEAS {
            trace.corrupted[k][ch] = trace.clean[k][ch] + trace.fault[k][ch] + trace.noise[k][ch];
        }
    }
}

/// Truth, faults and noise for a scenario.
pub fn simulate(sc: &Scenario) -> Result<TruthTrace, SimError> {
    let mut trace = generate_truth(sc)?;
    inject_faults(&mut trace, &sc.faults, sc.seed)?;
    corrupt(&mut trace, &sc.noise, sc.seed);
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use airdata_mhe::units::{ft_to_m, ms, rad};

    fn scenario(m: Maneuver, alt_ft: f64, kts: f64) -> Scenario {
        Scenario {
            name: "t".into(),
            maneuver: m,
            altitude: ft_to_m(alt_ft),
            cas: ms(kts),
            duration: 100.0,
            ts: 0.04,
            seed: 3,
            mismatch: Mismatch::default(),
            wind: WindProfile {
                x: AxisWind {
                    shape: WindShape::ShearRamp {
                        peak: ms(20.0),
                        t_start: 10.0,
                        ramp: 20.0,
                    },
                    ..AxisWind::calm()
                },
                z: AxisWind {
                    shape: WindShape::Gust {
                        amplitude: ms(5.0),
                        freq: 0.05,
                        t_start: 30.0,
                    },
                    ..AxisWind::calm()
                },
                envelope: ms(120.0),
            },
            noise: NoiseStd {
                alpha: rad(0.057),
                vz: 0.3,
                vc: ms(0.5),
            },
            faults: Vec::new(),
        }
    }

    const CASES: [(Maneuver, f64, f64); 5] = [
        (Maneuver::Level, 5000.0, 200.0),
        (Maneuver::LoadFactor, 7475.0, 207.0),
        (Maneuver::FlightPathAngle, 31331.0, 322.0),
        (Maneuver::VerticalSpeed, 15658.0, 351.0),
        (Maneuver::AoaProtection, 943.0, 162.0),
    ];

    #[test]
    fn truth_follows_commanded_alpha_without_mismatch() {
        for (m, alt, v) in CASES {
            let sc = scenario(m, alt, v);
            let tr = generate_truth(&sc).unwrap();
            let prof = Profile::for_maneuver(m, sc.cas, tas_from_cas(sc.cas, sc.altitude).unwrap());
            let worst = tr
                .samples
                .iter()
                .map(|s| (s.state.alpha - prof.alpha.eval(s.t).0).abs())
                .fold(0.0, f64::max);
            assert!(worst < 1e-7, "{m}: {worst}");
        }
    }

    #[test]
    fn vertical_speed_integrates_to_altitude() {
        for (m, alt, v) in CASES {
            let tr = generate_truth(&scenario(m, alt, v)).unwrap();
            for w in tr.samples.windows(2) {
                let dz = w[1].params.z - w[0].params.z;
                let avg = 0.5 * (w[0].vz + w[1].vz) * tr.ts;
                assert!((dz - avg).abs() < 1e-3, "{m}: {dz} vs {avg}");
            }
        }
    }

    #[test]
    fn level_flight_holds_trim() {
        let mut sc = scenario(Maneuver::Level, 5000.0, 200.0);
        sc.wind = WindProfile::calm(ms(120.0));
        let tr = generate_truth(&sc).unwrap();
        let a0 = tr.samples[0].state.alpha;
        for s in &tr.samples {
            assert!((s.state.alpha - a0).abs() < 1e-9);
            assert!((s.params.z - sc.altitude).abs() < 1e-6);
            assert!(s.vz.abs() < 1e-9);
            assert!((s.vc - sc.cas).abs() < 1e-6);
        }
    }

    #[test]
    fn corrupted_is_clean_plus_fault_plus_noise() {
        let mut sc = scenario(Maneuver::LoadFactor, 7475.0, 207.0);
        sc.faults.push(FaultProfile {
            kind: FaultKind::Bias { level: ms(24.0) },
            target: ChannelId::vcas(1),
            t_on: 50.0,
            t_off: None,
        });
        let tr = simulate(&sc).unwrap();
        assert_eq!(tr.len(), 2501);
        for k in 0..tr.len() {
            for ch in 0..N_MEAS {
                assert_eq!(tr.corrupted[k][ch], tr.clean[k][ch] + tr.fault[k][ch] + tr.noise[k][ch]);
            }
            let on = tr.samples[k].t >= 50.0;
            assert_eq!(tr.fault_active[k][4], on);
            assert_eq!(tr.fault[k][4], if on { ms(24.0) } else { 0.0 });
        }
        assert_eq!(tr, simulate(&sc).unwrap());
    }

    #[test]
    fn envelopes_are_enforced() {
        let mut sc = scenario(Maneuver::Level, 5000.0, 200.0);
        sc.wind.envelope = ms(10.0);
        assert!(matches!(
            generate_truth(&sc),
            Err(SimError::WindEnvelope { axis: 'x', .. })
        ));
        let mut sc = scenario(Maneuver::Level, 5000.0, 200.0);
        sc.mismatch = Mismatch {
            amplitude: rad(40.0),
            freq: 0.01,
        };
        assert!(matches!(generate_truth(&sc), Err(SimError::AlphaEnvelope { .. })));
        let mut sc = scenario(Maneuver::Level, 5000.0, 200.0);
        sc.duration = 10.01;
        assert!(matches!(generate_truth(&sc), Err(SimError::SampleCount { .. })));
    }
}
