//! Commanded air-relative profiles for the four maneuver archetypes.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use airdata_mhe::units::rad;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Maneuver {
    /// Wings-level trim, no commanded changes.
    Level,
    LoadFactor,
    FlightPathAngle,
    VerticalSpeed,
    AoaProtection,
}

impl Maneuver {
    pub fn as_str(self) -> &'static str {
        match self {
            Maneuver::Level => "level",
            Maneuver::LoadFactor => "load_factor",
            Maneuver::FlightPathAngle => "flight_path_angle",
            Maneuver::VerticalSpeed => "vertical_speed",
            Maneuver::AoaProtection => "aoa_protection",
        }
    }
}

impl fmt::Display for Maneuver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Maneuver {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "load_factor" => Ok(Maneuver::LoadFactor),
            "flight_path_angle" => Ok(Maneuver::FlightPathAngle),
            "vertical_speed" => Ok(Maneuver::VerticalSpeed),
            "aoa_protection" => Ok(Maneuver::AoaProtection),
            "level" => Ok(Maneuver::Level),
            other => Err(format!("unknown maneuver `{other}`")),
        }
    }
}

/// Raised-cosine transition from 0 to 1 over `[t0, t0 + dur]` and its rate.
pub fn smooth_step(t: f64, t0: f64, dur: f64) -> (f64, f64) {
    if t <= t0 {
        (0.0, 0.0)
    } else if t >= t0 + dur {
        (1.0, 0.0)
    } else {
        let tau = (t - t0) / dur;
        (0.5 * (1.0 - (PI * tau).cos()), 0.5 * PI / dur * (PI * tau).sin())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ramp {
    pub t0: f64,
    pub dur: f64,
    pub delta: f64,
}

/// A base value plus a sum of smooth ramps.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Schedule {
    pub base: f64,
    pub ramps: Vec<Ramp>,
}

impl Schedule {
    pub fn constant(base: f64) -> Self {
        Schedule {
            base,
            ramps: Vec::new(),
        }
    }

    fn ramp(mut self, t0: f64, dur: f64, delta: f64) -> Self {
        self.ramps.push(Ramp { t0, dur, delta });
        self
    }

    /// Value and time derivative at `t`.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        self.ramps.iter().fold((self.base, 0.0), |(v, r), ramp| {
            let (s, ds) = smooth_step(t, ramp.t0, ramp.dur);
            (v + ramp.delta * s, r + ramp.delta * ds)
        })
    }
}

/// Commanded AOA, air-path angle and true airspeed.
#[derive(Clone, Debug, PartialEq)]
pub struct Profile {
    pub alpha: Schedule,
    pub gamma: Schedule,
    pub tas: Schedule,
}

/// Trim AOA guess growing with the inverse square of calibrated airspeed.
pub fn trim_alpha(cas: f64) -> f64 {
    rad(1.0 + 7.0 * (82.3 / cas).powi(2))
}

impl Profile {
    pub fn for_maneuver(m: Maneuver, cas0: f64, tas0: f64) -> Self {
        let a0 = trim_alpha(cas0);
        let alpha = Schedule::constant(a0);
        let gamma = Schedule::constant(0.0);
        let tas = Schedule::constant(tas0);
        match m {
            Maneuver::Level => Profile { alpha, gamma, tas },
            Maneuver::LoadFactor => Profile {
                alpha: alpha
                    .ramp(15.0, 2.0, rad(1.5))
                    .ramp(17.0, 2.0, rad(-1.5))
                    .ramp(40.0, 2.0, rad(-1.5))
                    .ramp(42.0, 2.0, rad(1.5))
                    .ramp(65.0, 2.0, rad(-1.5))
                    .ramp(67.0, 2.0, rad(1.5))
                    .ramp(90.0, 2.0, rad(1.5))
                    .ramp(92.0, 2.0, rad(-1.5)),
                gamma: gamma
                    .ramp(15.0, 4.0, rad(4.0))
                    .ramp(40.0, 4.0, rad(-4.0))
                    .ramp(65.0, 4.0, rad(-4.0))
                    .ramp(90.0, 4.0, rad(4.0)),
                tas: tas.ramp(20.0, 20.0, -0.03 * tas0).ramp(70.0, 20.0, 0.03 * tas0),
            },
            Maneuver::FlightPathAngle => Profile {
                alpha: alpha
                    .ramp(10.0, 6.0, rad(0.5))
                    .ramp(40.0, 8.0, rad(-1.0))
                    .ramp(80.0, 6.0, rad(0.5)),
                gamma: gamma
                    .ramp(10.0, 6.0, rad(3.0))
                    .ramp(40.0, 8.0, rad(-6.0))
                    .ramp(80.0, 6.0, rad(3.0)),
                tas: tas
                    .ramp(15.0, 20.0, -0.02 * tas0)
                    .ramp(45.0, 20.0, 0.04 * tas0)
                    .ramp(85.0, 15.0, -0.02 * tas0),
            },
            Maneuver::VerticalSpeed => {
                let up = (7.5 / tas0).asin();
                let down = (-10.0 / tas0).asin();
                Profile {
                    alpha: alpha
                        .ramp(12.0, 8.0, rad(0.4))
                        .ramp(45.0, 10.0, rad(-0.8))
                        .ramp(85.0, 8.0, rad(0.4)),
                    gamma: gamma
                        .ramp(12.0, 8.0, up)
                        .ramp(45.0, 10.0, down - up)
                        .ramp(85.0, 8.0, -down),
                    tas: tas.ramp(20.0, 25.0, 0.02 * tas0).ramp(60.0, 25.0, -0.02 * tas0),
                }
            }
            Maneuver::AoaProtection => {
                let da = (0.49 * a0 + rad(3.0)).min(rad(20.0) - a0);
                Profile {
                    alpha: alpha.ramp(15.0, 35.0, da).ramp(80.0, 25.0, -da),
                    gamma: gamma.ramp(15.0, 10.0, rad(2.0)).ramp(50.0, 10.0, rad(-2.0)),
                    tas: tas.ramp(15.0, 35.0, -0.18 * tas0).ramp(80.0, 25.0, 0.18 * tas0),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_step_rate_matches_difference() {
        let h = 1e-6;
        for t in [0.3, 1.1, 1.9] {
            let fd = (smooth_step(t + h, 0.0, 2.0).0 - smooth_step(t - h, 0.0, 2.0).0) / (2.0 * h);
            assert!((fd - smooth_step(t, 0.0, 2.0).1).abs() < 1e-8);
        }
        assert_eq!(smooth_step(-1.0, 0.0, 2.0), (0.0, 0.0));
        assert_eq!(smooth_step(3.0, 0.0, 2.0), (1.0, 0.0));
    }

    #[test]
    fn schedules_return_to_base() {
        for m in [
            Maneuver::Level,
            Maneuver::LoadFactor,
            Maneuver::FlightPathAngle,
            Maneuver::VerticalSpeed,
            Maneuver::AoaProtection,
        ] {
            let p = Profile::for_maneuver(m, 100.0, 120.0);
            assert!((p.gamma.eval(200.0).0).abs() < 1e-12, "{m}");
            assert!((p.alpha.eval(200.0).0 - trim_alpha(100.0)).abs() < 1e-12, "{m}");
            assert!((p.tas.eval(200.0).0 - 120.0).abs() < 1e-9, "{m}");
        }
    }
}
