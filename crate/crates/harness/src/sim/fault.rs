//! Additive sensor fault models.

use std::f64::consts::PI;

use airdata_mhe::fdi::ChannelId;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FaultKind {
    Bias {
        level: f64,
    },
    Oscillation {
        amplitude: f64,
        freq: f64,
    },
    /// Drift at `slope` per second, saturated at `|limit|`.
    Runaway {
        slope: f64,
        limit: f64,
    },
    /// Reading frozen at its value at onset, plus `offset`.
    Jamming {
        offset: f64,
    },
    /// Telegraph signal `±amplitude` with uniform random dwell times.
    Nrz {
        amplitude: f64,
        dwell_min: f64,
        dwell_max: f64,
    },
}

impl FaultKind {
    pub fn name(&self) -> &'static str {
        match self {
            FaultKind::Bias { .. } => "bias",
            FaultKind::Oscillation { .. } => "oscillation",
            FaultKind::Runaway { .. } => "runaway",
            FaultKind::Jamming { .. } => "jamming",
            FaultKind::Nrz { .. } => "nrz",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FaultProfile {
    pub kind: FaultKind,
    pub target: ChannelId,
    pub t_on: f64,
    pub t_off: Option<f64>,
}

impl FaultProfile {
    pub fn is_valid(&self) -> bool {
        let finite = match self.kind {
            FaultKind::Bias { level } => level.is_finite(),
            FaultKind::Oscillation { amplitude, freq } => amplitude.is_finite() && freq.is_finite() && freq > 0.0,
            FaultKind::Runaway { slope, limit } => slope.is_finite() && limit.is_finite(),
            FaultKind::Jamming { offset } => offset.is_finite(),
            FaultKind::Nrz {
                amplitude,
                dwell_min,
                dwell_max,
            } => amplitude.is_finite() && dwell_min > 0.0 && dwell_max >= dwell_min && dwell_max.is_finite(),
        };
        finite && self.t_on.is_finite() && self.t_off.is_none_or(|off| off > self.t_on)
    }

    pub fn is_active(&self, t: f64) -> bool {
        t >= self.t_on && self.t_off.is_none_or(|off| t < off)
    }
}

/// Stateful evaluation of one [`FaultProfile`] along increasing sample times.
#[derive(Clone, Debug)]
pub struct FaultInjector {
    profile: FaultProfile,
    held: Option<f64>,
    rng: ChaCha8Rng,
    next_switch: f64,
    sign: f64,
}

impl FaultInjector {
    pub fn new(profile: FaultProfile, rng: ChaCha8Rng) -> Self {
        FaultInjector {
            profile,
            held: None,
            rng,
            next_switch: profile.t_on,
            sign: -1.0,
        }
    }

    pub fn profile(&self) -> &FaultProfile {
        &self.profile
    }

    /// Additive fault value at `t` for the fault-free reading `clean`.
    ///
    /// Calls must come with non-decreasing `t`.
    pub fn fault_value(&mut self, t: f64, clean: f64) -> f64 {
        let p = self.profile;
        if !p.is_active(t) {
            return 0.0;
        }
        let dt = t - p.t_on;
        match p.kind {
            FaultKind::Bias { level } => level,
            FaultKind::Oscillation { amplitude, freq } => amplitude * (2.0 * PI * freq * dt).sin(),
            FaultKind::Runaway { slope, limit } => {
                let l = limit.abs();
                (slope * dt).clamp(-l, l)
            }
            FaultKind::Jamming { offset } => {
                let held = *self.held.get_or_insert(clean + offset);
                held - clean
            }
            FaultKind::Nrz {
                amplitude,
                dwell_min,
                dwell_max,
            } => {
                while t >= self.next_switch {
                    self.sign = -self.sign;
                    self.next_switch += self.rng.random_range(dwell_min..=dwell_max);
                }
                self.sign * amplitude
            }
        }
    }
}
