//! Per-axis wind profiles.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::trajectory::smooth_step;

#[derive(Clone, Debug, PartialEq)]
pub enum WindShape {
    Constant {
        level: f64,
    },
    /// Smooth ramp from 0 to `peak` starting at `t_start`, then held.
    ShearRamp {
        peak: f64,
        t_start: f64,
        ramp: f64,
    },
    /// `amplitude * (1 - cos(2π f (t - t_start))) / 2` after `t_start`.
    Gust {
        amplitude: f64,
        freq: f64,
        t_start: f64,
    },
    /// Second-order low-pass filtered white noise with the given standard deviation.
    FilteredNoise {
        std: f64,
        tau: f64,
    },
}

/// Wind along one axis: a deterministic shape plus optional turbulence.
#[derive(Clone, Debug, PartialEq)]
pub struct AxisWind {
    pub shape: WindShape,
    /// Turbulence standard deviation (m/s); 0 disables it.
    pub turbulence_std: f64,
    pub turbulence_tau: f64,
}

impl AxisWind {
    pub fn calm() -> Self {
        AxisWind {
            shape: WindShape::Constant { level: 0.0 },
            turbulence_std: 0.0,
            turbulence_tau: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WindProfile {
    pub x: AxisWind,
    pub z: AxisWind,
    /// Declared peak |W| on either axis (m/s).
    pub envelope: f64,
}

impl WindProfile {
    pub fn calm(envelope: f64) -> Self {
        WindProfile {
            x: AxisWind::calm(),
            z: AxisWind::calm(),
            envelope,
        }
    }
}

/// Noise samples on a uniform grid, linearly interpolated.
#[derive(Clone, Debug, PartialEq)]
struct Sampled {
    dt: f64,
    values: Vec<f64>,
}

impl Sampled {
    fn eval(&self, t: f64) -> (f64, f64) {
        let n = self.values.len();
        if n == 0 {
            return (0.0, 0.0);
        }
        let pos = (t / self.dt).max(0.0);
        let i = (pos.floor() as usize).min(n - 2);
        let frac = (pos - i as f64).min(1.0);
        let slope = (self.values[i + 1] - self.values[i]) / self.dt;
        (self.values[i] + frac * (self.values[i + 1] - self.values[i]), slope)
    }
}

fn filtered_noise(std: f64, tau: f64, dt: f64, n: usize, rng: &mut ChaCha8Rng) -> Sampled {
    let a = (-dt / tau).exp();
    let b = (1.0 - a * a).sqrt();
    let mut x: f64 = rng.sample(StandardNormal);
    let mut y = x;
    let mut raw = Vec::with_capacity(n);
    for _ in 0..n {
        raw.push(y);
        let w: f64 = rng.sample(StandardNormal);
        y = a * y + (1.0 - a) * x;
        x = a * x + b * w;
    }
    let mean = raw.iter().sum::<f64>() / n as f64;
    let var = raw.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
    let scale = if var > 0.0 { std / var.sqrt() } else { 0.0 };
    Sampled {
        dt,
        values: raw.iter().map(|v| (v - mean) * scale).collect(),
    }
}

/// Wind along one axis, realized for a given duration and seed.
#[derive(Clone, Debug, PartialEq)]
pub struct AxisRealization {
    shape: WindShape,
    noise: Option<Sampled>,
    turbulence: Option<Sampled>,
}

impl AxisRealization {
    pub fn new(axis: &AxisWind, duration: f64, dt: f64, rng: &mut ChaCha8Rng) -> Self {
        let n = (duration / dt).ceil() as usize + 2;
        let noise = match axis.shape {
            WindShape::FilteredNoise { std, tau } => Some(filtered_noise(std, tau, dt, n, rng)),
            _ => None,
        };
        let turbulence =
            (axis.turbulence_std > 0.0).then(|| filtered_noise(axis.turbulence_std, axis.turbulence_tau, dt, n, rng));
        AxisRealization {
            shape: axis.shape.clone(),
            noise,
            turbulence,
        }
    }

    /// Wind and its rate at `t`.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let (mut w, mut dw) = match self.shape {
            WindShape::Constant { level } => (level, 0.0),
            WindShape::ShearRamp { peak, t_start, ramp } => {
                let (s, ds) = smooth_step(t, t_start, ramp);
                (peak * s, peak * ds)
            }
            WindShape::Gust {
                amplitude,
                freq,
                t_start,
            } => {
                if t <= t_start {
                    (0.0, 0.0)
                } else {
                    let ph = 2.0 * PI * freq * (t - t_start);
                    (0.5 * amplitude * (1.0 - ph.cos()), PI * freq * amplitude * ph.sin())
                }
            }
            WindShape::FilteredNoise { .. } => (0.0, 0.0),
        };
        for s in self.noise.iter().chain(self.turbulence.iter()) {
            let (v, r) = s.eval(t);
            w += v;
            dw += r;
        }
        (w, dw)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ramp = AxisWind {
            shape: WindShape::ShearRamp {
                peak: 10.0,
                t_start: 5.0,
                ramp: 2.0,
            },
            ..AxisWind::calm()
        };
        let r = AxisRealization::new(&ramp, 20.0, 0.004, &mut rng);
        assert_eq!(r.eval(4.0), (0.0, 0.0));
        assert!((r.eval(6.0).0 - 5.0).abs() < 1e-12);
        assert_eq!(r.eval(10.0).0, 10.0);
        let gust = AxisWind {
            shape: WindShape::Gust {
                amplitude: 4.0,
                freq: 0.5,
                t_start: 0.0,
            },
            ..AxisWind::calm()
        };
        let r = AxisRealization::new(&gust, 20.0, 0.004, &mut rng);
        assert!((r.eval(1.0).0 - 4.0).abs() < 1e-12);
    }

    #[test]
    fn filtered_noise_has_requested_spread() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = filtered_noise(3.0, 2.0, 0.004, 50_000, &mut rng);
        let var = s.values.iter().map(|v| v * v).sum::<f64>() / s.values.len() as f64;
        assert!((var.sqrt() - 3.0).abs() < 1e-9);
        let max_step = s.values.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
        assert!(max_step / 0.004 < 30.0, "rate {}", max_step / 0.004);
    }
}
