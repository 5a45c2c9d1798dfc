//! Residual-based fault detection, isolation and weighted sensor fusion for
//! the triplex AOA and VCAS channels.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::airmodel::{OutputMask, OutputVec};
use crate::smallmat::{Vec3, Vector};
use crate::units::{ms, rad};

/// Lower bound applied to RMS values before inverting them.
pub const EPS_J: f64 = 1e-6;

pub const CHANNELS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Aoa,
    Vcas,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChannelId {
    pub family: Family,
    /// Zero-based channel index.
    pub index: usize,
}

impl ChannelId {
    pub const ALL: [ChannelId; 6] = [
        ChannelId {
            family: Family::Aoa,
            index: 0,
        },
        ChannelId {
            family: Family::Aoa,
            index: 1,
        },
        ChannelId {
            family: Family::Aoa,
            index: 2,
        },
        ChannelId {
            family: Family::Vcas,
            index: 0,
        },
        ChannelId {
            family: Family::Vcas,
            index: 1,
        },
        ChannelId {
            family: Family::Vcas,
            index: 2,
        },
    ];

    pub fn aoa(index: usize) -> Self {
        ChannelId {
            family: Family::Aoa,
            index,
        }
    }

    pub fn vcas(index: usize) -> Self {
        ChannelId {
            family: Family::Vcas,
            index,
        }
    }
}

impl fmt::Display for ChannelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.family {
            Family::Aoa => "AOA",
            Family::Vcas => "VCAS",
        };
        write!(f, "{}{}", name, self.index + 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectorConfig {
    /// AOA RMS threshold (rad).
    pub j_alpha_th: f64,
    /// VCAS RMS threshold (m/s).
    pub j_vc_th: f64,
    /// Exceedances within the window needed to declare a fault.
    pub n_d: usize,
    /// Residual window length.
    pub n_eval: usize,
    /// Keep a detected channel excluded for good.
    pub latch: bool,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            j_alpha_th: rad(2.3),
            j_vc_th: ms(12.0),
            n_d: 5,
            n_eval: 10,
            latch: true,
        }
    }
}

impl DetectorConfig {
    pub fn is_valid(&self) -> bool {
        self.j_alpha_th > 0.0 && self.j_vc_th > 0.0 && self.n_d >= 1 && self.n_d <= self.n_eval
    }

    pub fn threshold(&self, family: Family) -> f64 {
        match family {
            Family::Aoa => self.j_alpha_th,
            Family::Vcas => self.j_vc_th,
        }
    }
}

/// Fixed-length ring buffer that reports how many slots are populated.
#[derive(Clone, Debug, PartialEq)]
struct Ring<T> {
    data: Vec<T>,
    head: usize,
    len: usize,
}

impl<T: Copy + Default> Ring<T> {
    fn new(cap: usize) -> Self {
        Ring {
            data: vec![T::default(); cap],
            head: 0,
            len: 0,
        }
    }

    /// Pushes `v` and returns the evicted value, if any.
    fn push(&mut self, v: T) -> Option<T> {
        let cap = self.data.len();
        let old = if self.len == cap {
            Some(self.data[self.head])
        } else {
            None
        };
        self.data[self.head] = v;
        self.head = (self.head + 1) % cap;
        self.len = (self.len + 1).min(cap);
        old
    }

    fn is_full(&self) -> bool {
        self.len == self.data.len()
    }

    fn iter(&self) -> impl Iterator<Item = &T> {
        let cap = self.data.len();
        let start = (self.head + cap - self.len) % cap;
        (0..self.len).map(move |k| &self.data[(start + k) % cap])
    }
}

/// Detection state of one redundant sensor.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    residuals: Ring<f64>,
    exceedances: Ring<bool>,
    count: usize,
    rms: f64,
    faulty: bool,
}

impl Channel {
    fn new(n_eval: usize) -> Self {
        Channel {
            residuals: Ring::new(n_eval),
            exceedances: Ring::new(n_eval),
            count: 0,
            rms: 0.0,
            faulty: false,
        }
    }

    fn push_residual(&mut self, r: f64) {
        self.residuals.push(r);
        let ss: f64 = self.residuals.iter().map(|v| v * v).sum();
        self.rms = libm::sqrt(ss / self.residuals.len as f64);
    }

    /// Current RMS of the buffered residuals.
    pub fn rms(&self) -> f64 {
        self.rms
    }

    pub fn is_faulty(&self) -> bool {
        self.faulty
    }

    /// Threshold exceedances within the trailing window.
    pub fn exceedance_count(&self) -> usize {
        self.count
    }

    pub fn residuals(&self) -> impl Iterator<Item = &f64> {
        self.residuals.iter()
    }
}

/// Raw readings of all air data sensors at one sample.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RawMeasurement {
    /// AOA readings (rad).
    pub aoa: [f64; CHANNELS],
    /// Vertical speed (m/s), single channel.
    pub vz: f64,
    /// VCAS readings (m/s).
    pub vcas: [f64; CHANNELS],
}

/// A channel newly declared faulty.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdiEvent {
    pub channel: ChannelId,
    /// Sample count at detection, starting at 1 for the first residual.
    pub sample: u64,
    pub rms: f64,
}

/// Base (per-sensor) measurement variances.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SensorVariances {
    pub alpha: f64,
    pub vz: f64,
    pub vc: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FusedMeasurement {
    pub alpha_m: f64,
    pub vz_m: f64,
    pub vc_m: f64,
    pub beta_alpha: [f64; CHANNELS],
    pub beta_vc: [f64; CHANNELS],
    pub r_alpha_eff: f64,
    pub r_vz: f64,
    pub r_vc_eff: f64,
    pub aoa_available: bool,
    pub vcas_available: bool,
}

impl FusedMeasurement {
    pub fn output(&self) -> OutputVec {
        OutputVec {
            alpha: self.alpha_m,
            vz: self.vz_m,
            vc: self.vc_m,
        }
    }

    /// Diagonal of the effective measurement covariance.
    pub fn variances(&self) -> Vec3 {
        Vector([self.r_alpha_eff, self.r_vz, self.r_vc_eff])
    }
}

/// Sensor availability as seen by the estimator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SensorMask {
    AllAvailable,
    AoaLost,
    VcasLost,
    BothLost,
}

impl SensorMask {
    pub fn from_flags(aoa_lost: bool, vcas_lost: bool) -> Self {
        match (aoa_lost, vcas_lost) {
            (false, false) => SensorMask::AllAvailable,
            (true, false) => SensorMask::AoaLost,
            (false, true) => SensorMask::VcasLost,
            (true, true) => SensorMask::BothLost,
        }
    }

    pub fn output_mask(self) -> OutputMask {
        OutputMask {
            aoa_lost: matches!(self, SensorMask::AoaLost | SensorMask::BothLost),
            vcas_lost: matches!(self, SensorMask::VcasLost | SensorMask::BothLost),
        }
    }

    /// The horizontal wind estimate carries no information.
    pub fn wx_discard(self) -> bool {
        self.output_mask().vcas_lost
    }

    /// Without any AOA sensor none of the states is observable.
    pub fn estimation_unreliable(self) -> bool {
        self.output_mask().aoa_lost
    }
}

/// Normalized `1/J²` weights over the healthy channels, zero elsewhere.
///
/// `None` when no channel is healthy.
pub fn fusion_weights(j: &[f64; CHANNELS], healthy: &[bool; CHANNELS]) -> Option<[f64; CHANNELS]> {
    let mut w = [0.0; CHANNELS];
    let mut total = 0.0;
    for i in 0..CHANNELS {
        if healthy[i] {
            let jf = j[i].max(EPS_J);
            w[i] = 1.0 / (jf * jf);
            total += w[i];
        }
    }
    if total == 0.0 {
        return None;
    }
    for v in w.iter_mut() {
        *v /= total;
    }
    Some(w)
}

/// `Σ βᵢ² · r_base`.
pub fn effective_variance(beta: &[f64; CHANNELS], r_base: f64) -> f64 {
    beta.iter().map(|b| b * b).sum::<f64>() * r_base
}

/// Residual buffers and health flags of the six redundant channels.
#[derive(Clone, Debug, PartialEq)]
pub struct SensorBank {
    cfg: DetectorConfig,
    aoa: [Channel; CHANNELS],
    vcas: [Channel; CHANNELS],
    samples: u64,
}

impl SensorBank {
    pub fn new(cfg: DetectorConfig) -> Self {
        let n = cfg.n_eval.max(1);
        SensorBank {
            cfg,
            aoa: core::array::from_fn(|_| Channel::new(n)),
            vcas: core::array::from_fn(|_| Channel::new(n)),
            samples: 0,
        }
    }

    pub fn config(&self) -> &DetectorConfig {
        &self.cfg
    }

    /// Number of residual updates so far.
    pub fn samples(&self) -> u64 {
        self.samples
    }

    pub fn channel(&self, id: ChannelId) -> &Channel {
        match id.family {
            Family::Aoa => &self.aoa[id.index],
            Family::Vcas => &self.vcas[id.index],
        }
    }

    fn family(&self, family: Family) -> &[Channel; CHANNELS] {
        match family {
            Family::Aoa => &self.aoa,
            Family::Vcas => &self.vcas,
        }
    }

    pub fn rms(&self, family: Family) -> [f64; CHANNELS] {
        core::array::from_fn(|i| self.family(family)[i].rms)
    }

    pub fn healthy(&self, family: Family) -> [bool; CHANNELS] {
        core::array::from_fn(|i| !self.family(family)[i].faulty)
    }

    /// Pushes `measurement - prediction` for every redundant channel.
    pub fn update_residuals(&mut self, meas: &RawMeasurement, pred: &OutputVec) {
        for (ch, m) in self.aoa.iter_mut().zip(meas.aoa.iter()) {
            ch.push_residual(m - pred.alpha);
        }
        for (ch, m) in self.vcas.iter_mut().zip(meas.vcas.iter()) {
            ch.push_residual(m - pred.vc);
        }
        self.samples += 1;
    }

    /// Records threshold exceedances and flags channels reaching `n_d` of
    /// them within the trailing window. Inhibited until the residual
    /// buffers are full. Returns the channels flagged by this call.
    pub fn detect(&mut self) -> Vec<FdiEvent> {
        let mut events = Vec::new();
        let cfg = self.cfg;
        let sample = self.samples;
        for id in ChannelId::ALL {
            let th = cfg.threshold(id.family);
            let ch = match id.family {
                Family::Aoa => &mut self.aoa[id.index],
                Family::Vcas => &mut self.vcas[id.index],
            };
            if !ch.residuals.is_full() {
                continue;
            }
            let exceeded = ch.rms > th;
            if let Some(true) = ch.exceedances.push(exceeded) {
                ch.count -= 1;
            }
            if exceeded {
                ch.count += 1;
            }
            let fault_now = ch.count >= cfg.n_d;
            if fault_now && !ch.faulty {
                ch.faulty = true;
                events.push(FdiEvent {
                    channel: id,
                    sample,
                    rms: ch.rms,
                });
            } else if !fault_now && ch.faulty && !cfg.latch {
                ch.faulty = false;
            }
        }
        events
    }

    /// Weighted fusion of the healthy channels.
    ///
    /// A family without healthy channels reports `fallback` (normally the
    /// model prediction) and is flagged unavailable.
    pub fn fuse(&self, meas: &RawMeasurement, base: &SensorVariances, fallback: &OutputVec) -> FusedMeasurement {
        let fam = |family: Family, readings: &[f64; CHANNELS], r: f64, fb: f64| match fusion_weights(
            &self.rms(family),
            &self.healthy(family),
        ) {
            Some(beta) => {
                let v = beta.iter().zip(readings.iter()).map(|(b, m)| b * m).sum();
                (v, beta, effective_variance(&beta, r), true)
            }
            None => (fb, [0.0; CHANNELS], r, false),
        };
        let (alpha_m, beta_alpha, r_alpha_eff, aoa_available) = fam(Family::Aoa, &meas.aoa, base.alpha, fallback.alpha);
        let (vc_m, beta_vc, r_vc_eff, vcas_available) = fam(Family::Vcas, &meas.vcas, base.vc, fallback.vc);
        FusedMeasurement {
            alpha_m,
            vz_m: meas.vz,
            vc_m,
            beta_alpha,
            beta_vc,
            r_alpha_eff,
            r_vz: base.vz,
            r_vc_eff,
            aoa_available,
            vcas_available,
        }
    }

    pub fn sensor_mask(&self) -> SensorMask {
        let lost = |f: Family| self.healthy(f).iter().all(|h| !h);
        SensorMask::from_flags(lost(Family::Aoa), lost(Family::Vcas))
    }
}
