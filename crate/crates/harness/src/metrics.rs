//! Run metrics and acceptance predicates.

use airdata_mhe::fdi::ChannelId;
use airdata_mhe::units::{deg, kts};

use crate::config::Expectations;
use crate::pipeline::{DetectionEvent, SampleRecord};
use crate::sim::{channel_index, TruthTrace};

#[derive(Clone, Debug, PartialEq)]
pub struct RunMetrics {
    pub samples: usize,
    pub aee_alpha_max_deg: f64,
    pub aee_alpha_mean_deg: f64,
    pub aee_vcas_max_kts: f64,
    pub aee_vcas_mean_kts: f64,
    /// Flag time minus fault onset, per channel in `ChannelId::ALL` order.
    pub detection_delay_s: [Option<f64>; 6],
    pub faulty: [bool; 6],
    pub detected: [bool; 6],
    pub false_alarms: usize,
    pub missed: usize,
    pub solver_mean_ms: f64,
    pub solver_max_ms: f64,
    pub degraded_steps: usize,
    pub wx_discarded: bool,
    pub estimation_unreliable: bool,
}

impl RunMetrics {
    pub fn compute(records: &[SampleRecord], events: &[DetectionEvent], trace: &TruthTrace) -> Self {
        let n = records.len().max(1) as f64;
        let ea: Vec<f64> = records
            .iter()
            .map(|r| deg((r.estimate.alpha - r.truth.state.alpha).abs()))
            .collect();
        let ev: Vec<f64> = records.iter().map(|r| kts((r.est_vc - r.truth.vc).abs())).collect();
        let mut onset = [None; 6];
        for (k, act) in trace.fault_active.iter().enumerate() {
            for ch in 0..6 {
                if act[ch] && onset[ch].is_none() {
                    onset[ch] = Some(trace.samples[k].t);
                }
            }
        }
        let mut delay = [None; 6];
        let mut detected = [false; 6];
        let mut false_alarms = 0;
        for e in events {
            let ch = channel_index(e.channel);
            detected[ch] = true;
            if !e.fault_active {
                false_alarms += 1;
            } else if delay[ch].is_none() {
                delay[ch] = onset[ch].map(|t0| e.t - t0);
            }
        }
        let faulty = onset.map(|o| o.is_some());
        let missed = (0..6).filter(|&c| faulty[c] && delay[c].is_none()).count();
        let steps: Vec<f64> = records.iter().skip(1).map(|r| r.solver_ms).collect();
        let m = steps.len().max(1) as f64;
        RunMetrics {
            samples: records.len(),
            aee_alpha_max_deg: ea.iter().copied().fold(0.0, f64::max),
            aee_alpha_mean_deg: ea.iter().sum::<f64>() / n,
            aee_vcas_max_kts: ev.iter().copied().fold(0.0, f64::max),
            aee_vcas_mean_kts: ev.iter().sum::<f64>() / n,
            detection_delay_s: delay,
            faulty,
            detected,
            false_alarms,
            missed,
            solver_mean_ms: steps.iter().sum::<f64>() / m,
            solver_max_ms: steps.iter().copied().fold(0.0, f64::max),
            degraded_steps: records.iter().filter(|r| r.degraded).count(),
            wx_discarded: records.iter().any(|r| r.mask.wx_discard()),
            estimation_unreliable: records.iter().any(|r| r.mask.estimation_unreliable()),
        }
    }

    pub fn max_detection_delay_s(&self) -> Option<f64> {
        self.detection_delay_s.iter().flatten().copied().reduce(f64::max)
    }

    pub fn detected_channels(&self) -> Vec<ChannelId> {
        ChannelId::ALL
            .into_iter()
            .filter(|&c| self.detected[channel_index(c)])
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExpectationOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn upper(out: &mut Vec<ExpectationOutcome>, name: &'static str, limit: Option<f64>, value: f64) {
    if let Some(l) = limit {
        out.push(ExpectationOutcome {
            name,
            passed: value <= l,
            detail: format!("{value:.4} <= {l}"),
        });
    }
}

fn equal<T: PartialEq + std::fmt::Debug>(
    out: &mut Vec<ExpectationOutcome>,
    name: &'static str,
    want: Option<T>,
    got: T,
) {
    if let Some(w) = want {
        out.push(ExpectationOutcome {
            name,
            passed: w == got,
            detail: format!("got {got:?}, want {w:?}"),
        });
    }
}

pub fn evaluate(e: &Expectations, m: &RunMetrics) -> Vec<ExpectationOutcome> {
    let mut out = Vec::new();
    upper(
        &mut out,
        "false_alarms",
        e.max_false_alarms.map(|v| v as f64),
        m.false_alarms as f64,
    );
    upper(&mut out, "missed", e.max_missed.map(|v| v as f64), m.missed as f64);
    if let Some(l) = e.max_detection_delay_s {
        let d = m.max_detection_delay_s();
        out.push(ExpectationOutcome {
            name: "detection_delay",
            passed: d.is_some_and(|d| d <= l),
            detail: match d {
                Some(d) => format!("{d:.3} s <= {l} s"),
                None => "no fault detected".into(),
            },
        });
    }
    upper(
        &mut out,
        "aee_alpha_mean",
        e.max_aee_alpha_mean_deg,
        m.aee_alpha_mean_deg,
    );
    upper(&mut out, "aee_alpha_max", e.max_aee_alpha_max_deg, m.aee_alpha_max_deg);
    upper(&mut out, "aee_vcas_mean", e.max_aee_vcas_mean_kts, m.aee_vcas_mean_kts);
    upper(&mut out, "aee_vcas_max", e.max_aee_vcas_max_kts, m.aee_vcas_max_kts);
    equal(&mut out, "detected", e.detected.clone(), m.detected_channels());
    equal(&mut out, "wx_discarded", e.wx_discarded, m.wx_discarded);
    equal(
        &mut out,
        "estimation_unreliable",
        e.estimation_unreliable,
        m.estimation_unreliable,
    );
    out
}
