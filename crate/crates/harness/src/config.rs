//! Scenario files.
//!
//! A scenario is a TOML document with the sections `[scenario]`, `[wind]`,
//! `[wind.x]`, `[wind.z]`, `[noise]`, `[fault.<id>]`, `[mhe]`, `[detector]`,
//! `[init]` and `[expect]`. Every physical quantity carries its unit in the
//! key name and unknown keys are rejected.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use airdata_mhe::fdi::{ChannelId, DetectorConfig, Family};
use airdata_mhe::mhe::{BarrierConfig, Bounds, MheConfig, Weights};
use airdata_mhe::smallmat::Vector;
use airdata_mhe::units::{deg, ft_to_m, kts, ms, rad};
use serde::Deserialize;

use crate::error::ConfigError;
use crate::sim::{AxisWind, FaultKind, FaultProfile, Maneuver, Mismatch, NoiseStd, Scenario, WindProfile, WindShape};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum InitMode {
    /// Estimator starts from the true state.
    Truth,
    /// Estimator starts from the wind triangle solved on the first readings.
    #[default]
    Measurements,
}

/// Acceptance predicates checked after a run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Expectations {
    pub max_false_alarms: Option<usize>,
    pub max_missed: Option<usize>,
    pub max_detection_delay_s: Option<f64>,
    pub max_aee_alpha_mean_deg: Option<f64>,
    pub max_aee_alpha_max_deg: Option<f64>,
    pub max_aee_vcas_mean_kts: Option<f64>,
    pub max_aee_vcas_max_kts: Option<f64>,
    /// Exact set of channels that must end up isolated.
    pub detected: Option<Vec<ChannelId>>,
    pub wx_discarded: Option<bool>,
    pub estimation_unreliable: Option<bool>,
}

impl Expectations {
    pub fn is_empty(&self) -> bool {
        *self == Expectations::default()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub sim: Scenario,
    pub mhe: MheConfig,
    pub detector: DetectorConfig,
    pub init: InitMode,
    pub expect: Expectations,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scenario: RawScenario,
    #[serde(default)]
    wind: RawWind,
    #[serde(default)]
    noise: RawNoise,
    #[serde(default)]
    fault: BTreeMap<String, RawFault>,
    #[serde(default)]
    mhe: RawMhe,
    #[serde(default)]
    detector: RawDetector,
    #[serde(default)]
    init: RawInit,
    #[serde(default)]
    expect: RawExpect,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: Option<String>,
    maneuver: String,
    altitude_ft: f64,
    speed_kts: f64,
    duration_s: f64,
    ts_s: Option<f64>,
    seed: u64,
    mismatch_deg_s: Option<f64>,
    mismatch_hz: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWind {
    envelope_kts: Option<f64>,
    x: Option<RawAxis>,
    z: Option<RawAxis>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAxis {
    kind: String,
    level_kts: Option<f64>,
    peak_kts: Option<f64>,
    t_start_s: Option<f64>,
    ramp_s: Option<f64>,
    amplitude_kts: Option<f64>,
    freq_hz: Option<f64>,
    std_kts: Option<f64>,
    tau_s: Option<f64>,
    turbulence_std_kts: Option<f64>,
    turbulence_tau_s: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNoise {
    alpha_deg: Option<f64>,
    vz_ms: Option<f64>,
    vc_kts: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFault {
    kind: String,
    channels: Vec<String>,
    t_on_s: f64,
    t_off_s: Option<f64>,
    bias_deg: Option<f64>,
    bias_kts: Option<f64>,
    amplitude_deg: Option<f64>,
    amplitude_kts: Option<f64>,
    freq_hz: Option<f64>,
    slope_deg_s: Option<f64>,
    slope_kts_s: Option<f64>,
    limit_deg: Option<f64>,
    limit_kts: Option<f64>,
    offset_deg: Option<f64>,
    offset_kts: Option<f64>,
    dwell_min_s: Option<f64>,
    dwell_max_s: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMhe {
    horizon: Option<usize>,
    p_alpha_deg: Option<f64>,
    p_w_kts: Option<f64>,
    q_alpha_deg_s: Option<f64>,
    q_w_kts_s: Option<f64>,
    r_alpha_deg: Option<f64>,
    r_vz_ms: Option<f64>,
    r_vc_kts: Option<f64>,
    kappa_init: Option<f64>,
    kappa_decay: Option<f64>,
    n_kappa: Option<usize>,
    n_qp: Option<usize>,
    ns_max: Option<u32>,
    alpha_min_deg: Option<f64>,
    alpha_max_deg: Option<f64>,
    wind_bound_kts: Option<f64>,
    alpha_rate_bound_deg_s: Option<f64>,
    wind_rate_bound_kts_s: Option<f64>,
    vg_min_ms: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDetector {
    j_alpha_th_deg: Option<f64>,
    j_vc_th_kts: Option<f64>,
    n_d: Option<usize>,
    n_eval: Option<usize>,
    latch: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInit {
    mode: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExpect {
    max_false_alarms: Option<usize>,
    max_missed: Option<usize>,
    max_detection_delay_s: Option<f64>,
    max_aee_alpha_mean_deg: Option<f64>,
    max_aee_alpha_max_deg: Option<f64>,
    max_aee_vcas_mean_kts: Option<f64>,
    max_aee_vcas_max_kts: Option<f64>,
    detected: Option<Vec<String>>,
    wx_discarded: Option<bool>,
    estimation_unreliable: Option<bool>,
}

pub fn parse_channel(s: &str) -> Result<ChannelId, String> {
    let (family, rest) = if let Some(r) = s.strip_prefix("AOA") {
        (Family::Aoa, r)
    } else if let Some(r) = s.strip_prefix("VCAS") {
        (Family::Vcas, r)
    } else {
        return Err(format!("unknown channel `{s}` (expected AOA1..AOA3 or VCAS1..VCAS3)"));
    };
    match rest {
        "1" | "2" | "3" => Ok(ChannelId {
            family,
            index: rest.parse::<usize>().unwrap() - 1,
        }),
        _ => Err(format!("unknown channel `{s}` (expected AOA1..AOA3 or VCAS1..VCAS3)")),
    }
}

fn require(v: Option<f64>, key: &str, ctx: &str) -> Result<f64, String> {
    v.ok_or_else(|| format!("{ctx}: missing `{key}`"))
}

fn reject_extra(present: &[(&str, bool)], allowed: &[&str], ctx: &str) -> Result<(), String> {
    for (key, set) in present {
        if *set && !allowed.contains(key) {
            return Err(format!("{ctx}: key `{key}` does not apply here"));
        }
    }
    Ok(())
}

fn axis(raw: Option<&RawAxis>, name: &str) -> Result<AxisWind, String> {
    let Some(a) = raw else {
        return Ok(AxisWind::calm());
    };
    let ctx = format!("[wind.{name}]");
    let present = [
        ("level_kts", a.level_kts.is_some()),
        ("peak_kts", a.peak_kts.is_some()),
        ("t_start_s", a.t_start_s.is_some()),
        ("ramp_s", a.ramp_s.is_some()),
        ("amplitude_kts", a.amplitude_kts.is_some()),
        ("freq_hz", a.freq_hz.is_some()),
        ("std_kts", a.std_kts.is_some()),
        ("tau_s", a.tau_s.is_some()),
    ];
    let shape = match a.kind.as_str() {
        "constant" => {
            reject_extra(&present, &["level_kts"], &ctx)?;
            WindShape::Constant {
                level: ms(a.level_kts.unwrap_or(0.0)),
            }
        }
        "shear_ramp" => {
            reject_extra(&present, &["peak_kts", "t_start_s", "ramp_s"], &ctx)?;
            let ramp = require(a.ramp_s, "ramp_s", &ctx)?;
            if ramp <= 0.0 {
                return Err(format!("{ctx}: `ramp_s` must be positive"));
            }
            WindShape::ShearRamp {
                peak: ms(require(a.peak_kts, "peak_kts", &ctx)?),
                t_start: require(a.t_start_s, "t_start_s", &ctx)?,
                ramp,
            }
        }
        "gust" => {
            reject_extra(&present, &["amplitude_kts", "freq_hz", "t_start_s"], &ctx)?;
            WindShape::Gust {
                amplitude: ms(require(a.amplitude_kts, "amplitude_kts", &ctx)?),
                freq: require(a.freq_hz, "freq_hz", &ctx)?,
                t_start: a.t_start_s.unwrap_or(0.0),
            }
        }
        "filtered_noise" => {
            reject_extra(&present, &["std_kts", "tau_s"], &ctx)?;
            let tau = require(a.tau_s, "tau_s", &ctx)?;
            if tau <= 0.0 {
                return Err(format!("{ctx}: `tau_s` must be positive"));
            }
            WindShape::FilteredNoise {
                std: ms(require(a.std_kts, "std_kts", &ctx)?),
                tau,
            }
        }
        other => {
            return Err(format!(
                "{ctx}: unknown kind `{other}` (constant, shear_ramp, gust, filtered_noise)"
            ))
        }
    };
    let tau = a.turbulence_tau_s.unwrap_or(2.0);
    if tau <= 0.0 {
        return Err(format!("{ctx}: `turbulence_tau_s` must be positive"));
    }
    Ok(AxisWind {
        shape,
        turbulence_std: ms(a.turbulence_std_kts.unwrap_or(0.0)),
        turbulence_tau: tau,
    })
}

/// Value of a family-specific key, converted to SI.
fn per_family(family: Family, d: Option<f64>, k: Option<f64>, key: &str, ctx: &str) -> Result<Option<f64>, String> {
    match family {
        Family::Aoa if k.is_some() && d.is_none() => Err(format!("{ctx}: AOA channels need `{key}_deg`")),
        Family::Vcas if d.is_some() && k.is_none() => Err(format!("{ctx}: VCAS channels need `{key}_kts`")),
        Family::Aoa => Ok(d.map(rad)),
        Family::Vcas => Ok(k.map(ms)),
    }
}

fn faults(raw: &BTreeMap<String, RawFault>) -> Result<Vec<FaultProfile>, String> {
    let mut out = Vec::new();
    for (id, f) in raw {
        let ctx = format!("[fault.{id}]");
        if f.channels.is_empty() {
            return Err(format!("{ctx}: `channels` is empty"));
        }
        let present = [
            ("bias", f.bias_deg.is_some() || f.bias_kts.is_some()),
            ("amplitude", f.amplitude_deg.is_some() || f.amplitude_kts.is_some()),
            ("freq_hz", f.freq_hz.is_some()),
            ("slope", f.slope_deg_s.is_some() || f.slope_kts_s.is_some()),
            ("limit", f.limit_deg.is_some() || f.limit_kts.is_some()),
            ("offset", f.offset_deg.is_some() || f.offset_kts.is_some()),
            ("dwell_min_s", f.dwell_min_s.is_some()),
            ("dwell_max_s", f.dwell_max_s.is_some()),
        ];
        let allowed: &[&str] = match f.kind.as_str() {
            "bias" => &["bias"],
            "oscillation" => &["amplitude", "freq_hz"],
            "runaway" => &["slope", "limit"],
            "jamming" => &["offset"],
            "nrz" => &["amplitude", "dwell_min_s", "dwell_max_s"],
            other => {
                return Err(format!(
                    "{ctx}: unknown kind `{other}` (bias, oscillation, runaway, jamming, nrz)"
                ))
            }
        };
        reject_extra(&present, allowed, &ctx)?;
        for name in &f.channels {
            let target = parse_channel(name).map_err(|e| format!("{ctx}: {e}"))?;
            let fam = target.family;
            let need = |v: Option<f64>, key: &str| v.ok_or_else(|| format!("{ctx}: missing `{key}` for {name}"));
            let kind = match f.kind.as_str() {
                "bias" => FaultKind::Bias {
                    level: need(per_family(fam, f.bias_deg, f.bias_kts, "bias", &ctx)?, "bias")?,
                },
                "oscillation" => FaultKind::Oscillation {
                    amplitude: need(
                        per_family(fam, f.amplitude_deg, f.amplitude_kts, "amplitude", &ctx)?,
                        "amplitude",
                    )?,
                    freq: need(f.freq_hz, "freq_hz")?,
                },
                "runaway" => FaultKind::Runaway {
                    slope: need(per_family(fam, f.slope_deg_s, f.slope_kts_s, "slope", &ctx)?, "slope")?,
                    limit: need(per_family(fam, f.limit_deg, f.limit_kts, "limit", &ctx)?, "limit")?,
                },
                "jamming" => FaultKind::Jamming {
                    offset: per_family(fam, f.offset_deg, f.offset_kts, "offset", &ctx)?.unwrap_or(0.0),
                },
                _ => FaultKind::Nrz {
                    amplitude: need(
                        per_family(fam, f.amplitude_deg, f.amplitude_kts, "amplitude", &ctx)?,
                        "amplitude",
                    )?,
                    dwell_min: need(f.dwell_min_s, "dwell_min_s")?,
                    dwell_max: need(f.dwell_max_s, "dwell_max_s")?,
                },
            };
            let p = FaultProfile {
                kind,
                target,
                t_on: f.t_on_s,
                t_off: f.t_off_s,
            };
            if !p.is_valid() {
                return Err(format!("{ctx}: invalid parameters for {name}"));
            }
            out.push(p);
        }
    }
    Ok(out)
}

fn mhe_config(raw: &RawMhe, ts: f64) -> Result<MheConfig, String> {
    let d = MheConfig::default();
    let dw = Weights::default();
    let sq = |v: f64| v * v;
    let weights = Weights {
        p_alpha: raw.p_alpha_deg.map(|v| sq(rad(v))).unwrap_or(dw.p_alpha),
        p_w: raw.p_w_kts.map(|v| sq(ms(v))).unwrap_or(dw.p_w),
        q_alpha: raw.q_alpha_deg_s.map(|v| sq(rad(v))).unwrap_or(dw.q_alpha),
        q_w: raw.q_w_kts_s.map(|v| sq(ms(v))).unwrap_or(dw.q_w),
        r_alpha: raw.r_alpha_deg.map(|v| sq(rad(v))).unwrap_or(dw.r_alpha),
        r_vz: raw.r_vz_ms.map(sq).unwrap_or(dw.r_vz),
        r_vc: raw.r_vc_kts.map(|v| sq(ms(v))).unwrap_or(dw.r_vc),
    };
    let db = BarrierConfig::default();
    let barrier = BarrierConfig {
        kappa_init: raw.kappa_init.unwrap_or(db.kappa_init),
        n_kappa: raw.n_kappa.unwrap_or(db.n_kappa),
        n_qp: raw.n_qp.unwrap_or(db.n_qp),
        ns_max: raw.ns_max.unwrap_or(db.ns_max),
        kappa_decay: raw.kappa_decay.unwrap_or(db.kappa_decay),
    };
    let b = d.bounds;
    let w = raw.wind_bound_kts.map(ms);
    let wr = raw.wind_rate_bound_kts_s.map(ms);
    let ar = raw.alpha_rate_bound_deg_s.map(rad);
    let bounds = Bounds {
        x_lb: Vector([
            raw.alpha_min_deg.map(rad).unwrap_or(b.x_lb[0]),
            w.map(|v| -v).unwrap_or(b.x_lb[1]),
            w.map(|v| -v).unwrap_or(b.x_lb[2]),
        ]),
        x_ub: Vector([
            raw.alpha_max_deg.map(rad).unwrap_or(b.x_ub[0]),
            w.unwrap_or(b.x_ub[1]),
            w.unwrap_or(b.x_ub[2]),
        ]),
        u_lb: Vector([
            ar.map(|v| -v).unwrap_or(b.u_lb[0]),
            wr.map(|v| -v).unwrap_or(b.u_lb[1]),
            wr.map(|v| -v).unwrap_or(b.u_lb[2]),
        ]),
        u_ub: Vector([
            ar.unwrap_or(b.u_ub[0]),
            wr.unwrap_or(b.u_ub[1]),
            wr.unwrap_or(b.u_ub[2]),
        ]),
    };
    let cfg = MheConfig {
        ts,
        horizon: raw.horizon.unwrap_or(d.horizon),
        vg_min: raw.vg_min_ms.unwrap_or(d.vg_min),
        bounds,
        barrier,
        weights,
    };
    if !cfg.is_valid() {
        return Err(
            "[mhe]: weights must be positive, bounds ordered around zero, horizon and iteration counts at least 1"
                .into(),
        );
    }
    Ok(cfg)
}

fn detector(raw: &RawDetector) -> Result<DetectorConfig, String> {
    let d = DetectorConfig::default();
    let cfg = DetectorConfig {
        j_alpha_th: raw.j_alpha_th_deg.map(rad).unwrap_or(d.j_alpha_th),
        j_vc_th: raw.j_vc_th_kts.map(ms).unwrap_or(d.j_vc_th),
        n_d: raw.n_d.unwrap_or(d.n_d),
        n_eval: raw.n_eval.unwrap_or(d.n_eval),
        latch: raw.latch.unwrap_or(d.latch),
    };
    if !cfg.is_valid() {
        return Err("[detector]: thresholds must be positive and 1 <= n_d <= n_eval".into());
    }
    Ok(cfg)
}

fn expectations(raw: &RawExpect) -> Result<Expectations, String> {
    let detected = match &raw.detected {
        None => None,
        Some(list) => {
            let mut ids = list
                .iter()
                .map(|s| parse_channel(s))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| format!("[expect]: {e}"))?;
            ids.sort();
            ids.dedup();
            Some(ids)
        }
    };
    Ok(Expectations {
        max_false_alarms: raw.max_false_alarms,
        max_missed: raw.max_missed,
        max_detection_delay_s: raw.max_detection_delay_s,
        max_aee_alpha_mean_deg: raw.max_aee_alpha_mean_deg,
        max_aee_alpha_max_deg: raw.max_aee_alpha_max_deg,
        max_aee_vcas_mean_kts: raw.max_aee_vcas_mean_kts,
        max_aee_vcas_max_kts: raw.max_aee_vcas_max_kts,
        detected,
        wx_discarded: raw.wx_discarded,
        estimation_unreliable: raw.estimation_unreliable,
    })
}

fn build(raw: RawConfig, fallback_name: &str) -> Result<ScenarioConfig, String> {
    let s = &raw.scenario;
    let maneuver = Maneuver::from_str(&s.maneuver).map_err(|e| format!("[scenario]: {e}"))?;
    let ts = s.ts_s.unwrap_or(0.04);
    if !(ts > 0.0) || !(s.duration_s > 0.0) {
        return Err("[scenario]: `ts_s` and `duration_s` must be positive".into());
    }
    if !(s.speed_kts > 0.0) {
        return Err("[scenario]: `speed_kts` must be positive".into());
    }
    let noise = NoiseStd {
        alpha: rad(raw.noise.alpha_deg.unwrap_or(0.057)),
        vz: raw.noise.vz_ms.unwrap_or(0.3),
        vc: ms(raw.noise.vc_kts.unwrap_or(0.5)),
    };
    if !(noise.alpha >= 0.0 && noise.vz >= 0.0 && noise.vc >= 0.0) {
        return Err("[noise]: standard deviations must be non-negative".into());
    }
    let wind = WindProfile {
        x: axis(raw.wind.x.as_ref(), "x")?,
        z: axis(raw.wind.z.as_ref(), "z")?,
        envelope: ms(raw.wind.envelope_kts.unwrap_or(120.0)),
    };
    let init = match raw.init.mode.as_deref() {
        None | Some("measurements") => InitMode::Measurements,
        Some("truth") => InitMode::Truth,
        Some(other) => return Err(format!("[init]: unknown mode `{other}` (truth, measurements)")),
    };
    let sim = Scenario {
        name: s.name.clone().unwrap_or_else(|| fallback_name.to_string()),
        maneuver,
        altitude: ft_to_m(s.altitude_ft),
        cas: ms(s.speed_kts),
        duration: s.duration_s,
        ts,
        seed: s.seed,
        mismatch: Mismatch {
            amplitude: rad(s.mismatch_deg_s.unwrap_or(0.0)),
            freq: s.mismatch_hz.unwrap_or(0.1),
        },
        wind,
        noise,
        faults: faults(&raw.fault)?,
    };
    sim.sample_count().map_err(|e| format!("[scenario]: {e}"))?;
    Ok(ScenarioConfig {
        mhe: mhe_config(&raw.mhe, ts)?,
        detector: detector(&raw.detector)?,
        init,
        expect: expectations(&raw.expect)?,
        sim,
    })
}

/// Parses scenario text; `path` is only used for messages and the default name.
pub fn parse_config(text: &str, path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse {
        path: path.to_path_buf(),
        source: Box::new(e),
    })?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario");
    build(raw, stem).map_err(|message| ConfigError::Invalid {
        path: path.to_path_buf(),
        message,
    })
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text, path)
}

/// Scenario files of a directory in file-name order.
pub fn scenario_files(dir: &Path) -> Result<Vec<PathBuf>, ConfigError> {
    let read = |source| ConfigError::Read {
        path: dir.to_path_buf(),
        source,
    };
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(read)? {
        let path = entry.map_err(read)?.path();
        if path.extension().is_some_and(|e| e == "toml") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Converts to display units: degrees for AOA channels, knots for VCAS.
pub fn display_value(family: Family, v: f64) -> f64 {
    match family {
        Family::Aoa => deg(v),
        Family::Vcas => kts(v),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[scenario]
maneuver = "level"
altitude_ft = 5000
speed_kts = 200
duration_s = 10
seed = 1
"#;

    fn parse(text: &str) -> Result<ScenarioConfig, ConfigError> {
        parse_config(text, Path::new("t.toml"))
    }

    #[test]
    fn minimal_uses_defaults() {
        let c = parse(MINIMAL).unwrap();
        assert_eq!(c.sim.name, "t");
        assert_eq!(c.sim.ts, 0.04);
        assert_eq!(c.mhe, MheConfig::default());
        assert_eq!(c.detector, DetectorConfig::default());
        assert_eq!(c.init, InitMode::Measurements);
        assert!(c.sim.faults.is_empty());
        assert!((c.sim.altitude - 1524.0).abs() < 1e-9);
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = parse(&format!("{MINIMAL}colour = 3\n")).unwrap_err();
        assert!(matches!(err, ConfigError::Parse { .. }));
        let err = parse(&format!("{MINIMAL}[noise]\nalpha_rad = 0.1\n")).unwrap_err();
        assert!(err.to_string().contains("alpha_rad"), "{err}");
        let err = parse(&format!("{MINIMAL}[wind.x]\nkind = \"constant\"\npeak_kts = 3\n")).unwrap_err();
        assert!(err.to_string().contains("does not apply"), "{err}");
    }

    #[test]
    fn faults_expand_per_channel_with_units() {
        let text = format!(
            "{MINIMAL}[fault.1]\nkind = \"bias\"\nchannels = [\"AOA1\", \"VCAS2\"]\nt_on_s = 5\nbias_deg = 4.6\nbias_kts = 24\n"
        );
        let c = parse(&text).unwrap();
        assert_eq!(c.sim.faults.len(), 2);
        assert_eq!(c.sim.faults[0].kind, FaultKind::Bias { level: rad(4.6) });
        assert_eq!(c.sim.faults[1].target, ChannelId::vcas(1));
        assert_eq!(c.sim.faults[1].kind, FaultKind::Bias { level: ms(24.0) });
        let missing =
            format!("{MINIMAL}[fault.1]\nkind = \"bias\"\nchannels = [\"VCAS1\"]\nt_on_s = 5\nbias_deg = 4.6\n");
        assert!(parse(&missing).is_err());
        let bad = format!("{MINIMAL}[fault.1]\nkind = \"bias\"\nchannels = [\"PITOT1\"]\nt_on_s = 5\nbias_kts = 4\n");
        assert!(parse(&bad).unwrap_err().to_string().contains("PITOT1"));
    }

    #[test]
    fn sample_count_must_be_integral() {
        let text = MINIMAL.replace("duration_s = 10", "duration_s = 10.01");
        assert!(parse(&text).unwrap_err().to_string().contains("whole number"));
    }

    #[test]
    fn channel_names() {
        assert_eq!(parse_channel("AOA3"), Ok(ChannelId::aoa(2)));
        assert_eq!(parse_channel("VCAS1"), Ok(ChannelId::vcas(0)));
        assert!(parse_channel("VCAS4").is_err());
        assert!(parse_channel("aoa1").is_err());
    }
}
