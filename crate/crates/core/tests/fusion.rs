use airdata_mhe::airmodel::OutputVec;
use airdata_mhe::fdi::{effective_variance, fusion_weights, DetectorConfig, RawMeasurement, SensorBank};
use airdata_mhe::units::{ms, rad};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Invariants of one weight computation; returns a description of the first
/// violation.
fn check_weights(j: [f64; 3], healthy: [bool; 3], r: f64) -> Result<(), String> {
    let n_healthy = healthy.iter().filter(|h| **h).count();
    let Some(w) = fusion_weights(&j, &healthy) else {
        return if n_healthy == 0 {
            Ok(())
        } else {
            Err("no weights with healthy channels".into())
        };
    };
    let sum: f64 = w.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(format!("weights sum to {sum}"));
    }
    for i in 0..3 {
        if !healthy[i] && w[i] != 0.0 {
            return Err(format!("faulty channel {i} weighted {}", w[i]));
        }
        for k in 0..3 {
            if healthy[i] && healthy[k] && j[i] < j[k] && w[i] <= w[k] {
                return Err(format!("J {j:?} gave non-monotone weights {w:?}"));
            }
        }
    }
    let reff = effective_variance(&w, r);
    if reff > r * (1.0 + 1e-12) {
        return Err(format!("R_eff {reff} above base {r}"));
    }
    let equal = (reff - r).abs() <= 1e-12 * r;
    if equal != (n_healthy == 1) {
        return Err(format!("R_eff {reff} vs base {r} with {n_healthy} healthy channels"));
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn fusion_weight_properties(
        j in prop::array::uniform3(1e-4..10.0f64),
        healthy in prop::array::uniform3(any::<bool>()),
        r in 1e-8..10.0f64,
    ) {
        prop_assert_eq!(check_weights(j, healthy, r), Ok(()));
    }
}

#[test]
fn gaussian_residuals_never_trip_the_detector() {
    let cfg = DetectorConfig::default();
    let mut bank = SensorBank::new(cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    // prediction error on top of sensor noise, well above the default noise levels
    let aoa = Normal::new(0.0, rad(0.3)).unwrap();
    let vc = Normal::new(0.0, ms(2.0)).unwrap();
    let pred = OutputVec::default();
    let mut events = 0;
    for _ in 0..200_000 {
        let meas = RawMeasurement {
            aoa: [aoa.sample(&mut rng), aoa.sample(&mut rng), aoa.sample(&mut rng)],
            vz: 0.0,
            vcas: [vc.sample(&mut rng), vc.sample(&mut rng), vc.sample(&mut rng)],
        };
        bank.update_residuals(&meas, &pred);
        events += bank.detect().len();
    }
    assert_eq!(events, 0);
}
