mod support;

use airdata_mhe::mhe::{solve_qp, BarrierConfig, Deviation};
use airdata_mhe::smallmat::Vector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn loose_bounds_reduce_to_gauss_newton_step() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let cfg = BarrierConfig {
        kappa_init: 1e-8,
        ..BarrierConfig::default()
    };
    let mut worst = 0.0_f64;
    for k in 0..300 {
        let n = 1 + k % 3;
        let mut inst = support::random_instance(&mut rng, n);
        for v in inst.qp.dx_lb.iter_mut().chain(inst.qp.du_lb.iter_mut()) {
            *v = Vector([-1e6; 3]);
        }
        for v in inst.qp.dx_ub.iter_mut().chain(inst.qp.du_ub.iter_mut()) {
            *v = Vector([1e6; 3]);
        }
        let (got, rep) = solve_qp(&inst.qp, &cfg, &inst.cost).unwrap();
        assert_eq!(rep.kkt_solves, 4);
        let want = support::dense_newton_step(&inst.qp, &inst.cost, &Deviation::zeros(n), 0.0);
        worst = worst.max(support::rel_error(&got, &want));
    }
    assert!(worst <= 1e-6, "worst relative error {worst:e}");
}

#[test]
fn iterates_stay_strictly_feasible_with_fixed_solve_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let cfg = BarrierConfig::default();
    for k in 0..500 {
        let n = 1 + k % 3;
        let mut inst = support::random_instance(&mut rng, n);
        // tight boxes so the constraints are active
        for v in inst.qp.r_y.iter_mut() {
            *v = v.scale(20.0);
        }
        let (dev, rep) = solve_qp(&inst.qp, &cfg, &inst.cost).unwrap();
        assert_eq!(rep.kkt_solves, cfg.iterations());
        assert_eq!(rep.kkt_solves, 4);
        for i in 0..=n {
            for j in 0..3 {
                assert!(inst.qp.dx_lb[i][j] < dev.dx[i][j] && dev.dx[i][j] < inst.qp.dx_ub[i][j]);
            }
        }
        for i in 0..n {
            for j in 0..3 {
                assert!(inst.qp.du_lb[i][j] < dev.du[i][j] && dev.du[i][j] < inst.qp.du_ub[i][j]);
            }
        }
    }
}
