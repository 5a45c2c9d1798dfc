use alloc::vec::Vec;

use super::kkt::Deviation;
use super::{assemble_kkt, solve_kkt, BarrierConfig, CostMatrices, KktWork, MheError, QpData};
use crate::smallmat::Vec3;

/// Per-call record of the interior-point loop.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolveReport {
    /// Number of Riccati solves performed.
    pub kkt_solves: usize,
    pub kappas: Vec<f64>,
    pub steps: Vec<f64>,
    /// Equality residual `max |r_p|` seen by each assembly.
    pub kkt_residuals: Vec<f64>,
}

fn strictly_inside(v: &Vec3, lb: &Vec3, ub: &Vec3) -> bool {
    (0..3).all(|j| lb[j] < v[j] && v[j] < ub[j])
}

fn feasible_at(iterate: &Deviation, dir: &Deviation, qp: &QpData, s: f64) -> bool {
    let xs = iterate
        .dx
        .iter()
        .zip(dir.dx.iter())
        .enumerate()
        .all(|(i, (d, p))| strictly_inside(&(*d + p.scale(s)), &qp.dx_lb[i], &qp.dx_ub[i]));
    xs && iterate
        .du
        .iter()
        .zip(dir.du.iter())
        .enumerate()
        .all(|(i, (d, p))| strictly_inside(&(*d + p.scale(s)), &qp.du_lb[i], &qp.du_ub[i]))
}

/// Largest `2^-n`, `n = 0..=ns_max`, keeping every bound strictly satisfied;
/// 0 when even the smallest trial step leaves the box.
pub fn line_search(iterate: &Deviation, dir: &Deviation, qp: &QpData, ns_max: u32) -> f64 {
    let mut s = 1.0;
    for _ in 0..=ns_max {
        if feasible_at(iterate, dir, qp, s) {
            return s;
        }
        s *= 0.5;
    }
    0.0
}

/// Primal barrier interior-point solve of the QP with a fixed iteration budget.
pub fn solve_qp(qp: &QpData, cfg: &BarrierConfig, cost: &CostMatrices) -> Result<(Deviation, SolveReport), MheError> {
    if !qp.is_consistent() {
        return Err(MheError::WindowShape);
    }
    let n = qp.horizon();
    let zero = Vec3::zeros();
    for i in 0..=n {
        if let Some(j) = (0..3).find(|&j| !(qp.dx_lb[i][j] < zero[j] && zero[j] < qp.dx_ub[i][j])) {
            return Err(MheError::InfeasibleInitialization { stage: i, component: j });
        }
        if i < n {
            if let Some(j) = (0..3).find(|&j| !(qp.du_lb[i][j] < 0.0 && 0.0 < qp.du_ub[i][j])) {
                return Err(MheError::InfeasibleInitialization { stage: i, component: j });
            }
        }
    }
    let iters = cfg.iterations();
    let mut report = SolveReport {
        kkt_solves: 0,
        kappas: Vec::with_capacity(iters),
        steps: Vec::with_capacity(iters),
        kkt_residuals: Vec::with_capacity(iters),
    };
    let mut iterate = Deviation::zeros(n);
    let mut work = KktWork::new(n);
    for j in 0..iters {
        let kappa = cfg.kappa_at(j);
        assemble_kkt(qp, &iterate, kappa, cost, &mut work)?;
        let dir = solve_kkt(&mut work, qp)?;
        report.kkt_solves += 1;
        let s = line_search(&iterate, &dir, qp, cfg.ns_max);
        if s > 0.0 {
            iterate.add_scaled(s, &dir);
        }
        report.kappas.push(kappa);
        report.steps.push(s);
        report.kkt_residuals.push(work.primal_residual());
    }
    Ok((iterate, report))
}
