use alloc::vec;
use alloc::vec::Vec;

use super::{barrier_terms, CostMatrices, MheError, QpData};
use crate::smallmat::{inv3, inv6_block, sym_sandwich, symmetrize_upper, Mat3, Mat36, Mat6, Mat63, Vec3, Vec6, Vector};

/// Per-stage state and input deviations (also used for search directions).
#[derive(Clone, Debug, PartialEq)]
pub struct Deviation {
    pub dx: Vec<Vec3>,
    pub du: Vec<Vec3>,
}

impl Deviation {
    pub fn zeros(horizon: usize) -> Self {
        Deviation {
            dx: vec![Vector::zeros(); horizon + 1],
            du: vec![Vector::zeros(); horizon],
        }
    }

    pub fn horizon(&self) -> usize {
        self.du.len()
    }

    /// `self += s * dir`.
    pub fn add_scaled(&mut self, s: f64, dir: &Deviation) {
        for (a, b) in self.dx.iter_mut().zip(dir.dx.iter()) {
            *a += b.scale(s);
        }
        for (a, b) in self.du.iter_mut().zip(dir.du.iter()) {
            *a += b.scale(s);
        }
    }

    pub fn norm_inf(&self) -> f64 {
        self.dx
            .iter()
            .chain(self.du.iter())
            .fold(0.0_f64, |m, v| m.max(v.norm_inf()))
    }
}

/// Quantities of the linearized barrier KKT system plus the Riccati buffers
/// filled by [`solve_kkt`].
///
/// The Newton direction solves the equality-constrained least-squares problem
///
/// ```text
/// min ½|r̄_x - d²x_0|²_{P⁻¹} + ½ Σ |Q̄_i r̄_u,i - d²u_i|²_{Q̄_i⁻¹} + ½ Σ |r̄_y,i - C̄_i d²x_i|²_{R̄_i⁻¹}
/// s.t. d²x_{i+1} = -r_p,i + A_i d²x_i + B d²u_i
/// ```
///
/// where `r̄_u,i = Q⁻¹(r_u,i - du_i) - κ g_u,i` is the negative input gradient.
#[derive(Clone, Debug, PartialEq)]
pub struct KktWork {
    pub kappa: f64,
    pub p: Mat3,
    pub g_u: Vec<Vec3>,
    pub g_x: Vec<Vec3>,
    pub l_u: Vec<Vec3>,
    pub l_x: Vec<Vec3>,
    pub r_p: Vec<Vec3>,
    pub rbar_x: Vec3,
    pub rbar_u: Vec<Vec3>,
    /// `Q̄_i r̄_u,i`, the input target of the least-squares form.
    pub u_target: Vec<Vec3>,
    pub rbar_y: Vec<Vec6>,
    pub cbar: Vec<Mat63>,
    pub rbar: Vec<Mat6>,
    pub qbar: Vec<Mat3>,
    // Riccati factorization
    pub phat: Vec<Mat3>,
    pub pi: Vec<Mat63>,
    pub xi: Vec<Mat6>,
    pub omega: Vec<Mat36>,
    pub gain: Vec<Mat36>,
    pub pf: Vec<Mat3>,
    // forward / backward recursion
    pub innov: Vec<Vec6>,
    pub xhat: Vec<Vec3>,
    pub x_filt: Vec<Vec3>,
    pub u_prior: Vec<Vec3>,
    pub lambda: Vec<Vec3>,
    pub xi_vec: Vec<Vec3>,
}

impl KktWork {
    pub fn new(horizon: usize) -> Self {
        let n = horizon;
        KktWork {
            kappa: 0.0,
            p: Mat3::identity(),
            g_u: vec![Vector::zeros(); n],
            g_x: vec![Vector::zeros(); n + 1],
            l_u: vec![Vector::zeros(); n],
            l_x: vec![Vector::zeros(); n + 1],
            r_p: vec![Vector::zeros(); n],
            rbar_x: Vector::zeros(),
            rbar_u: vec![Vector::zeros(); n],
            u_target: vec![Vector::zeros(); n],
            rbar_y: vec![Vector::zeros(); n + 1],
            cbar: vec![Mat63::zeros(); n + 1],
            rbar: vec![Mat6::identity(); n + 1],
            qbar: vec![Mat3::zeros(); n],
            phat: vec![Mat3::zeros(); n + 1],
            pi: vec![Mat63::zeros(); n + 1],
            xi: vec![Mat6::zeros(); n + 1],
            omega: vec![Mat36::zeros(); n + 1],
            gain: vec![Mat36::zeros(); n + 1],
            pf: vec![Mat3::zeros(); n + 1],
            innov: vec![Vector::zeros(); n + 1],
            xhat: vec![Vector::zeros(); n + 1],
            x_filt: vec![Vector::zeros(); n + 1],
            u_prior: vec![Vector::zeros(); n],
            lambda: vec![Vector::zeros(); n],
            xi_vec: vec![Vector::zeros(); n],
        }
    }

    pub fn horizon(&self) -> usize {
        self.r_p.len()
    }

    /// Largest `|r_p|` entry (equality-constraint residual of the iterate).
    pub fn primal_residual(&self) -> f64 {
        self.r_p.iter().fold(0.0_f64, |m, v| m.max(v.norm_inf()))
    }
}

fn diag(v: &Vec3) -> Mat3 {
    Mat3::from_diagonal(v)
}

/// Fills the barrier-linearized KKT quantities at `iterate`.
pub fn assemble_kkt(
    qp: &QpData,
    iterate: &Deviation,
    kappa: f64,
    cost: &CostMatrices,
    work: &mut KktWork,
) -> Result<(), MheError> {
    let n = qp.horizon();
    if iterate.horizon() != n || work.horizon() != n {
        return Err(MheError::WindowShape);
    }
    let q_inv = inv3(&cost.q).map_err(|err| MheError::IllConditionedKkt { stage: 0, err })?;
    let sqrt_k = libm::sqrt(kappa);
    let b = qp.b();
    work.kappa = kappa;
    work.p = cost.p;
    work.rbar_x = -iterate.dx[0];
    for i in 0..=n {
        let bt = barrier_terms(&iterate.dx[i], &qp.dx_lb[i], &qp.dx_ub[i]).map_err(|e| retag(e, i))?;
        work.g_x[i] = bt.g;
        work.l_x[i] = bt.l;
        let mut l_inv_g = Vector::zeros();
        for j in 0..3 {
            l_inv_g[j] = bt.g[j] / bt.l[j];
        }
        let meas_res = qp.r_y[i] - qp.c[i] * iterate.dx[i];
        work.rbar_y[i] = Vec6::stack(&meas_res, &l_inv_g.scale(-sqrt_k));
        work.cbar[i] = Mat63::stack(&qp.c[i], &diag(&bt.l).scale(sqrt_k));
        let mut rbar = Mat6::identity();
        for r in 0..3 {
            rbar.0[r][..3].copy_from_slice(&qp.r[i].0[r]);
        }
        work.rbar[i] = rbar;
        if i < n {
            let bu = barrier_terms(&iterate.du[i], &qp.du_lb[i], &qp.du_ub[i]).map_err(|e| retag(e, i))?;
            work.g_u[i] = bu.g;
            work.l_u[i] = bu.l;
            work.r_p[i] = iterate.dx[i + 1] - qp.f[i] - qp.a[i] * iterate.dx[i] - b * iterate.du[i];
            work.rbar_u[i] = q_inv * (qp.r_u[i] - iterate.du[i]) - bu.g.scale(kappa);
            let mut l2 = Vector::zeros();
            for j in 0..3 {
                l2[j] = bu.l[j] * bu.l[j];
            }
            let hess = q_inv + diag(&l2).scale(kappa);
            let mut qbar = inv3(&hess).map_err(|err| MheError::IllConditionedKkt { stage: i, err })?;
            symmetrize_upper(&mut qbar);
            work.qbar[i] = qbar;
            work.u_target[i] = qbar * work.rbar_u[i];
        }
    }
    Ok(())
}

fn retag(e: MheError, stage: usize) -> MheError {
    match e {
        MheError::InfeasiblePoint { component, .. } => MheError::InfeasiblePoint { stage, component },
        other => other,
    }
}

/// Riccati-recursion solve of the linearized KKT system.
pub fn solve_kkt(work: &mut KktWork, qp: &QpData) -> Result<Deviation, MheError> {
    let n = qp.horizon();
    if work.horizon() != n {
        return Err(MheError::WindowShape);
    }
    let b = qp.b();
    let ts2 = qp.ts * qp.ts;

    // Factorization.
    work.phat[0] = work.p;
    for i in 0..=n {
        let cbar = work.cbar[i];
        let cbar_t = cbar.transpose();
        let phat = work.phat[i];
        let pi = cbar * phat;
        let mut innov_cov = work.rbar[i] + pi * cbar_t;
        symmetrize_upper(&mut innov_cov);
        let xi = inv6_block(&innov_cov).map_err(|err| MheError::IllConditionedKkt { stage: i, err })?;
        let omega = cbar_t * xi;
        let gain = phat * omega;
        let mut pf = phat - gain * pi;
        symmetrize_upper(&mut pf);
        work.pi[i] = pi;
        work.xi[i] = xi;
        work.omega[i] = omega;
        work.gain[i] = gain;
        work.pf[i] = pf;
        if i < n {
            work.phat[i + 1] = sym_sandwich(&qp.a[i], &pf) + work.qbar[i].scale(ts2);
        }
    }

    // Forward recursion.
    work.xhat[0] = work.rbar_x;
    for i in 0..=n {
        let innov = work.rbar_y[i] - work.cbar[i] * work.xhat[i];
        work.innov[i] = innov;
        work.x_filt[i] = work.xhat[i] + work.gain[i] * innov;
        if i < n {
            work.u_prior[i] = work.u_target[i];
            work.xhat[i + 1] = -work.r_p[i] + qp.a[i] * work.x_filt[i] + b * work.u_prior[i];
        }
    }

    // Backward recursion.
    let mut dir = Deviation::zeros(n);
    dir.dx[n] = work.x_filt[n];
    let mut lambda = -(work.omega[n] * work.innov[n]);
    for i in (0..n).rev() {
        work.lambda[i] = lambda;
        let xi_v = qp.a[i].transpose() * lambda;
        work.xi_vec[i] = xi_v;
        dir.du[i] = work.u_prior[i] - work.qbar[i] * (b.transpose() * lambda);
        dir.dx[i] = work.x_filt[i] - work.pf[i] * xi_v;
        if i > 0 {
            lambda = xi_v - work.omega[i] * (work.innov[i] + work.pi[i] * xi_v);
        }
    }
    Ok(dir)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smallmat::Matrix;

    fn qp_zero(n: usize) -> QpData {
        QpData {
            ts: 0.04,
            a: vec![Mat3::identity(); n],
            c: vec![Mat3::identity(); n + 1],
            f: vec![Vector::zeros(); n],
            r_u: vec![Vector::zeros(); n],
            r_y: vec![Vector::zeros(); n + 1],
            r: vec![Mat3::identity(); n + 1],
            dx_lb: vec![Vector([-1.0; 3]); n + 1],
            dx_ub: vec![Vector([1.0; 3]); n + 1],
            du_lb: vec![Vector([-1.0; 3]); n],
            du_ub: vec![Vector([1.0; 3]); n],
        }
    }

    fn cost() -> CostMatrices {
        CostMatrices {
            p: Mat3::identity(),
            q: Mat3::from_diagonal(&Vector([0.5, 2.0, 3.0])),
        }
    }

    #[test]
    fn zero_kappa_disables_barrier_rows() {
        let mut qp = qp_zero(2);
        qp.r_u[1] = Vector([0.3, -0.2, 0.1]);
        let mut it = Deviation::zeros(2);
        it.du[1] = Vector([0.1, 0.1, 0.1]);
        let mut w = KktWork::new(2);
        assemble_kkt(&qp, &it, 0.0, &cost(), &mut w).unwrap();
        for i in 0..=2 {
            for r in 3..6 {
                assert_eq!(w.cbar[i].0[r], [0.0; 3]);
            }
        }
        let c = cost();
        for i in 0..2 {
            assert!((w.qbar[i] - c.q).max_abs() < 1e-15);
        }
        let q_inv = inv3(&c.q).unwrap();
        let expect = q_inv * (qp.r_u[1] - it.du[1]);
        assert!((w.rbar_u[1] - expect).norm_inf() < 1e-15);
    }

    #[test]
    fn consistent_iterate_has_zero_primal_residual() {
        let mut qp = qp_zero(3);
        qp.f = vec![Vector([0.01, -0.02, 0.03]); 3];
        let mut it = Deviation::zeros(3);
        it.du[0] = Vector([0.2, 0.1, -0.1]);
        for i in 0..3 {
            it.dx[i + 1] = qp.f[i] + qp.a[i] * it.dx[i] + qp.b() * it.du[i];
        }
        let mut w = KktWork::new(3);
        assemble_kkt(&qp, &it, 1e-2, &cost(), &mut w).unwrap();
        assert!(w.primal_residual() < 1e-16);
    }

    #[test]
    fn single_stage_bayes_update() {
        // Three decoupled copies of the scalar problem P = C = R = 1, r̄_y = 2.
        let mut qp = qp_zero(1);
        qp.r_y[0] = Vector([2.0; 3]);
        qp.r_y[1] = Vector([0.0; 3]);
        qp.c[1] = Mat3::zeros();
        let mut w = KktWork::new(1);
        assemble_kkt(&qp, &Deviation::zeros(1), 0.0, &cost(), &mut w).unwrap();
        let dir = solve_kkt(&mut w, &qp).unwrap();
        for j in 0..3 {
            assert!((w.gain[0].0[j][j] - 0.5).abs() < 1e-15);
            assert!((w.pf[0].0[j][j] - 0.5).abs() < 1e-15);
            assert!((dir.dx[0][j] - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_residuals_give_zero_direction() {
        let qp = qp_zero(3);
        let mut w = KktWork::new(3);
        assemble_kkt(&qp, &Deviation::zeros(3), 1e-2, &cost(), &mut w).unwrap();
        let dir = solve_kkt(&mut w, &qp).unwrap();
        assert_eq!(dir.norm_inf(), 0.0);
    }

    #[test]
    fn direction_satisfies_linearized_dynamics() {
        let mut qp = qp_zero(3);
        qp.a[1] = Matrix([[1.01, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        qp.f = vec![Vector([0.01, -0.02, 0.03]); 3];
        qp.r_y[2] = Vector([0.2, -0.1, 0.4]);
        qp.r_u[0] = Vector([0.1, 0.0, -0.3]);
        let mut w = KktWork::new(3);
        assemble_kkt(&qp, &Deviation::zeros(3), 1e-3, &cost(), &mut w).unwrap();
        let dir = solve_kkt(&mut w, &qp).unwrap();
        for i in 0..3 {
            let rhs = -w.r_p[i] + qp.a[i] * dir.dx[i] + qp.b() * dir.du[i];
            assert!((dir.dx[i + 1] - rhs).norm_inf() <= 1e-12);
        }
        for i in 0..=3 {
            assert!(w.pf[i].asymmetry() == 0.0);
            assert!(w.phat[i][(0, 0)] > 0.0);
        }
    }

    #[test]
    fn infeasible_iterate_is_reported_with_stage() {
        let qp = qp_zero(2);
        let mut it = Deviation::zeros(2);
        it.dx[2] = Vector([0.0, 1.5, 0.0]);
        let mut w = KktWork::new(2);
        let err = assemble_kkt(&qp, &it, 1e-2, &cost(), &mut w).unwrap_err();
        assert_eq!(err, MheError::InfeasiblePoint { stage: 2, component: 1 });
    }
}
