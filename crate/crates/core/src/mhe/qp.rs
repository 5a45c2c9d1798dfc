use alloc::vec::Vec;

use super::{HorizonWindow, MheConfig, MheError};
use crate::airmodel::{discrete_step, h_output, jacobian_a, jacobian_c, OutputMask};
use crate::smallmat::{Mat3, Vec3};

/// QP subproblem in the deviations `dx_i = x_i - x̂_i`, `du_i = u_i - û_i`:
///
/// ```text
/// min ½|dx_0|²_{P⁻¹} + ½ Σ |r_u,i - du_i|²_{Q⁻¹} + ½ Σ |r_y,i - C_i dx_i|²_{R_i⁻¹}
/// s.t. dx_{i+1} = f_i + A_i dx_i + ts du_i,  box bounds on dx and du
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct QpData {
    /// Sampling interval; the input matrix is `B = ts I`.
    pub ts: f64,
    pub a: Vec<Mat3>,
    pub c: Vec<Mat3>,
    pub f: Vec<Vec3>,
    pub r_u: Vec<Vec3>,
    pub r_y: Vec<Vec3>,
    /// Per-stage measurement covariance `R_i`.
    pub r: Vec<Mat3>,
    pub dx_lb: Vec<Vec3>,
    pub dx_ub: Vec<Vec3>,
    pub du_lb: Vec<Vec3>,
    pub du_ub: Vec<Vec3>,
}

impl QpData {
    /// Number of transitions N (states are `0..=N`).
    pub fn horizon(&self) -> usize {
        self.a.len()
    }

    pub fn b(&self) -> Mat3 {
        Mat3::identity().scale(self.ts)
    }

    pub fn is_consistent(&self) -> bool {
        let n = self.a.len();
        n >= 1
            && self.f.len() == n
            && self.r_u.len() == n
            && self.du_lb.len() == n
            && self.du_ub.len() == n
            && self.c.len() == n + 1
            && self.r_y.len() == n + 1
            && self.r.len() == n + 1
            && self.dx_lb.len() == n + 1
            && self.dx_ub.len() == n + 1
    }
}

/// Gauss-Newton linearization of the window around its current iterates.
pub fn linearize(win: &HorizonWindow, cfg: &MheConfig, mask: OutputMask) -> Result<QpData, MheError> {
    let n = win.horizon();
    if !win.is_consistent() {
        return Err(MheError::WindowShape);
    }
    let ts = cfg.ts;
    let bounds = &cfg.bounds;
    let mut qp = QpData {
        ts,
        a: Vec::with_capacity(n),
        c: Vec::with_capacity(n + 1),
        f: Vec::with_capacity(n),
        r_u: Vec::with_capacity(n),
        r_y: Vec::with_capacity(n + 1),
        r: Vec::with_capacity(n + 1),
        dx_lb: Vec::with_capacity(n + 1),
        dx_ub: Vec::with_capacity(n + 1),
        du_lb: Vec::with_capacity(n),
        du_ub: Vec::with_capacity(n),
    };
    for i in 0..=n {
        let x = &win.states[i];
        let th = &win.params[i];
        let model = |err| MheError::Model { stage: i, err };
        let xv = x.to_vec();
        if i < n {
            let u = &win.inputs[i];
            let next = discrete_step(x, u, th, ts, cfg.vg_min).map_err(model)?;
            qp.a.push(jacobian_a(x, th, ts, cfg.vg_min).map_err(model)?);
            qp.f.push(next.to_vec() - win.states[i + 1].to_vec());
            let uv = u.to_vec();
            qp.r_u.push(-uv);
            qp.du_lb.push(bounds.u_lb - uv);
            qp.du_ub.push(bounds.u_ub - uv);
        }
        let y = h_output(x, th).map_err(model)?;
        let mut r_y = win.meas[i].to_vec() - y.to_vec();
        if mask.aoa_lost {
            r_y[0] = 0.0;
        }
        if mask.vcas_lost {
            r_y[2] = 0.0;
        }
        qp.c.push(jacobian_c(x, th, mask).map_err(model)?);
        qp.r_y.push(r_y);
        qp.r.push(Mat3::from_diagonal(&win.meas_var[i]));
        qp.dx_lb.push(bounds.x_lb - xv);
        qp.dx_ub.push(bounds.x_ub - xv);
    }
    Ok(qp)
}
