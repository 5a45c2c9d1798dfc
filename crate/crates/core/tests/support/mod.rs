//! Random instances and dense reference solvers shared by the integration
//! and acceptance tests. Everything here is independent of the Riccati path.
#![allow(dead_code, clippy::needless_range_loop)]

use airdata_mhe::mhe::{CostMatrices, Deviation, QpData};
use airdata_mhe::smallmat::{Mat3, Matrix, Vec3, Vector};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

pub fn rand_vec3<R: Rng>(rng: &mut R, scale: f64) -> Vec3 {
    Vector([
        rng.random_range(-scale..scale),
        rng.random_range(-scale..scale),
        rng.random_range(-scale..scale),
    ])
}

pub fn rand_mat3<R: Rng>(rng: &mut R, scale: f64) -> Mat3 {
    let mut m = Mat3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            m.0[i][j] = rng.random_range(-scale..scale);
        }
    }
    m
}

/// SPD matrix with eigenvalues roughly in `[lo, hi]`.
pub fn rand_spd<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> Mat3 {
    let l = rand_mat3(rng, 1.0);
    let base = l * l.transpose();
    let s = base.max_abs().max(1e-12);
    base.scale((hi - lo) / (3.0 * s)) + Mat3::identity().scale(lo)
}

pub struct Instance {
    pub qp: QpData,
    pub cost: CostMatrices,
    pub iterate: Deviation,
    pub kappa: f64,
}

/// Random QP data with bounds straddling zero and a strictly interior iterate.
pub fn random_instance<R: Rng>(rng: &mut R, n: usize) -> Instance {
    let ts = rng.random_range(0.01..0.1);
    let mut a = Vec::new();
    let mut f = Vec::new();
    let mut r_u = Vec::new();
    let mut du_lb = Vec::new();
    let mut du_ub = Vec::new();
    for _ in 0..n {
        a.push(Mat3::identity() + rand_mat3(rng, 0.2));
        f.push(rand_vec3(rng, 0.5));
        r_u.push(rand_vec3(rng, 1.0));
        du_lb.push(Vector([
            -rng.random_range(0.5..3.0),
            -rng.random_range(0.5..3.0),
            -rng.random_range(0.5..3.0),
        ]));
        du_ub.push(Vector([
            rng.random_range(0.5..3.0),
            rng.random_range(0.5..3.0),
            rng.random_range(0.5..3.0),
        ]));
    }
    let mut c = Vec::new();
    let mut r_y = Vec::new();
    let mut r = Vec::new();
    let mut dx_lb = Vec::new();
    let mut dx_ub = Vec::new();
    for _ in 0..=n {
        c.push(rand_mat3(rng, 1.5));
        r_y.push(rand_vec3(rng, 1.0));
        r.push(rand_spd(rng, 0.1, 3.0));
        dx_lb.push(Vector([
            -rng.random_range(0.5..3.0),
            -rng.random_range(0.5..3.0),
            -rng.random_range(0.5..3.0),
        ]));
        dx_ub.push(Vector([
            rng.random_range(0.5..3.0),
            rng.random_range(0.5..3.0),
            rng.random_range(0.5..3.0),
        ]));
    }
    let qp = QpData {
        ts,
        a,
        c,
        f,
        r_u,
        r_y,
        r,
        dx_lb,
        dx_ub,
        du_lb,
        du_ub,
    };
    let interior = |rng: &mut R, lb: &Vec3, ub: &Vec3| {
        let mut v = Vector::zeros();
        for j in 0..3 {
            let t = rng.random_range(0.15..0.85);
            v[j] = lb[j] + t * (ub[j] - lb[j]);
        }
        v
    };
    let mut iterate = Deviation::zeros(n);
    for i in 0..=n {
        iterate.dx[i] = interior(rng, &qp.dx_lb[i], &qp.dx_ub[i]);
    }
    for i in 0..n {
        iterate.du[i] = interior(rng, &qp.du_lb[i], &qp.du_ub[i]);
    }
    let cost = CostMatrices {
        p: rand_spd(rng, 0.2, 3.0),
        q: rand_spd(rng, 0.2, 3.0),
    };
    let kappa = 10f64.powf(rng.random_range(-6.0..-1.0));
    Instance {
        qp,
        cost,
        iterate,
        kappa,
    }
}

pub fn to_na(m: &Mat3) -> DMatrix<f64> {
    DMatrix::from_fn(3, 3, |i, j| m.0[i][j])
}

fn put(big: &mut DMatrix<f64>, r0: usize, c0: usize, m: &DMatrix<f64>) {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            big[(r0 + i, c0 + j)] += m[(i, j)];
        }
    }
}

fn vec_na(v: &Vec3) -> DVector<f64> {
    DVector::from_column_slice(&v.0)
}

/// Dense Newton step of the barrier problem at `iterate`, or of the plain
/// equality-constrained QP when `kappa == 0` (bounds ignored).
///
/// Solves `[H Eᵀ; E 0] [d; ν] = [-∇J; -r_p]` by LU.
pub fn dense_newton_step(qp: &QpData, cost: &CostMatrices, iterate: &Deviation, kappa: f64) -> Deviation {
    let n = qp.a.len();
    let nx = 3 * (n + 1);
    let nz = nx + 3 * n;
    let ne = 3 * n;
    let mut h = DMatrix::<f64>::zeros(nz, nz);
    let mut grad = DVector::<f64>::zeros(nz);
    let p_inv = to_na(&cost.p).try_inverse().unwrap();
    let q_inv = to_na(&cost.q).try_inverse().unwrap();
    let b = DMatrix::<f64>::identity(3, 3) * qp.ts;

    let bar = |d: f64, lb: f64, ub: f64| {
        (
            1.0 / (ub - d) - 1.0 / (d - lb),
            1.0 / (ub - d).powi(2) + 1.0 / (d - lb).powi(2),
        )
    };

    for i in 0..=n {
        let c = to_na(&qp.c[i]);
        let r_inv = to_na(&qp.r[i]).try_inverse().unwrap();
        let dx = vec_na(&iterate.dx[i]);
        let mut hi = c.transpose() * &r_inv * &c;
        let mut gi = -(c.transpose() * &r_inv * (vec_na(&qp.r_y[i]) - &c * &dx));
        if i == 0 {
            hi += &p_inv;
            gi += &p_inv * &dx;
        }
        for j in 0..3 {
            let (g1, g2) = bar(iterate.dx[i][j], qp.dx_lb[i][j], qp.dx_ub[i][j]);
            hi[(j, j)] += kappa * g2;
            gi[j] += kappa * g1;
        }
        put(&mut h, 3 * i, 3 * i, &hi);
        for j in 0..3 {
            grad[3 * i + j] = gi[j];
        }
    }
    for i in 0..n {
        let du = vec_na(&iterate.du[i]);
        let mut hi = q_inv.clone();
        let mut gi = -(&q_inv * (vec_na(&qp.r_u[i]) - &du));
        for j in 0..3 {
            let (g1, g2) = bar(iterate.du[i][j], qp.du_lb[i][j], qp.du_ub[i][j]);
            hi[(j, j)] += kappa * g2;
            gi[j] += kappa * g1;
        }
        put(&mut h, nx + 3 * i, nx + 3 * i, &hi);
        for j in 0..3 {
            grad[nx + 3 * i + j] = gi[j];
        }
    }
    // d x_{i+1} - A d x_i - B d u_i = f_i + A Δx_i + B Δu_i - Δx_{i+1}
    let mut e = DMatrix::<f64>::zeros(ne, nz);
    let mut rhs_e = DVector::<f64>::zeros(ne);
    for i in 0..n {
        let a = to_na(&qp.a[i]);
        put(&mut e, 3 * i, 3 * (i + 1), &DMatrix::identity(3, 3));
        put(&mut e, 3 * i, 3 * i, &(-&a));
        put(&mut e, 3 * i, nx + 3 * i, &(-&b));
        let res =
            vec_na(&qp.f[i]) + &a * vec_na(&iterate.dx[i]) + &b * vec_na(&iterate.du[i]) - vec_na(&iterate.dx[i + 1]);
        for j in 0..3 {
            rhs_e[3 * i + j] = res[j];
        }
    }
    let mut kkt = DMatrix::<f64>::zeros(nz + ne, nz + ne);
    put(&mut kkt, 0, 0, &h);
    put(&mut kkt, 0, nz, &e.transpose());
    put(&mut kkt, nz, 0, &e);
    let mut rhs = DVector::<f64>::zeros(nz + ne);
    for k in 0..nz {
        rhs[k] = -grad[k];
    }
    for k in 0..ne {
        rhs[nz + k] = rhs_e[k];
    }
    let sol = kkt.lu().solve(&rhs).expect("dense KKT singular");
    let mut out = Deviation::zeros(n);
    for i in 0..=n {
        out.dx[i] = Vector([sol[3 * i], sol[3 * i + 1], sol[3 * i + 2]]);
    }
    for i in 0..n {
        out.du[i] = Vector([sol[nx + 3 * i], sol[nx + 3 * i + 1], sol[nx + 3 * i + 2]]);
    }
    out
}

/// `max |a - b| / max(|b|, floor)` over all components.
pub fn rel_error(a: &Deviation, b: &Deviation) -> f64 {
    let scale = b.norm_inf().max(1e-12);
    let mut worst = 0.0_f64;
    for (x, y) in a.dx.iter().zip(b.dx.iter()).chain(a.du.iter().zip(b.du.iter())) {
        worst = worst.max((*x - *y).norm_inf());
    }
    worst / scale
}

pub fn mat6_to_na(m: &Matrix<6, 6>) -> DMatrix<f64> {
    DMatrix::from_fn(6, 6, |i, j| m.0[i][j])
}

use airdata_mhe::airmodel::{
    discrete_step, h_output, jacobian_a, jacobian_c, EstimState, FlightParams, OutputMask, ProcessInput, DEFAULT_VG_MIN,
};

/// Random state and parameters inside the subsonic, well-posed domain.
pub fn random_point<R: Rng>(rng: &mut R) -> (EstimState, FlightParams) {
    let x = EstimState::new(
        rng.random_range(-5.0f64..20.0).to_radians(),
        rng.random_range(-40.0..40.0),
        rng.random_range(-15.0..15.0),
    );
    let th = FlightParams {
        vg: rng.random_range(60.0..200.0),
        theta: rng.random_range(-10.0f64..20.0).to_radians(),
        q: rng.random_range(-0.1..0.1),
        nx: rng.random_range(-0.3..0.3),
        nz: rng.random_range(0.3..2.0),
        z: rng.random_range(0.0..12_000.0),
    };
    (x, th)
}

const STATE_SCALE: [f64; 3] = [1.0, 100.0, 100.0];

fn perturbed(x: &EstimState, j: usize, h: f64) -> EstimState {
    let mut v = x.to_vec();
    v[j] += h;
    EstimState::from_vec(v)
}

fn rel(fd: f64, an: f64, floor: f64) -> f64 {
    (fd - an).abs() / an.abs().max(floor)
}

/// Worst relative deviation of `jacobian_a` and the non-forced entries of
/// `jacobian_c` from central differences at one point.
pub fn jacobian_fd_error(x: &EstimState, th: &FlightParams, ts: f64) -> f64 {
    let a = jacobian_a(x, th, ts, DEFAULT_VG_MIN).unwrap();
    let c = jacobian_c(x, th, OutputMask::ALL_AVAILABLE).unwrap();
    let u = ProcessInput::default();
    let mut worst = 0.0_f64;
    for j in 0..3 {
        let h = 1e-6 * x.to_vec()[j].abs().max(STATE_SCALE[j]);
        let fp = discrete_step(&perturbed(x, j, h), &u, th, ts, DEFAULT_VG_MIN)
            .unwrap()
            .to_vec();
        let fm = discrete_step(&perturbed(x, j, -h), &u, th, ts, DEFAULT_VG_MIN)
            .unwrap()
            .to_vec();
        let yp = h_output(&perturbed(x, j, h), th).unwrap().to_vec();
        let ym = h_output(&perturbed(x, j, -h), th).unwrap().to_vec();
        for i in 0..3 {
            let fa = (fp[i] - fm[i]) / (2.0 * h);
            worst = worst.max(rel(fa, a.0[i][j], 1e-3));
            if (i, j) == (1, 1) || (i, j) == (2, 2) {
                continue;
            }
            let fc = (yp[i] - ym[i]) / (2.0 * h);
            worst = worst.max(rel(fc, c.0[i][j], 1e-3));
        }
    }
    worst
}
