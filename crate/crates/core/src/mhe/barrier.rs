use super::MheError;
use crate::smallmat::{Vec3, Vector};

/// Log-barrier value, gradient and square-root Hessian diagonal at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BarrierTerms {
    pub phi: f64,
    pub g: Vec3,
    pub l: Vec3,
}

/// `phi = Σ -ln(ub - d) - ln(d - lb)` with its gradient and `sqrt(phi'')`.
///
/// The returned error carries stage 0; callers re-tag it.
pub fn barrier_terms(delta: &Vec3, lb: &Vec3, ub: &Vec3) -> Result<BarrierTerms, MheError> {
    let mut phi = 0.0;
    let mut g = Vector::zeros();
    let mut l = Vector::zeros();
    for j in 0..3 {
        let up = ub[j] - delta[j];
        let lo = delta[j] - lb[j];
        if !(up > 0.0 && lo > 0.0) {
            return Err(MheError::InfeasiblePoint { stage: 0, component: j });
        }
        let iu = 1.0 / up;
        let il = 1.0 / lo;
        phi -= libm::log(up) + libm::log(lo);
        g[j] = iu - il;
        l[j] = libm::sqrt(iu * iu + il * il);
    }
    Ok(BarrierTerms { phi, g, l })
}
