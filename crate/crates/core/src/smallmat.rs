//! Fixed-size dense kernels for the 3×3 and 6×6 quantities of the estimator.
//!
//! Everything here lives on the stack. Matrices are row-major arrays and
//! symmetric matrices are stored full.

use core::fmt;
use core::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

/// Relative determinant floor used by [`inv3`]: `|det| > DET_REL_TOL * Π ‖row_i‖`.
pub const DET_REL_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix<const R: usize, const C: usize>(pub [[f64; C]; R]);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vector<const N: usize>(pub [f64; N]);

pub type Mat3 = Matrix<3, 3>;
pub type Mat6 = Matrix<6, 6>;
/// 6×3, the shape of the augmented output Jacobian.
pub type Mat63 = Matrix<6, 3>;
/// 3×6, the shape of gains acting on augmented residuals.
pub type Mat36 = Matrix<3, 6>;
pub type Vec3 = Vector<3>;
pub type Vec6 = Vector<6>;

/// Which part of an inversion failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SingularPart {
    Full,
    LeadingBlock,
    SchurComplement,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingularMatrix {
    pub det: f64,
    pub part: SingularPart,
}

impl fmt::Display for SingularMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let part = match self.part {
            SingularPart::Full => "matrix",
            SingularPart::LeadingBlock => "leading 3x3 block",
            SingularPart::SchurComplement => "Schur complement",
        };
        write!(f, "singular {part} (det = {:e})", self.det)
    }
}

impl core::error::Error for SingularMatrix {}

impl<const R: usize, const C: usize> Matrix<R, C> {
    pub const fn zeros() -> Self {
        Matrix([[0.0; C]; R])
    }

    pub fn transpose(&self) -> Matrix<C, R> {
        let mut out = Matrix::<C, R>::zeros();
        for i in 0..R {
            for j in 0..C {
                out.0[j][i] = self.0[i][j];
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        for row in out.0.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        out
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Infinity norm (max absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        self.0
            .iter()
            .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0_f64, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flat_map(|r| r.iter()).all(|v| v.is_finite())
    }

    pub fn row(&self, i: usize) -> Vector<C> {
        Vector(self.0[i])
    }
}

impl<const N: usize> Matrix<N, N> {
    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = 1.0;
        }
        m
    }

    pub fn from_diagonal(d: &Vector<N>) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = d.0[i];
        }
        m
    }

    pub fn diagonal(&self) -> Vector<N> {
        let mut d = Vector::zeros();
        for i in 0..N {
            d.0[i] = self.0[i][i];
        }
        d
    }

    /// Largest `|M - Mᵀ|` entry.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..N {
            for j in (i + 1)..N {
                worst = worst.max((self.0[i][j] - self.0[j][i]).abs());
            }
        }
        worst
    }
}

impl Mat6 {
    /// Splits into `[[A, B], [C, D]]` 3×3 blocks.
    pub fn blocks(&self) -> [[Mat3; 2]; 2] {
        let mut out = [[Mat3::zeros(); 2]; 2];
        for (bi, brow) in out.iter_mut().enumerate() {
            for (bj, blk) in brow.iter_mut().enumerate() {
                for i in 0..3 {
                    for j in 0..3 {
                        blk.0[i][j] = self.0[3 * bi + i][3 * bj + j];
                    }
                }
            }
        }
        out
    }

    pub fn from_blocks(b: &[[Mat3; 2]; 2]) -> Self {
        let mut out = Mat6::zeros();
        for (bi, brow) in b.iter().enumerate() {
            for (bj, blk) in brow.iter().enumerate() {
                for i in 0..3 {
                    for j in 0..3 {
                        out.0[3 * bi + i][3 * bj + j] = blk.0[i][j];
                    }
                }
            }
        }
        out
    }
}

impl Mat63 {
    /// Stacks `top` over `bottom`.
    pub fn stack(top: &Mat3, bottom: &Mat3) -> Self {
        let mut out = Mat63::zeros();
        out.0[..3].copy_from_slice(&top.0);
        out.0[3..].copy_from_slice(&bottom.0);
        out
    }
}

impl<const N: usize> Vector<N> {
    pub const fn zeros() -> Self {
        Vector([0.0; N])
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm_inf(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.dot(self))
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        for v in out.0.iter_mut() {
            *v *= s;
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl Vec6 {
    pub fn stack(top: &Vec3, bottom: &Vec3) -> Self {
        let mut out = Vec6::zeros();
        out.0[..3].copy_from_slice(&top.0);
        out.0[3..].copy_from_slice(&bottom.0);
        out
    }
}

impl<const R: usize, const C: usize> Index<(usize, usize)> for Matrix<R, C> {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.0[i][j]
    }
}

impl<const R: usize, const C: usize> IndexMut<(usize, usize)> for Matrix<R, C> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.0[i][j]
    }
}

impl<const N: usize> Index<usize> for Vector<N> {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl<const N: usize> IndexMut<usize> for Vector<N> {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl<const R: usize, const C: usize> Add for Matrix<R, C> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl<const R: usize, const C: usize> AddAssign for Matrix<R, C> {
    fn add_assign(&mut self, rhs: Self) {
        for i in 0..R {
            for j in 0..C {
                self.0[i][j] += rhs.0[i][j];
            }
        }
    }
}

impl<const R: usize, const C: usize> Sub for Matrix<R, C> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        self -= rhs;
        self
    }
}

impl<const R: usize, const C: usize> SubAssign for Matrix<R, C> {
    fn sub_assign(&mut self, rhs: Self) {
        for i in 0..R {
            for j in 0..C {
                self.0[i][j] -= rhs.0[i][j];
            }
        }
    }
}

impl<const R: usize, const C: usize> Neg for Matrix<R, C> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl<const R: usize, const K: usize, const C: usize> Mul<Matrix<K, C>> for Matrix<R, K> {
    type Output = Matrix<R, C>;
    fn mul(self, rhs: Matrix<K, C>) -> Matrix<R, C> {
        let mut out = Matrix::<R, C>::zeros();
        for i in 0..R {
            for k in 0..K {
                let a = self.0[i][k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..C {
                    out.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        out
    }
}

impl<const R: usize, const C: usize> Mul<Vector<C>> for Matrix<R, C> {
    type Output = Vector<R>;
    fn mul(self, rhs: Vector<C>) -> Vector<R> {
        let mut out = Vector::<R>::zeros();
        for i in 0..R {
            out.0[i] = self.0[i].iter().zip(rhs.0.iter()).map(|(a, b)| a * b).sum();
        }
        out
    }
}

impl<const N: usize> Add for Vector<N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl<const N: usize> AddAssign for Vector<N> {
    fn add_assign(&mut self, rhs: Self) {
        for i in 0..N {
            self.0[i] += rhs.0[i];
        }
    }
}

impl<const N: usize> Sub for Vector<N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        self -= rhs;
        self
    }
}

impl<const N: usize> SubAssign for Vector<N> {
    fn sub_assign(&mut self, rhs: Self) {
        for i in 0..N {
            self.0[i] -= rhs.0[i];
        }
    }
}

impl<const N: usize> Neg for Vector<N> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

pub fn det3(m: &Mat3) -> f64 {
    let a = &m.0;
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

/// Inverse of a 3×3 matrix through the adjugate.
pub fn inv3(m: &Mat3) -> Result<Mat3, SingularMatrix> {
    inv3_tagged(m, SingularPart::Full)
}

fn inv3_tagged(m: &Mat3, part: SingularPart) -> Result<Mat3, SingularMatrix> {
    let a = &m.0;
    let c00 = a[1][1] * a[2][2] - a[1][2] * a[2][1];
    let c01 = a[1][2] * a[2][0] - a[1][0] * a[2][2];
    let c02 = a[1][0] * a[2][1] - a[1][1] * a[2][0];
    let det = a[0][0] * c00 + a[0][1] * c01 + a[0][2] * c02;
    // Hadamard bound: |det| <= product of row norms, invariant to row scaling
    let bound: f64 = (0..3).map(|i| m.row(i).norm()).product();
    if !det.is_finite() || det.abs() <= DET_REL_TOL * bound {
        return Err(SingularMatrix { det, part });
    }
    let inv_det = 1.0 / det;
    let adj = [
        [
            c00,
            a[0][2] * a[2][1] - a[0][1] * a[2][2],
            a[0][1] * a[1][2] - a[0][2] * a[1][1],
        ],
        [
            c01,
            a[0][0] * a[2][2] - a[0][2] * a[2][0],
            a[0][2] * a[1][0] - a[0][0] * a[1][2],
        ],
        [
            c02,
            a[0][1] * a[2][0] - a[0][0] * a[2][1],
            a[0][0] * a[1][1] - a[0][1] * a[1][0],
        ],
    ];
    Ok(Matrix(adj).scale(inv_det))
}

/// Inverse of a 6×6 matrix by the 2×2 block formula over 3×3 blocks.
///
/// With `M = [[A, B], [C, D]]` and `S = D - C A⁻¹ B`:
/// `M⁻¹ = [[A⁻¹ + A⁻¹ B S⁻¹ C A⁻¹, -A⁻¹ B S⁻¹], [-S⁻¹ C A⁻¹, S⁻¹]]`.
pub fn inv6_block(m: &Mat6) -> Result<Mat6, SingularMatrix> {
    let [[a, b], [c, d]] = m.blocks();
    let a_inv = inv3_tagged(&a, SingularPart::LeadingBlock)?;
    let ca = c * a_inv;
    let ab = a_inv * b;
    let schur = d - ca * b;
    let s_inv = inv3_tagged(&schur, SingularPart::SchurComplement)?;
    let top_right = -(ab * s_inv);
    let bottom_left = -(s_inv * ca);
    let top_left = a_inv - top_right * ca;
    Ok(Mat6::from_blocks(&[[top_left, top_right], [bottom_left, s_inv]]))
}

/// `A P Aᵀ` for symmetric `P`; only the upper triangle is computed and mirrored.
pub fn sym_sandwich(a: &Mat3, p: &Mat3) -> Mat3 {
    let ap = *a * *p;
    let mut out = Mat3::zeros();
    for i in 0..3 {
        for j in i..3 {
            let v = ap.0[i][0] * a.0[j][0] + ap.0[i][1] * a.0[j][1] + ap.0[i][2] * a.0[j][2];
            out.0[i][j] = v;
            out.0[j][i] = v;
        }
    }
    out
}

/// Mirrors the upper triangle onto the lower one.
pub fn symmetrize_upper<const N: usize>(m: &mut Matrix<N, N>) {
    for i in 0..N {
        for j in (i + 1)..N {
            m.0[j][i] = m.0[i][j];
        }
    }
}
