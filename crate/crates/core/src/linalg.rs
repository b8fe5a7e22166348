//! Small dense complex matrix primitives.
//!
//! Everything here works on `l x l` matrices with `l` small (typically at most
//! eight), so decompositions go through nalgebra's dense SVD / Hermitian
//! eigensolver without any attempt at structure exploitation.
//!
//! Two absolute values appear downstream and both are provided:
//! [`abs_right`] is `sqrt(T* T)` and [`abs_left`] is `sqrt(T T*)`. Call sites
//! state which one they use.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
/// Dense complex square matrix; the crate-wide `SquareMatrix`.
pub type CMatrix = DMatrix<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Numerical thresholds shared across a computation session.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Hermiticity / PSD slack.
    pub herm: f64,
    /// Relative linear-algebra residual, scaled by `1 + ||A||`.
    pub lin: f64,
    /// Relative singular-value floor, scaled by `||A||`.
    pub sing: f64,
    /// Total-mass normalization slack.
    pub norm: f64,
    /// Orthonormality drift of computed polynomials.
    pub orth: f64,
    /// Minimum eigenvalue of the Stieltjes Gram matrix.
    pub pos: f64,
    /// Factorization residual relative to `max ||w||`.
    pub fact: f64,
    /// Nodes with `det w` below this are rejected by the factorization.
    pub pd_floor: f64,
    /// Relative singular-value cutoff used for ranks and kernels.
    pub rank: f64,
    /// Minimum distance to a singularity of the m-function.
    pub pole_radius: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            herm: 1e-10,
            lin: 1e-10,
            sing: 1e-12,
            norm: 1e-8,
            orth: 1e-7,
            pos: 1e-10,
            fact: 1e-8,
            pd_floor: 1e-13,
            rank: 1e-10,
            pole_radius: 1e-6,
        }
    }
}

pub fn identity(l: usize) -> CMatrix {
    CMatrix::identity(l, l)
}

pub fn zeros(l: usize) -> CMatrix {
    CMatrix::zeros(l, l)
}

pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Real diagonal matrix.
pub fn diag(values: &[f64]) -> CMatrix {
    let l = values.len();
    CMatrix::from_fn(l, l, |i, j| if i == j { c64(values[i], 0.0) } else { ZERO })
}

/// Matrix built from row-major real and imaginary parts.
pub fn from_rows(re: &[Vec<f64>], im: Option<&[Vec<f64>]>) -> CMatrix {
    let rows = re.len();
    let cols = re.first().map_or(0, Vec::len);
    CMatrix::from_fn(rows, cols, |i, j| {
        let imag = im.map_or(0.0, |m| m[i][j]);
        c64(re[i][j], imag)
    })
}

/// Operator (spectral) norm: the largest singular value.
pub fn op_norm(a: &CMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    if a.nrows() == 1 && a.ncols() == 1 {
        return a[(0, 0)].norm();
    }
    a.clone()
        .singular_values()
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

/// Singular values in descending order.
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = a.clone().singular_values().iter().cloned().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

pub fn hermitian_defect(a: &CMatrix) -> f64 {
    op_norm(&(a - a.adjoint()))
}

pub fn hermitian_part(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()).scale(0.5)
}

/// `||U* U - 1||`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    op_norm(&(u.adjoint() * u - identity(u.ncols())))
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues ascending.
///
/// Only the Hermitian part of `a` is used.
pub fn hermitian_eigen(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let l = a.nrows();
    let h = hermitian_part(a);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..l).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(l, l, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

fn check_hermitian_psd(a: &CMatrix, tol: &Tolerances) -> Result<(Vec<f64>, CMatrix)> {
    let scale = 1.0 + op_norm(a);
    let defect = hermitian_defect(a);
    if defect > tol.herm * scale {
        return Err(Error::NotHermitian { defect });
    }
    let (vals, vecs) = hermitian_eigen(a);
    if let Some(&min) = vals.first() {
        if min < -tol.herm * scale {
            return Err(Error::NegativeEigenvalue {
                min_eigenvalue: min,
            });
        }
    }
    Ok((vals, vecs))
}

fn spectral_apply(vals: &[f64], vecs: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let l = vals.len();
    let mut scaled = vecs.clone();
    for (j, &v) in vals.iter().enumerate() {
        let fv = f(v);
        for i in 0..l {
            scaled[(i, j)] *= fv;
        }
    }
    let s = scaled * vecs.adjoint();
    hermitian_part(&s)
}

/// Principal square root of a Hermitian positive semi-definite matrix.
pub fn principal_sqrt(a: &CMatrix, tol: &Tolerances) -> Result<CMatrix> {
    let (vals, vecs) = check_hermitian_psd(a, tol)?;
    // Eigenvalues at rounding level are zeros; sqrt would amplify them to ~1e-8.
    let floor = 16.0 * f64::EPSILON * vals.last().map_or(0.0, |v| v.abs());
    Ok(spectral_apply(&vals, &vecs, |v| {
        if v <= floor {
            0.0
        } else {
            v.sqrt()
        }
    }))
}

/// `A^{-1/2}` for Hermitian positive definite `A`.
pub fn inverse_sqrt(a: &CMatrix, tol: &Tolerances) -> Result<CMatrix> {
    let (vals, vecs) = check_hermitian_psd(a, tol)?;
    let max = vals.last().cloned().unwrap_or(0.0);
    let min = vals.first().cloned().unwrap_or(0.0);
    if min <= tol.sing * max.max(f64::MIN_POSITIVE) {
        return Err(Error::Singular {
            sigma_min: min.max(0.0),
        });
    }
    Ok(spectral_apply(&vals, &vecs, |v| 1.0 / v.sqrt()))
}

/// `sqrt(T* T)`.
pub fn abs_right(t: &CMatrix) -> CMatrix {
    let tol = Tolerances::default();
    principal_sqrt(&(t.adjoint() * t), &tol).expect("T*T is Hermitian PSD")
}

/// `sqrt(T T*)`.
pub fn abs_left(t: &CMatrix) -> CMatrix {
    let tol = Tolerances::default();
    principal_sqrt(&(t * t.adjoint()), &tol).expect("TT* is Hermitian PSD")
}

/// Polar factors `A = U P` with `U` unitary and `P = sqrt(A* A)`.
///
/// The same unitary also gives `A = (U P U*) U` where `U P U* = sqrt(A A*)`,
/// so callers needing the left absolute value take [`Polar::left_positive`].
#[derive(Debug, Clone)]
pub struct Polar {
    pub unitary: CMatrix,
    pub positive: CMatrix,
}

impl Polar {
    /// `sqrt(A A*) = U P U*`.
    pub fn left_positive(&self) -> CMatrix {
        hermitian_part(&(&self.unitary * &self.positive * self.unitary.adjoint()))
    }
}

pub fn left_polar(a: &CMatrix, tol: &Tolerances) -> Result<Polar> {
    let l = a.nrows();
    let svd = a.clone().svd(true, true);
    let u = svd.u.expect("left singular vectors requested");
    let v_t = svd.v_t.expect("right singular vectors requested");
    let s = &svd.singular_values;
    let smax = s.iter().cloned().fold(0.0, f64::max);
    let smin = s.iter().cloned().fold(f64::INFINITY, f64::min);
    if l == 0 {
        return Ok(Polar {
            unitary: zeros(0),
            positive: zeros(0),
        });
    }
    if !(smin > tol.sing * smax) {
        return Err(Error::Singular { sigma_min: smin });
    }
    let unitary = &u * &v_t;
    let mut vs = v_t.adjoint();
    for j in 0..l {
        for i in 0..l {
            vs[(i, j)] *= s[j];
        }
    }
    let positive = hermitian_part(&(vs * &v_t));
    Ok(Polar { unitary, positive })
}

pub fn inverse(a: &CMatrix) -> Result<CMatrix> {
    let l = a.nrows();
    if l == 1 {
        let v = a[(0, 0)];
        if v.norm() == 0.0 || !v.is_finite() {
            return Err(Error::Singular {
                sigma_min: v.norm(),
            });
        }
        return Ok(CMatrix::from_element(1, 1, v.inv()));
    }
    a.clone()
        .try_inverse()
        .filter(|inv| inv.iter().all(|v| v.is_finite()))
        .ok_or_else(|| Error::Singular {
            sigma_min: singular_values(a).last().cloned().unwrap_or(0.0),
        })
}

pub fn det(a: &CMatrix) -> C64 {
    if a.nrows() == 1 {
        return a[(0, 0)];
    }
    a.clone().determinant()
}

/// Orthonormal basis (as columns) of the kernel of `a`.
///
/// Right singular vectors with `sigma <= rel * sigma_max` are kept; a zero
/// matrix has the whole space as its kernel.
pub fn kernel_frame(a: &CMatrix, rel: f64) -> CMatrix {
    kernel_frame_with_floor(a, rel, 0.0)
}

/// Like [`kernel_frame`] with the cutoff `rel * max(sigma_max, scale)`.
pub fn kernel_frame_with_floor(a: &CMatrix, rel: f64, scale: f64) -> CMatrix {
    let n = a.ncols();
    // Pad to square so a full set of right singular vectors is available.
    let rows = a.nrows().max(n);
    let mut sq = CMatrix::zeros(rows, n);
    sq.view_mut((0, 0), (a.nrows(), n)).copy_from(a);
    let svd = sq.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let s = &svd.singular_values;
    let smax = s.iter().cloned().fold(0.0, f64::max);
    let cut = rel * smax.max(scale);
    let cols: Vec<usize> = (0..n).filter(|&i| s[i] <= cut).collect();
    CMatrix::from_fn(n, cols.len(), |r, c| v_t[(cols[c], r)].conj())
}

/// Numerical rank with the relative cutoff `rel * sigma_max`.
pub fn rank(a: &CMatrix, rel: f64) -> usize {
    let s = singular_values(a);
    let smax = s.first().cloned().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|&&v| v > rel * smax).count()
}

/// Orthonormalizes the columns of `frame`.
///
/// Fails with [`Error::DegenerateFrame`] when the columns are numerically
/// dependent.
pub fn orthonormalize(frame: &CMatrix) -> Result<CMatrix> {
    let k = frame.ncols();
    if k == 0 {
        return Ok(frame.clone());
    }
    let s = singular_values(frame);
    let smax = s[0];
    let smin = s[s.len().min(k) - 1];
    if s.len() < k || smax == 0.0 || smin <= 1e-10 * smax {
        return Err(Error::DegenerateFrame);
    }
    Ok(qr_positive(frame).0.columns(0, k).into_owned())
}

/// Full QR `A = Q R` with `Q` square unitary and `diag(R)` real non-negative.
pub(crate) fn qr_positive(a: &CMatrix) -> (CMatrix, CMatrix) {
    let rows = a.nrows();
    let cols = a.ncols();
    // Modified Gram-Schmidt on [A | I], twice for stability.
    let mut basis: Vec<nalgebra::DVector<C64>> = Vec::with_capacity(rows);
    let mut r = CMatrix::zeros(rows, cols);
    let candidates = (0..cols)
        .map(|j| (Some(j), a.column(j).into_owned()))
        .chain((0..rows).map(|i| {
            let mut e = nalgebra::DVector::zeros(rows);
            e[i] = ONE;
            (None, e)
        }));
    for (col, mut v) in candidates {
        if basis.len() == rows {
            break;
        }
        let original_norm = v.norm();
        for _ in 0..2 {
            for (k, q) in basis.iter().enumerate() {
                let proj = q.dotc(&v);
                v -= q * proj;
                if let Some(j) = col {
                    r[(k, j)] += proj;
                }
            }
        }
        let n = v.norm();
        let keep = match col {
            Some(_) => n > 1e-13 * original_norm.max(f64::MIN_POSITIVE),
            None => n > 1e-8,
        };
        if keep {
            if let Some(j) = col {
                r[(basis.len(), j)] = c64(n, 0.0);
            }
            basis.push(v / c64(n, 0.0));
        }
    }
    let q = CMatrix::from_fn(rows, rows, |i, j| basis[j][i]);
    (q, r)
}

/// Unitary `Q = [W_perp | W]` whose last `k` columns span the frame `w`.
///
/// Deterministic: the frame is orthonormalized by Gram-Schmidt and the
/// complement is built from the standard basis in order.
pub fn complete_with_frame_last(w: &CMatrix) -> CMatrix {
    let l = w.nrows();
    let k = w.ncols();
    let (q, _) = qr_positive(w);
    // q = [W_orth | W_perp]; reorder to [W_perp | W_orth].
    CMatrix::from_fn(l, l, |i, j| {
        if j < l - k {
            q[(i, k + j)]
        } else {
            q[(i, j - (l - k))]
        }
    })
}

/// Orthogonal projector onto the column span of an orthonormal frame.
pub fn projector(frame: &CMatrix) -> CMatrix {
    frame * frame.adjoint()
}

/// Largest principal angle between the column spans of two orthonormal frames.
///
/// Subspaces of different dimension are at angle `pi/2`.
pub fn principal_angle(a: &CMatrix, b: &CMatrix) -> f64 {
    if a.ncols() != b.ncols() {
        return std::f64::consts::FRAC_PI_2;
    }
    if a.ncols() == 0 {
        return 0.0;
    }
    let l = a.nrows();
    let residual = (identity(l) - projector(a)) * b;
    op_norm(&residual).min(1.0).asin()
}

/// Maximum absolute entry difference.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Operator-norm distance.
pub fn dist(a: &CMatrix, b: &CMatrix) -> f64 {
    op_norm(&(a - b))
}

/// Is `a` Hermitian positive definite within `tol`?
pub fn is_hpd(a: &CMatrix, tol: &Tolerances) -> bool {
    let scale = 1.0 + op_norm(a);
    if hermitian_defect(a) > tol.herm * scale {
        return false;
    }
    let (vals, _) = hermitian_eigen(a);
    vals.first().is_some_and(|&v| v > 0.0)
}

/// Contiguous storage for a sequence of `l x l` matrices (column-major each).
///
/// Used on quadrature grids where allocating a `DMatrix` per node would
/// dominate the cost of 2x2 arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub struct MatField {
    dim: usize,
    len: usize,
    data: Vec<C64>,
}

impl MatField {
    pub fn zeros(dim: usize, len: usize) -> Self {
        MatField {
            dim,
            len,
            data: vec![ZERO; dim * dim * len],
        }
    }

    pub fn identity(dim: usize, len: usize) -> Self {
        let mut f = Self::zeros(dim, len);
        for n in 0..len {
            for i in 0..dim {
                f.data[n * dim * dim + i * dim + i] = ONE;
            }
        }
        f
    }

    pub fn from_fn(dim: usize, len: usize, mut f: impl FnMut(usize) -> CMatrix) -> Self {
        let mut out = Self::zeros(dim, len);
        for n in 0..len {
            out.set(n, &f(n));
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn slot(&self, n: usize) -> &[C64] {
        let s = self.dim * self.dim;
        &self.data[n * s..(n + 1) * s]
    }

    pub fn slot_mut(&mut self, n: usize) -> &mut [C64] {
        let s = self.dim * self.dim;
        &mut self.data[n * s..(n + 1) * s]
    }

    pub fn get(&self, n: usize) -> CMatrix {
        CMatrix::from_column_slice(self.dim, self.dim, self.slot(n))
    }

    pub fn set(&mut self, n: usize, m: &CMatrix) {
        assert_eq!(m.nrows(), self.dim, "MatField::set dimension");
        self.slot_mut(n).copy_from_slice(m.as_slice());
    }

    pub fn raw(&self) -> &[C64] {
        &self.data
    }

    pub fn raw_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn iter(&self) -> impl Iterator<Item = CMatrix> + '_ {
        (0..self.len).map(move |n| self.get(n))
    }

    /// Pointwise `self[n] * rhs` for a constant right factor.
    pub fn mul_right(&self, rhs: &CMatrix) -> MatField {
        let mut out = MatField::zeros(self.dim, self.len);
        for n in 0..self.len {
            kernels::mul(self.dim, self.slot(n), rhs.as_slice(), out.slot_mut(n));
        }
        out
    }

    /// Pointwise `lhs * self[n]` for a constant left factor.
    pub fn mul_left(&self, lhs: &CMatrix) -> MatField {
        let mut out = MatField::zeros(self.dim, self.len);
        for n in 0..self.len {
            kernels::mul(self.dim, lhs.as_slice(), self.slot(n), out.slot_mut(n));
        }
        out
    }

    /// Pointwise product `self[n] * other[n]`.
    pub fn mul_pointwise(&self, other: &MatField) -> MatField {
        assert_eq!(self.len, other.len);
        let mut out = MatField::zeros(self.dim, self.len);
        for n in 0..self.len {
            kernels::mul(self.dim, self.slot(n), other.slot(n), out.slot_mut(n));
        }
        out
    }

    pub fn max_norm_diff(&self, other: &MatField) -> f64 {
        (0..self.len)
            .map(|n| op_norm(&(self.get(n) - other.get(n))))
            .fold(0.0, f64::max)
    }
}

/// Raw column-major kernels for `l x l` blocks.
pub(crate) mod kernels {
    use super::{C64, ZERO};

    /// `out = a * b`
    #[inline]
    pub fn mul(l: usize, a: &[C64], b: &[C64], out: &mut [C64]) {
        for j in 0..l {
            for i in 0..l {
                let mut acc = ZERO;
                for k in 0..l {
                    acc += a[k * l + i] * b[j * l + k];
                }
                out[j * l + i] = acc;
            }
        }
    }

    /// `out += a^* * b`
    #[inline]
    pub fn adj_mul_acc(l: usize, a: &[C64], b: &[C64], out: &mut [C64]) {
        for j in 0..l {
            for i in 0..l {
                let mut acc = ZERO;
                for k in 0..l {
                    acc += a[i * l + k].conj() * b[j * l + k];
                }
                out[j * l + i] += acc;
            }
        }
    }

    /// `out += a^* * w * b` using `tmp` as scratch.
    #[inline]
    pub fn sandwich_acc(
        l: usize,
        a: &[C64],
        w: &[C64],
        b: &[C64],
        tmp: &mut [C64],
        out: &mut [C64],
    ) {
        mul(l, w, b, tmp);
        adj_mul_acc(l, a, tmp, out);
    }

    /// `out -= a * b`
    #[inline]
    pub fn mul_sub(l: usize, a: &[C64], b: &[C64], out: &mut [C64]) {
        for j in 0..l {
            for i in 0..l {
                let mut acc = ZERO;
                for k in 0..l {
                    acc += a[k * l + i] * b[j * l + k];
                }
                out[j * l + i] -= acc;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, l: usize) -> CMatrix {
        CMatrix::from_fn(l, l, |_, _| {
            c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    #[test]
    fn sqrt_identity_and_diagonal() {
        let tol = Tolerances::default();
        assert!(max_abs_diff(&principal_sqrt(&identity(3), &tol).unwrap(), &identity(3)) < 1e-15);
        let s = principal_sqrt(&diag(&[4.0, 9.0]), &tol).unwrap();
        assert!(max_abs_diff(&s, &diag(&[2.0, 3.0])) < 1e-14);
    }

    #[test]
    fn sqrt_reconstructs_random_gram() {
        let tol = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for l in 1..=6 {
            let x = random_matrix(&mut rng, l);
            let a = x.adjoint() * &x;
            let s = principal_sqrt(&a, &tol).unwrap();
            assert!(hermitian_defect(&s) < 1e-13);
            assert!(op_norm(&(&s * &s - &a)) < 1e-12);
            assert!(op_norm(&(&s * &a - &a * &s)) < 1e-12);
            assert!(hermitian_eigen(&s).0[0] > -1e-12);
        }
    }

    #[test]
    fn sqrt_rejects_bad_input() {
        let tol = Tolerances::default();
        let mut a = identity(2);
        a[(0, 1)] = c64(1.0, 0.0);
        assert!(matches!(
            principal_sqrt(&a, &tol),
            Err(Error::NotHermitian { .. })
        ));
        assert!(matches!(
            principal_sqrt(&diag(&[1.0, -0.5]), &tol),
            Err(Error::NegativeEigenvalue { .. })
        ));
    }

    #[test]
    fn sqrt_of_projector_is_itself() {
        let tol = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let x = random_matrix(&mut rng, 4);
            let frame = orthonormalize(&x.columns(0, 2).into_owned()).unwrap();
            let p = projector(&frame);
            let s = principal_sqrt(&p, &tol).unwrap();
            assert!(op_norm(&(s - &p)) < 1e-12);
        }
    }

    #[test]
    fn polar_trivial_cases() {
        let tol = Tolerances::default();
        let p = left_polar(&identity(2), &tol).unwrap();
        assert!(max_abs_diff(&p.unitary, &identity(2)) < 1e-15);
        assert!(max_abs_diff(&p.positive, &identity(2)) < 1e-15);
        let p = left_polar(&identity(2).scale(2.0), &tol).unwrap();
        assert!(max_abs_diff(&p.unitary, &identity(2)) < 1e-15);
        assert!(max_abs_diff(&p.positive, &identity(2).scale(2.0)) < 1e-14);
    }

    #[test]
    fn polar_reconstructs_random() {
        let tol = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for l in 1..=5 {
            let a = random_matrix(&mut rng, l);
            let p = left_polar(&a, &tol).unwrap();
            assert!(unitarity_defect(&p.unitary) < 1e-12);
            assert!(op_norm(&(&p.unitary * &p.positive - &a)) < 1e-12);
            let expected = principal_sqrt(&(a.adjoint() * &a), &tol).unwrap();
            assert!(op_norm(&(&p.positive - expected)) < 1e-12);
            assert!(op_norm(&(p.left_positive() - abs_left(&a))) < 1e-12);
        }
        assert!(matches!(
            left_polar(&diag(&[1.0, 0.0]), &tol),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn completion_places_frame_last() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for k in 0..=3 {
            let w = orthonormalize(&CMatrix::from_fn(3, k, |_, _| {
                c64(rng.random(), rng.random())
            }))
            .unwrap();
            let q = complete_with_frame_last(&w);
            assert!(unitarity_defect(&q) < 1e-13);
            let last = q.columns(3 - k, k).into_owned();
            assert!(principal_angle(&last, &w) < 1e-12);
        }
    }

    #[test]
    fn kernel_of_rank_one() {
        let v = CMatrix::from_column_slice(2, 1, &[c64(1.0, 0.0), c64(1.0, 0.0)]);
        let w = &v * v.adjoint();
        let k = kernel_frame(&w, 1e-10);
        assert_eq!(k.ncols(), 1);
        assert!((k[(0, 0)] + k[(1, 0)]).norm() < 1e-14);
        assert_eq!(kernel_frame(&zeros(3), 1e-10).ncols(), 3);
        assert_eq!(rank(&w, 1e-10), 1);
    }
}
