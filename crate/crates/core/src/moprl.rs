//! Orthonormal matrix polynomials and block Jacobi parameters.
//!
//! Polynomials satisfy
//! `x p_n(x) = p_{n+1}(x) A_{n+1}^* + p_n(x) B_{n+1} + p_{n-1}(x) A_n`
//! with `p_{-1} = 0`, `p_0 = 1`. Index conventions: `a[0]` is `A_1`,
//! `b[0]` is `B_1`, and `sigma[0]` is `sigma_1 = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_defect, hermitian_eigen, hermitian_part, identity, inverse, kernels, left_polar,
    op_norm, principal_sqrt, qr_positive, unitarity_defect, CMatrix, MatField, Tolerances, C64,
    ONE, ZERO,
};
use crate::measure::{Discretization, MatrixMeasure};

/// Normalization class of a block Jacobi matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormType {
    /// Every `A_n` Hermitian positive definite.
    Type1,
    /// Every product `A_1 ... A_n` Hermitian positive definite.
    Type2,
    /// Every `A_n` lower triangular with positive diagonal.
    Type3,
    Other,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockJacobi {
    dim: usize,
    a: Vec<CMatrix>,
    b: Vec<CMatrix>,
    norm_type: NormType,
}

impl BlockJacobi {
    /// Jacobi data with `a[n-1] = A_n`, `b[n-1] = B_n`.
    pub fn new(a: Vec<CMatrix>, b: Vec<CMatrix>, norm_type: NormType) -> Result<Self> {
        let dim = b.first().or(a.first()).map_or(1, |m| m.nrows());
        for m in a.iter().chain(b.iter()) {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: m.nrows(),
                });
            }
        }
        let j = BlockJacobi {
            dim,
            a,
            b,
            norm_type,
        };
        j.check()?;
        Ok(j)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of `A` blocks available.
    pub fn depth(&self) -> usize {
        self.a.len()
    }

    pub fn norm_type(&self) -> NormType {
        self.norm_type
    }

    /// `A_n`, `n >= 1`.
    pub fn a(&self, n: usize) -> &CMatrix {
        &self.a[n - 1]
    }

    /// `B_n`, `n >= 1`.
    pub fn b(&self, n: usize) -> &CMatrix {
        &self.b[n - 1]
    }

    pub fn a_blocks(&self) -> &[CMatrix] {
        &self.a
    }

    pub fn b_blocks(&self) -> &[CMatrix] {
        &self.b
    }

    /// Validates invertibility, Hermitian `B_n` and the declared type.
    pub fn check(&self) -> Result<()> {
        let tol = Tolerances::default();
        for (i, b) in self.b.iter().enumerate() {
            let d = hermitian_defect(b);
            if d > tol.herm * (1.0 + op_norm(b)) {
                return Err(Error::Validation(format!(
                    "B_{}: not Hermitian (defect {d:.3e})",
                    i + 1
                )));
            }
        }
        let mut prod = identity(self.dim);
        for (i, a) in self.a.iter().enumerate() {
            let n = i + 1;
            left_polar(a, &tol)?;
            match self.norm_type {
                NormType::Type1 => {
                    if !crate::linalg::is_hpd(a, &tol) {
                        return Err(Error::Validation(format!(
                            "A_{n}: not Hermitian positive definite"
                        )));
                    }
                }
                NormType::Type2 => {
                    prod = &prod * a;
                    if !crate::linalg::is_hpd(&prod, &Tolerances { herm: 1e-8, ..tol }) {
                        return Err(Error::Validation(format!(
                            "A_1..A_{n}: product not Hermitian positive definite"
                        )));
                    }
                }
                NormType::Type3 => {
                    let scale = 1e-12 * (1.0 + op_norm(a));
                    for r in 0..self.dim {
                        if !(a[(r, r)].re > 0.0) || a[(r, r)].im.abs() > scale {
                            return Err(Error::Validation(format!("A_{n}: diagonal not positive")));
                        }
                        for c in r + 1..self.dim {
                            if a[(r, c)].norm() > scale {
                                return Err(Error::Validation(format!(
                                    "A_{n}: not lower triangular"
                                )));
                            }
                        }
                    }
                }
                NormType::Other => {}
            }
        }
        Ok(())
    }

    /// Equivalent Jacobi matrix of the requested type and the unitaries
    /// `sigma_n` with `A~_n = sigma_n^* A_n sigma_{n+1}`, `B~_n = sigma_n^* B_n sigma_n`.
    pub fn to_type(&self, target: NormType) -> (BlockJacobi, EquivalenceTransform) {
        let l = self.dim;
        let n_max = self.a.len();
        let mut sigma = vec![identity(l)];
        let tol = Tolerances::default();
        let mut prod = identity(l);
        for n in 1..=n_max {
            let a = &self.a[n - 1];
            let next = match target {
                NormType::Other => identity(l),
                NormType::Type1 => {
                    // sigma_n^* A_n = (U P U^*) U, so sigma_{n+1} = U^*.
                    let x = sigma[n - 1].adjoint() * a;
                    left_polar(&x, &tol)
                        .expect("A_n invertible")
                        .unitary
                        .adjoint()
                }
                NormType::Type2 => {
                    // Left polar A_1..A_n = H_n Theta_n with H_n = sqrt(P P^*).
                    prod = &prod * a;
                    left_polar(&prod, &tol)
                        .expect("A_n invertible")
                        .unitary
                        .adjoint()
                }
                NormType::Type3 => {
                    // (sigma_n^* A_n)^* = Q R, so sigma_n^* A_n Q = R^* is lower triangular.
                    let x = sigma[n - 1].adjoint() * a;
                    qr_positive(&x.adjoint()).0
                }
            };
            sigma.push(next);
        }
        let transform = EquivalenceTransform { sigma };
        (self.transformed(&transform, target), transform)
    }

    /// Applies a given transform.
    pub fn transformed(&self, t: &EquivalenceTransform, norm_type: NormType) -> BlockJacobi {
        let s = &t.sigma;
        let a = (0..self.a.len())
            .map(|i| s[i].adjoint() * &self.a[i] * &s[i + 1])
            .collect();
        let b = (0..self.b.len())
            .map(|i| hermitian_part(&(s[i].adjoint() * &self.b[i] * &s[i])))
            .collect();
        let mut a: Vec<CMatrix> = a;
        if norm_type == NormType::Type3 {
            // Clean rounding above the diagonal and in the diagonal phase.
            for m in a.iter_mut() {
                for r in 0..self.dim {
                    m[(r, r)] = C64::new(m[(r, r)].re, 0.0);
                    for c in r + 1..self.dim {
                        m[(r, c)] = ZERO;
                    }
                }
            }
        }
        BlockJacobi {
            dim: self.dim,
            a,
            b,
            norm_type,
        }
    }

    /// `kappa_n = (A_1^*)^{-1} ... (A_n^*)^{-1}`, the leading coefficient of `p_n`.
    pub fn leading_coeff(&self, n: usize) -> Result<CMatrix> {
        if n > self.a.len() {
            return Err(Error::DepthExceeded {
                requested: n,
                available: self.a.len(),
            });
        }
        let mut k = identity(self.dim);
        for a in &self.a[..n] {
            k *= inverse(&a.adjoint())?;
        }
        Ok(k)
    }

    /// `p_n(zeta)` from the recurrence.
    ///
    /// Iterates are rescaled whenever they grow past `1e100`; the returned
    /// value carries the accumulated scale, so it overflows only if `p_n`
    /// itself does.
    pub fn eval_poly(&self, n: usize, zeta: C64) -> Result<CMatrix> {
        let (v, log_scale) = self.eval_poly_scaled(n, zeta)?;
        Ok(v * C64::new(log_scale.exp(), 0.0))
    }

    /// `p_n(zeta) = value * exp(log_scale)`.
    pub fn eval_poly_scaled(&self, n: usize, zeta: C64) -> Result<(CMatrix, f64)> {
        self.check_depth(n)?;
        let l = self.dim;
        let mut prev = CMatrix::zeros(l, l);
        let mut cur = identity(l);
        let mut log_scale = 0.0;
        for k in 0..n {
            let a_next_inv = inverse(&self.a[k].adjoint())?;
            let mut next = &cur * zeta - &cur * &self.b[k];
            if k > 0 {
                next -= &prev * &self.a[k - 1];
            }
            next *= &a_next_inv;
            prev = cur;
            cur = next;
            let big = cur.iter().map(|v| v.norm()).fold(0.0, f64::max);
            if big > 1e100 {
                let s = C64::new(1.0 / big, 0.0);
                cur *= s;
                prev *= s;
                log_scale += big.ln();
            }
        }
        Ok((cur, log_scale))
    }

    /// `z^n p_n(z + 1/z)`, equal to `kappa_n` at `z = 0`.
    pub fn eval_scaled(&self, n: usize, z: C64) -> Result<CMatrix> {
        self.check_depth(n)?;
        let l = self.dim;
        let mut prev = CMatrix::zeros(l, l);
        let mut cur = identity(l);
        let z2 = z * z;
        let one_plus = ONE + z2;
        for k in 0..n {
            let a_next_inv = inverse(&self.a[k].adjoint())?;
            let mut next = &cur * one_plus - &cur * &self.b[k] * z;
            if k > 0 {
                next -= &prev * &self.a[k - 1] * z2;
            }
            next *= &a_next_inv;
            prev = cur;
            cur = next;
        }
        Ok(cur)
    }

    fn check_depth(&self, n: usize) -> Result<()> {
        if n > self.a.len() {
            return Err(Error::DepthExceeded {
                requested: n,
                available: self.a.len(),
            });
        }
        Ok(())
    }

    /// `||U^* A_n U - A~_n||` and the same for `B`, maximized over levels.
    pub fn conjugation_defect(&self, other: &BlockJacobi, u: &CMatrix) -> f64 {
        let n = self.a.len().min(other.a.len());
        let mut worst: f64 = 0.0;
        for i in 0..n {
            worst = worst.max(op_norm(&(u.adjoint() * &self.a[i] * u - &other.a[i])));
            worst = worst.max(op_norm(&(u.adjoint() * &self.b[i] * u - &other.b[i])));
        }
        worst
    }
}

/// Unitaries `sigma_1 = 1, sigma_2, ...` relating equivalent Jacobi matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceTransform {
    pub sigma: Vec<CMatrix>,
}

impl EquivalenceTransform {
    /// `sigma_n`, `n >= 1`.
    pub fn sigma(&self, n: usize) -> &CMatrix {
        &self.sigma[n - 1]
    }

    pub fn max_unitarity_defect(&self) -> f64 {
        self.sigma.iter().map(unitarity_defect).fold(0.0, f64::max)
    }
}

/// Options for [`stieltjes`].
#[derive(Debug, Clone, Copy)]
pub struct StieltjesOptions {
    /// Full reorthogonalization against all lower degrees every this many steps.
    pub reorth_interval: usize,
}

impl Default for StieltjesOptions {
    fn default() -> Self {
        StieltjesOptions { reorth_interval: 1 }
    }
}

/// Orthonormal polynomials `p_0..p_N` tabulated on the measure's quadrature
/// points, with their Jacobi data.
#[derive(Debug, Clone)]
pub struct PolySequence {
    jacobi: BlockJacobi,
    values: Vec<MatField>,
    discretization: Discretization,
    /// First degree whose orthonormality drift exceeded the tolerance.
    pub drift_warning: Option<usize>,
}

impl PolySequence {
    pub fn jacobi(&self) -> &BlockJacobi {
        &self.jacobi
    }

    pub fn max_degree(&self) -> usize {
        self.values.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.jacobi.dim
    }

    pub fn discretization(&self) -> &Discretization {
        &self.discretization
    }

    /// Values of `p_n` at all quadrature points.
    pub fn values(&self, n: usize) -> &MatField {
        &self.values[n]
    }

    /// `p_n(E_j)` for each point mass.
    pub fn mass_values(&self, n: usize) -> Vec<CMatrix> {
        let d = &self.discretization;
        (d.ac_len..d.len())
            .map(|i| d.true_value(i, &self.values[n].get(i)))
            .collect()
    }

    /// `D_j^{1/2} Q_j^* p_n(E_j)` with `w_j = Q_j D_j Q_j^*`, so that
    /// `p_n(E_j)^* w_j p_n(E_j)` is the Gram matrix of the result.
    pub fn mass_roots(&self, n: usize) -> Vec<CMatrix> {
        let d = &self.discretization;
        (d.ac_len..d.len())
            .map(|i| {
                let w = d.weights.get(i);
                let root = CMatrix::from_diagonal(
                    &w.diagonal().map(|v| C64::new(v.re.max(0.0).sqrt(), 0.0)),
                );
                root * self.values[n].get(i)
            })
            .collect()
    }

    /// `<<p_n, p_m>>`.
    pub fn gram(&self, n: usize, m: usize) -> CMatrix {
        self.discretization.inner(&self.values[n], &self.values[m])
    }

    /// `max ||<<p_n, p_m>> - delta_nm 1||` over all degrees.
    pub fn orthonormality_defect(&self) -> f64 {
        let l = self.dim();
        let mut worst: f64 = 0.0;
        for n in 0..self.values.len() {
            for m in 0..=n {
                let mut g = self.gram(n, m);
                if n == m {
                    g -= identity(l);
                }
                worst = worst.max(op_norm(&g));
            }
        }
        worst
    }

    /// Largest grid residual of the three-term recurrence over absolutely
    /// continuous points.
    pub fn recurrence_residual(&self) -> f64 {
        let d = &self.discretization;
        let j = &self.jacobi;
        let mut worst: f64 = 0.0;
        for n in 0..self.max_degree() {
            let a_next = j.a[n].adjoint();
            for i in 0..d.ac_len {
                let pn = self.values[n].get(i);
                let mut r =
                    pn.scale(d.points[i]) - self.values[n + 1].get(i) * &a_next - &pn * &j.b[n];
                if n > 0 {
                    r -= self.values[n - 1].get(i) * &j.a[n - 1];
                }
                worst = worst.max(r.iter().map(|v| v.norm()).fold(0.0, f64::max));
            }
        }
        worst
    }

    /// The equivalent sequence `p~_n = p_n sigma_{n+1}` of the requested type.
    pub fn to_type(&self, target: NormType) -> (PolySequence, EquivalenceTransform) {
        let (jacobi, t) = self.jacobi.to_type(target);
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(n, v)| v.mul_right(&t.sigma[n]))
            .collect();
        let seq = PolySequence {
            jacobi,
            values,
            discretization: self.discretization.clone(),
            drift_warning: self.drift_warning,
        };
        (seq, t)
    }

    pub fn eval_poly(&self, n: usize, zeta: C64) -> Result<CMatrix> {
        self.jacobi.eval_poly(n, zeta)
    }

    pub fn eval_scaled(&self, n: usize, z: C64) -> Result<CMatrix> {
        self.jacobi.eval_scaled(n, z)
    }

    pub fn leading_coeff(&self, n: usize) -> Result<CMatrix> {
        self.jacobi.leading_coeff(n)
    }
}

/// Runs the Stieltjes procedure to degree `n_max`, producing type-1 data.
pub fn stieltjes(mu: &MatrixMeasure, n_max: usize) -> Result<PolySequence> {
    stieltjes_with(mu, n_max, StieltjesOptions::default())
}

pub fn stieltjes_with(
    mu: &MatrixMeasure,
    n_max: usize,
    opts: StieltjesOptions,
) -> Result<PolySequence> {
    let tol = *mu.tolerances();
    let d = mu.discretization().clone();
    let l = mu.dim();
    let interval = opts.reorth_interval.max(1);

    let mut values: Vec<MatField> = Vec::with_capacity(n_max + 1);
    values.push(d.unit_values());
    let mut a: Vec<CMatrix> = Vec::with_capacity(n_max);
    let mut b: Vec<CMatrix> = Vec::with_capacity(n_max);
    let mut drift_warning = None;

    for n in 0..n_max {
        let pn = &values[n];
        let mut xp = pn.clone();
        for (i, &x) in d.points.iter().enumerate() {
            for v in xp.slot_mut(i) {
                *v *= x;
            }
        }
        let b_next = hermitian_part(&d.inner(pn, &xp));
        let mut q = xp;
        sub_mul_right(&mut q, pn, &b_next);
        if n > 0 {
            sub_mul_right(&mut q, &values[n - 1], &a[n - 1]);
        }
        let lower = if (n + 1) % interval == 0 {
            0
        } else {
            n.saturating_sub(1)
        };
        for k in lower..=n {
            let c = d.inner(&values[k], &q);
            sub_mul_right(&mut q, &values[k], &c);
        }
        let gram = hermitian_part(&d.inner(&q, &q));
        let min = hermitian_eigen(&gram).0[0];
        if !(min >= tol.pos) {
            return Err(Error::LostPositivity {
                degree: n + 1,
                min_eigenvalue: min,
            });
        }
        let a_next = principal_sqrt(&gram, &tol)?;
        let a_inv = inverse(&a_next)?;
        let next = q.mul_right(&a_inv);

        if drift_warning.is_none() {
            let mut drift = op_norm(&(d.inner(&next, &next) - identity(l)));
            drift = drift.max(op_norm(&d.inner(&values[0], &next)));
            if drift > tol.orth {
                drift_warning = Some(n + 1);
            }
        }
        a.push(a_next);
        b.push(b_next);
        values.push(next);
    }

    Ok(PolySequence {
        jacobi: BlockJacobi {
            dim: l,
            a,
            b,
            norm_type: NormType::Type1,
        },
        values,
        discretization: d,
        drift_warning,
    })
}

/// `q[i] -= p[i] * c` at every point.
fn sub_mul_right(q: &mut MatField, p: &MatField, c: &CMatrix) {
    let l = q.dim();
    let cs = c.as_slice();
    for i in 0..q.len() {
        kernels::mul_sub(l, p.slot(i), cs, q.slot_mut(i));
    }
}
