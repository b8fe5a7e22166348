//! Blaschke–Potapov elementary factors and finite products.
//!
//! An elementary factor at `z_j` multiplies `s_j` coordinates (after the
//! unitary change of frame `U_j`) by the scalar Blaschke factor
//! `b(z) = (|z_j| / z_j) (z_j - z) / (1 - conj(z_j) z)` and leaves the
//! remaining `l - s_j` untouched. With the conjugate in the denominator the
//! factor is unitary on the circle for complex `z_j` as well; for the real
//! poles produced by measures the conjugate is a no-op.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{
    complete_with_frame_last, identity, inverse, kernel_frame_with_floor, op_norm, orthonormalize,
    unitarity_defect, CMatrix, C64, ONE, ZERO,
};

#[derive(Debug, Clone, PartialEq)]
pub struct ElementaryFactor {
    pub z: C64,
    pub s: usize,
    pub u: CMatrix,
}

impl ElementaryFactor {
    pub fn new(z: C64, s: usize, u: CMatrix) -> Result<Self> {
        if !(z.norm() < 1.0) || z.norm() == 0.0 {
            return Err(Error::Validation(format!(
                "factor pole {z} must satisfy 0 < |z| < 1"
            )));
        }
        if s > u.nrows() {
            return Err(Error::DimensionMismatch {
                expected: u.nrows(),
                found: s,
            });
        }
        let defect = unitarity_defect(&u);
        if defect > 1e-12 {
            return Err(Error::Validation(format!(
                "factor frame is not unitary (defect {defect:.3e})"
            )));
        }
        Ok(ElementaryFactor { z, s, u })
    }

    pub fn dim(&self) -> usize {
        self.u.nrows()
    }

    /// Scalar Blaschke factor with `b(0) = |z_j|`.
    pub fn scalar(&self, z: C64) -> Result<C64> {
        let den = ONE - self.z.conj() * z;
        if den.norm() < 1e-14 {
            return Err(Error::PoleAtReflection);
        }
        Ok((self.z.norm() / self.z) * (self.z - z) / den)
    }

    /// `U^* (b(z) I_s + (1 - I_s)) U`.
    pub fn eval(&self, z: C64) -> Result<CMatrix> {
        let b = self.scalar(z)?;
        Ok(self.conjugate_diag(b))
    }

    /// `U^* (b(z)^{-1} I_s + (1 - I_s)) U`.
    pub fn eval_inverse(&self, z: C64) -> Result<CMatrix> {
        let b = self.scalar(z)?;
        if b.norm() == 0.0 && self.s > 0 {
            return Err(Error::Singular { sigma_min: 0.0 });
        }
        Ok(self.conjugate_diag(if self.s > 0 { b.inv() } else { ONE }))
    }

    fn conjugate_diag(&self, b: C64) -> CMatrix {
        let l = self.dim();
        let d = CMatrix::from_fn(l, l, |i, j| match (i == j, i < self.s) {
            (true, true) => b,
            (true, false) => ONE,
            _ => ZERO,
        });
        self.u.adjoint() * d * &self.u
    }
}

/// Ordered product `B(z) = B_1(z) B_2(z) ... B_N(z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlaschkePotapovProduct {
    dim: usize,
    factors: Vec<ElementaryFactor>,
}

impl BlaschkePotapovProduct {
    pub fn empty(dim: usize) -> Self {
        BlaschkePotapovProduct {
            dim,
            factors: Vec::new(),
        }
    }

    pub fn from_factors(dim: usize, factors: Vec<ElementaryFactor>) -> Result<Self> {
        for f in &factors {
            if f.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: f.dim(),
                });
            }
        }
        check_distinct(factors.iter().map(|f| f.z))?;
        Ok(BlaschkePotapovProduct { dim, factors })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn factors(&self) -> &[ElementaryFactor] {
        &self.factors
    }

    pub fn eval(&self, z: C64) -> Result<CMatrix> {
        self.eval_prefix(self.factors.len(), z)
    }

    /// `B(z)^{-1} = B_N(z)^{-1} ... B_1(z)^{-1}`.
    pub fn eval_inverse(&self, z: C64) -> Result<CMatrix> {
        let mut acc = identity(self.dim);
        for f in &self.factors {
            acc = f.eval_inverse(z)? * acc;
        }
        Ok(acc)
    }

    /// Product of the first `n` factors.
    fn eval_prefix(&self, n: usize, z: C64) -> Result<CMatrix> {
        let mut acc = identity(self.dim);
        for f in &self.factors[..n] {
            acc *= f.eval(z)?;
        }
        Ok(acc)
    }

    /// `det B(0) = prod |z_k|^{s_k}`.
    pub fn det_at_zero(&self) -> f64 {
        self.factors
            .iter()
            .map(|f| f.z.norm().powi(f.s as i32))
            .product()
    }

    /// Largest `||B^* B - 1||` over `count` equispaced circle points.
    pub fn boundary_unitarity_defect(&self, count: usize) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for m in 0..count {
            let z = C64::from_polar(1.0, -PI + (2 * m + 1) as f64 * PI / count as f64);
            worst = worst.max(unitarity_defect(&self.eval(z)?));
        }
        Ok(worst)
    }
}

fn check_distinct(poles: impl Iterator<Item = C64>) -> Result<()> {
    let poles: Vec<C64> = poles.collect();
    for a in 0..poles.len() {
        for b in a + 1..poles.len() {
            if (poles[a] - poles[b]).norm() < 1e-8 {
                return Err(Error::DuplicatePole {
                    first: a + 1,
                    second: b + 1,
                });
            }
        }
    }
    Ok(())
}

/// A prescribed pole `z` with the target kernel `V` of the residue of `B^{-1}`.
#[derive(Debug, Clone)]
pub struct PoleState {
    pub z: C64,
    /// Orthonormal columns spanning `V`; may have zero columns.
    pub frame: CMatrix,
}

/// Builds the unique product with `ker res_{z_k} B^{-1} = V_k` for each state.
///
/// Factor `n` takes `s_n = l - dim V_n` and a frame change `U_n = [W_perp | W]^*`,
/// where `W` orthonormalizes `B_{n-1}(z_n)^{-1} V_n`.
pub fn construct_product(dim: usize, states: &[PoleState]) -> Result<BlaschkePotapovProduct> {
    check_distinct(states.iter().map(|s| s.z))?;
    let mut product = BlaschkePotapovProduct::empty(dim);
    for state in states {
        if state.frame.nrows() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: state.frame.nrows(),
            });
        }
        let v = orthonormalize(&state.frame)?;
        let k = v.ncols();
        let s = dim - k;
        let prefix_inv = inverse(&product.eval(state.z)?)?;
        let w = orthonormalize(&(prefix_inv * v))?;
        let u = complete_with_frame_last(&w).adjoint();
        product.factors.push(ElementaryFactor::new(state.z, s, u)?);
    }
    Ok(product)
}

/// Residue and residue kernel at an isolated simple pole.
#[derive(Debug, Clone)]
pub struct ResidueKernel {
    pub residue: CMatrix,
    /// Orthonormal frame of `ker R`.
    pub kernel: CMatrix,
}

/// Residue of `f` at `center` by a 64-node trapezoid on `|z - center| = 1e-4 * scale`.
///
/// `scale` is the distance from `center` to the nearest other singularity
/// (or to the unit circle). A second run at half the radius checks that the
/// pole is simple.
pub fn residue_kernel(
    f: impl Fn(C64) -> Result<CMatrix>,
    center: C64,
    scale: f64,
) -> Result<ResidueKernel> {
    const NODES: usize = 64;
    let eps = 1e-4 * scale;
    let ring = |radius: f64| -> Result<(CMatrix, Vec<(C64, CMatrix)>)> {
        let mut samples = Vec::with_capacity(NODES);
        let mut acc: Option<CMatrix> = None;
        for j in 0..NODES {
            let d = C64::from_polar(radius, 2.0 * PI * (j as f64 + 0.5) / NODES as f64);
            let v = f(center + d)?;
            let term = &v * d;
            acc = Some(match acc {
                None => term,
                Some(a) => a + term,
            });
            samples.push((d, v));
        }
        Ok((acc.expect("nodes").unscale(NODES as f64), samples))
    };
    let (r1, s1) = ring(eps)?;
    let (_, s2) = ring(eps / 2.0)?;

    // Pole-subtracted remainder must stay bounded when the radius halves.
    let rem = |s: &[(C64, CMatrix)]| {
        s.iter()
            .map(|(d, v)| op_norm(&(v - &r1 / *d)))
            .fold(0.0, f64::max)
    };
    let m1 = rem(&s1);
    let m2 = rem(&s2);
    let scale_r = op_norm(&r1) / eps + 1.0;
    if m2 > 2.0 * m1 + 1e-8 * scale_r {
        return Err(Error::NotSimplePole {
            growth: m2 / m1.max(f64::MIN_POSITIVE),
        });
    }

    let mean_norm = s1.iter().map(|(_, v)| op_norm(v)).sum::<f64>() / NODES as f64;
    let kernel = kernel_frame_with_floor(&r1, 1e-8, mean_norm * eps);
    Ok(ResidueKernel {
        residue: r1,
        kernel,
    })
}

/// Distance from `z_k` to the nearest other pole and to the unit circle.
pub fn isolation_scale(poles: &[C64], k: usize) -> f64 {
    let z = poles[k];
    poles
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != k)
        .map(|(_, p)| (p - z).norm())
        .fold(1.0 - z.norm(), f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, diag, max_abs_diff, principal_angle};

    fn e(l: usize, i: usize) -> CMatrix {
        CMatrix::from_fn(l, 1, |r, _| if r == i { ONE } else { ZERO })
    }

    #[test]
    fn elementary_values() {
        let f = ElementaryFactor::new(c64(0.5, 0.0), 1, identity(2)).unwrap();
        assert!(max_abs_diff(&f.eval(ZERO).unwrap(), &diag(&[0.5, 1.0])) < 1e-15);
        let full = ElementaryFactor::new(c64(0.3, 0.2), 2, identity(2)).unwrap();
        assert!(op_norm(&full.eval(c64(0.3, 0.2)).unwrap()) < 1e-15);
        for t in [0.1, 1.0, 2.5, -3.0] {
            let v = full.eval(C64::from_polar(1.0, t)).unwrap();
            assert!(unitarity_defect(&v) < 1e-12);
        }
        let g = ElementaryFactor::new(c64(0.5, 0.0), 1, identity(1)).unwrap();
        assert!(matches!(
            g.eval(c64(2.0, 0.0)),
            Err(Error::PoleAtReflection)
        ));
    }

    #[test]
    fn single_state_products() {
        let z = c64(0.5, 0.0);
        let b = construct_product(2, &[PoleState { z, frame: e(2, 1) }]).unwrap();
        assert_eq!(b.factors()[0].s, 1);
        let at = c64(0.2, 0.1);
        let scalar = b.factors()[0].scalar(at).unwrap();
        let expected = CMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => scalar,
            (1, 1) => ONE,
            _ => ZERO,
        });
        assert!(max_abs_diff(&b.eval(at).unwrap(), &expected) < 1e-14);

        let all = construct_product(
            2,
            &[PoleState {
                z,
                frame: identity(2),
            }],
        )
        .unwrap();
        assert_eq!(all.factors()[0].s, 0);
        assert!(max_abs_diff(&all.eval(at).unwrap(), &identity(2)) < 1e-14);

        let swapped = construct_product(2, &[PoleState { z, frame: e(2, 0) }]).unwrap();
        let expected = CMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => ONE,
            (1, 1) => scalar,
            _ => ZERO,
        });
        assert!(max_abs_diff(&swapped.eval(at).unwrap(), &expected) < 1e-14);
    }

    #[test]
    fn residue_kernels() {
        let z1 = c64(0.5, 0.0);
        let f = ElementaryFactor::new(z1, 1, identity(2)).unwrap();
        let rk = residue_kernel(|z| f.eval_inverse(z), z1, 0.5).unwrap();
        assert!(principal_angle(&rk.kernel, &e(2, 1)) < 1e-10);

        let rk = residue_kernel(|_| Ok(diag(&[1.0, 2.0])), z1, 0.5).unwrap();
        assert_eq!(rk.kernel.ncols(), 2);

        let v = orthonormalize(&CMatrix::from_column_slice(
            2,
            1,
            &[c64(1.0, 0.0), c64(0.0, 1.0)],
        ))
        .unwrap();
        let p = &v * v.adjoint();
        let rk = residue_kernel(|z| Ok(&p / (z - z1)), z1, 0.5).unwrap();
        assert!(max_abs_diff(&rk.residue, &p) < 1e-12);
        let complement = crate::linalg::kernel_frame(&p, 1e-10);
        assert!(principal_angle(&rk.kernel, &complement) < 1e-10);

        let double = residue_kernel(|z| Ok(&p / ((z - z1) * (z - z1))), z1, 0.5);
        assert!(matches!(double, Err(Error::NotSimplePole { .. })));
    }

    #[test]
    fn duplicates_rejected() {
        let s = PoleState {
            z: c64(0.5, 0.0),
            frame: e(2, 0),
        };
        assert!(matches!(
            construct_product(2, &[s.clone(), s]),
            Err(Error::DuplicatePole { .. })
        ));
        let bad = PoleState {
            z: c64(0.5, 0.0),
            frame: CMatrix::zeros(2, 1),
        };
        assert!(matches!(
            construct_product(2, &[bad]),
            Err(Error::DegenerateFrame)
        ));
    }

    #[test]
    fn det_at_zero() {
        let b = construct_product(
            2,
            &[
                PoleState {
                    z: c64(0.5, 0.0),
                    frame: e(2, 1),
                },
                PoleState {
                    z: c64(-0.25, 0.0),
                    frame: CMatrix::zeros(2, 0),
                },
            ],
        )
        .unwrap();
        assert!((b.det_at_zero() - 0.5 * 0.25 * 0.25).abs() < 1e-15);
        assert!(
            (crate::linalg::det(&b.eval(ZERO).unwrap()).norm() - b.det_at_zero()).abs() < 1e-14
        );
    }
}
