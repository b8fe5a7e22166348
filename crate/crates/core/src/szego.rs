//! Matrix outer factorization `G(e^{i theta})^* G(e^{i theta}) = w(theta)`.
//!
//! The factor is built in three stages.
//!
//! 1. Edge deflation. A weight obtained from a density with square-root edges
//!    vanishes quadratically at `theta = 0` and/or `theta = pi` along some
//!    directions. Those zeros are removed exactly by factors
//!    `E(z) = (1 - P) + (1 -+ z) P` with `P` the projector onto the vanishing
//!    directions, leaving a weight that is bounded below.
//! 2. A block-Toeplitz Cholesky (Bauer) on the deflated weight's Fourier
//!    coefficients gives a first guess.
//! 3. Wilson's Newton iteration `G <- (1 + [G^{-*} w G^{-1} - 1]_+) G`, where
//!    `[.]_+` keeps the analytic part with half the constant term, drives the
//!    residual to rounding level.
//!
//! The product is rotated on the left so that `G(0)` is Hermitian positive
//! definite.

use crate::error::{Error, Result};
use crate::linalg::{
    det, hermitian_eigen, hermitian_part, identity, inverse, left_polar, op_norm, projector,
    CMatrix, MatField, Tolerances, C64,
};
use crate::sampling::{mirror, BoundarySampling, FourierCoefficients};

/// Settings for [`spectral_factorize`].
#[derive(Debug, Clone, Default)]
pub struct FactorConfig {
    /// Number `K` of analytic coefficients kept; defaults to `M / 8`.
    pub order: Option<usize>,
    /// Block count of the Toeplitz matrix; defaults to `min(4K, 64)`.
    pub toeplitz_blocks: Option<usize>,
    /// Upper bound on Newton sweeps; defaults to 12.
    pub max_sweeps: Option<usize>,
    /// Replace the Toeplitz start by explicit coefficients of the deflated factor.
    pub initial: Option<Vec<CMatrix>>,
}

/// Analytic factor `G(z) = sum_k G_k z^k` with `G_0` Hermitian positive definite.
#[derive(Debug, Clone)]
pub struct OuterFunction {
    coeffs: Vec<CMatrix>,
    boundary: BoundarySampling,
    /// Edge factors split off before the Newton stage.
    pub deflations: usize,
    /// Newton sweeps performed.
    pub sweeps: usize,
}

impl OuterFunction {
    /// Wraps explicit coefficients, sampled on a `node_count` grid.
    pub fn from_coefficients(coeffs: Vec<CMatrix>, node_count: usize) -> Result<Self> {
        crate::sampling::check_node_count(node_count)?;
        if coeffs.is_empty() {
            return Err(Error::Validation(
                "outer function needs at least one coefficient".into(),
            ));
        }
        if coeffs.len() > node_count / 2 {
            return Err(Error::AliasedIndex {
                index: coeffs.len() as i64 - 1,
                nodes: node_count,
            });
        }
        let boundary = synthesize(&coeffs, node_count);
        Ok(OuterFunction {
            coeffs,
            boundary,
            deflations: 0,
            sweeps: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.coeffs[0].nrows()
    }

    /// Highest retained power.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[CMatrix] {
        &self.coeffs
    }

    pub fn g0(&self) -> &CMatrix {
        &self.coeffs[0]
    }

    pub fn boundary(&self) -> &BoundarySampling {
        &self.boundary
    }

    /// Power series at any point, no radius check.
    pub fn eval(&self, z: C64) -> CMatrix {
        let l = self.dim();
        self.coeffs
            .iter()
            .rev()
            .fold(CMatrix::zeros(l, l), |acc, c| acc * z + c)
    }

    /// `G(z)` for `|z| <= 0.99`.
    pub fn eval_interior(&self, z: C64) -> Result<CMatrix> {
        if z.norm() > 0.99 {
            return Err(Error::RadiusExceeded {
                modulus: z.norm(),
                limit: 0.99,
            });
        }
        Ok(self.eval(z))
    }

    /// `||G_K|| |z|^K / (1 - |z|)`.
    pub fn truncation_bound(&self, z: C64) -> f64 {
        let r = z.norm();
        op_norm(&self.coeffs[self.order()]) * r.powi(self.order() as i32) / (1.0 - r)
    }

    /// `max_m ||G(theta_m)^* G(theta_m) - w(theta_m)||`.
    pub fn residual(&self, w: &BoundarySampling) -> f64 {
        (0..w.node_count())
            .map(|m| {
                let g = self.boundary.value(m);
                op_norm(&(g.adjoint() * g - w.value(m)))
            })
            .fold(0.0, f64::max)
    }

    /// Largest `||c_{-n}||` of the boundary samples for `1 <= n <= M/4`.
    pub fn negative_leakage(&self) -> f64 {
        let c = self.boundary.fourier_coefficients();
        let quarter = (self.boundary.node_count() / 4) as i64;
        c.max_norm((1..=quarter).map(|n| -n))
    }

    /// `int log |det G| dtheta / 2 pi` with a Richardson error estimate.
    ///
    /// Means on the `M` and `2M` midpoint grids are combined as
    /// `2 I_{2M} - I_M`, which removes the `O(1/M)` error from zeros of
    /// `det G` at `theta = 0, pi`.
    pub fn log_det_mean(&self) -> (f64, f64) {
        let m = self.boundary.node_count();
        let coarse = mean_log_det(&self.boundary);
        let fine = mean_log_det(&synthesize(&self.coeffs, 2 * m));
        (2.0 * fine - coarse, (fine - coarse).abs())
    }

    /// `|log |det G(0)| - int log |det G| dtheta / 2 pi|`; zero iff `det G` is outer.
    pub fn det_szego_check(&self) -> f64 {
        let at_zero = det(&self.coeffs[0]).norm().ln();
        (at_zero - self.log_det_mean().0).abs()
    }

    /// `s(theta) = G(theta) G(-theta)^{-1}`.
    pub fn s_function(&self) -> Result<BoundarySampling> {
        let count = self.boundary.node_count();
        let tol = Tolerances::default();
        let mut out = MatField::zeros(self.dim(), count);
        for m in 0..count {
            let g_minus = self.boundary.value(mirror(m, count));
            let s = crate::linalg::singular_values(&g_minus);
            if !(s[s.len() - 1] > tol.sing * s[0]) {
                return Err(Error::SingularBoundary {
                    node: mirror(m, count),
                });
            }
            let inv = inverse(&g_minus).map_err(|_| Error::SingularBoundary {
                node: mirror(m, count),
            })?;
            out.set(m, &(self.boundary.value(m) * inv));
        }
        BoundarySampling::new(out)
    }

    /// Smallest `|det G(z)|` over a polar grid of radius `r`.
    pub fn min_det_on_disk(&self, r: f64) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..=8 {
            let rad = r * i as f64 / 8.0;
            for j in 0..32 {
                let z = C64::from_polar(rad, 2.0 * std::f64::consts::PI * j as f64 / 32.0);
                best = best.min(det(&self.eval(z)).norm());
            }
        }
        best
    }
}

fn mean_log_det(samples: &BoundarySampling) -> f64 {
    let sum: f64 = samples.values().iter().map(|g| det(&g).norm().ln()).sum();
    sum / samples.node_count() as f64
}

fn synthesize(coeffs: &[CMatrix], count: usize) -> BoundarySampling {
    let l = coeffs[0].nrows();
    let mut c = FourierCoefficients::zeros(l, count);
    for (k, g) in coeffs.iter().enumerate() {
        c.set(k as i64, g);
    }
    BoundarySampling::from_coefficients(&c)
}

/// Computes the canonical outer factor of a positive definite weight.
pub fn spectral_factorize(
    w: &BoundarySampling,
    cfg: &FactorConfig,
    tol: &Tolerances,
) -> Result<OuterFunction> {
    let count = w.node_count();
    let l = w.dim();
    let order = cfg.order.unwrap_or(count / 8).clamp(1, count / 2 - 8);
    let blocks = cfg.toeplitz_blocks.unwrap_or((4 * order).min(64)).max(2);
    let max_sweeps = cfg.max_sweeps.unwrap_or(12);

    let w_max = w.sup_norm();
    for m in 0..count {
        let v = w.value(m);
        let min = hermitian_eigen(&v).0[0];
        if !(min > tol.pd_floor * w_max) || !v.iter().all(|x| x.is_finite()) {
            return Err(Error::NotPD {
                node: m,
                det: det(&v).re,
            });
        }
    }

    let (deflated, edges) = deflate_edges(w);
    let target = tol.fact * w_max;

    let mut coeffs = match &cfg.initial {
        Some(init) => init.clone(),
        None => bauer(
            &deflated.fourier_coefficients(),
            blocks,
            order.min(blocks / 2),
        )?,
    };
    coeffs.truncate(order + 1);
    let mut g = synthesize(&coeffs, count);

    let eye = identity(l);
    let mut best = (f64::INFINITY, g.clone());
    let mut sweeps = 0;
    for _ in 0..max_sweeps {
        sweeps += 1;
        let mut inv = Vec::with_capacity(count);
        for m in 0..count {
            inv.push(inverse(&g.value(m))?);
        }
        let s = BoundarySampling::new(MatField::from_fn(l, count, |m| {
            hermitian_part(&(inv[m].adjoint() * deflated.value(m) * &inv[m])) - &eye
        }))?;
        let sc = s.fourier_coefficients();
        let mut phi = FourierCoefficients::zeros(l, count);
        phi.set(0, &sc.get(0).scale(0.5));
        for k in 1..(count / 2) as i64 {
            phi.set(k, &sc.get(k));
        }
        let phi = BoundarySampling::from_coefficients(&phi);
        let updated = BoundarySampling::new(MatField::from_fn(l, count, |m| {
            (&eye + phi.value(m)) * g.value(m)
        }))?;
        let gc = updated.fourier_coefficients();
        coeffs = (0..=order as i64).map(|k| gc.get(k)).collect();
        g = synthesize(&coeffs, count);

        let res = (0..count)
            .map(|m| {
                let v = g.value(m);
                op_norm(&(v.adjoint() * v - deflated.value(m)))
            })
            .fold(0.0, f64::max);
        let improved = res < 0.5 * best.0;
        if res < best.0 {
            best = (res, g.clone());
        }
        if res < 1e-3 * target || (!improved && best.0 < target) {
            break;
        }
    }
    let g_hat = best.1;

    // Recombine with the edge factors and rotate G(0) to be Hermitian positive definite.
    let g0_hat = g_hat.fourier_coeff(0)?;
    let omega = left_polar(&g0_hat, tol)?.unitary.adjoint();
    let full = BoundarySampling::new(MatField::from_fn(l, count, |m| {
        &omega * g_hat.value(m) * edge_product(&edges, l, g_hat.theta(m))
    }))?;
    let fc = full.fourier_coefficients();
    let mut coeffs: Vec<CMatrix> = (0..=(order + edges.len()) as i64)
        .map(|k| fc.get(k))
        .collect();
    coeffs[0] = hermitian_part(&coeffs[0]);
    let mut out = OuterFunction::from_coefficients(coeffs, count)?;
    out.deflations = edges.len();
    out.sweeps = sweeps;

    let residual = out.residual(w);
    if !(residual <= target) {
        return Err(Error::NoConvergence {
            best_residual: residual,
        });
    }
    Ok(out)
}

/// A factor `(1 - P) + (1 - z / root) P` with `root = +-1`.
#[derive(Debug, Clone)]
struct EdgeFactor {
    projector: CMatrix,
    root: f64,
}

impl EdgeFactor {
    fn eval(&self, z: C64) -> CMatrix {
        let l = self.projector.nrows();
        let scale = C64::new(1.0, 0.0) - z / self.root;
        (identity(l) - &self.projector) + &self.projector * scale
    }
}

/// `E_r(z) ... E_1(z)` on the unit circle.
fn edge_product(edges: &[EdgeFactor], l: usize, theta: f64) -> CMatrix {
    let z = C64::from_polar(1.0, theta);
    edges.iter().fold(identity(l), |acc, e| e.eval(z) * acc)
}

/// Removes quadratic zeros at `theta = pi` and `theta = 0`, alternating up to
/// four rounds, and returns the deflated weight and the factors split off.
fn deflate_edges(w: &BoundarySampling) -> (BoundarySampling, Vec<EdgeFactor>) {
    let count = w.node_count();
    let half = count / 2;
    let mut cur = w.clone();
    let mut edges = Vec::new();
    for _ in 0..4 {
        let mut changed = false;
        // Nodes nearest theta = pi (and their mirrors), then theta = 0.
        for (root, near, far) in [
            (-1.0, (count - 1, 0), (count - 2, 1)),
            (1.0, (half, half - 1), (half + 1, half - 2)),
        ] {
            if let Some(p) = vanishing_projector(&cur, near, far) {
                let e = EdgeFactor { projector: p, root };
                cur = cur.map(|m, v| {
                    let inv =
                        inverse(&e.eval(C64::from_polar(1.0, w.theta(m)))).expect("off the root");
                    hermitian_part(&(inv.adjoint() * v * &inv))
                });
                edges.push(e);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    (cur, edges)
}

/// Projector onto the directions in which `w` vanishes quadratically at an edge.
///
/// A direction counts as vanishing when its Rayleigh quotient grows by more
/// than 4 from the nearest node pair to the next (a quadratic zero gives 9).
/// The projector at the edge itself is extrapolated from the two pairs.
fn vanishing_projector(
    w: &BoundarySampling,
    near: (usize, usize),
    far: (usize, usize),
) -> Option<CMatrix> {
    let avg = |p: (usize, usize)| (w.value(p.0) + w.value(p.1)).scale(0.5);
    let wa = avg(near);
    let wb = avg(far);
    let (lam, vecs) = hermitian_eigen(&wa);
    let l = lam.len();
    let r = (0..l)
        .filter(|&j| {
            let v = vecs.column(j);
            let q = (v.adjoint() * &wb * v)[(0, 0)].re;
            q > 4.0 * lam[j]
        })
        .count();
    if r == 0 {
        return None;
    }
    let low = |a: &CMatrix| {
        let (_, v) = hermitian_eigen(a);
        projector(&v.columns(0, r).into_owned())
    };
    let p_near = (low(&w.value(near.0)) + low(&w.value(near.1))).scale(0.5);
    let p_far = (low(&w.value(far.0)) + low(&w.value(far.1))).scale(0.5);
    // Nodes sit at distance h and 3h from the edge; error is O(h^2).
    let p = (p_near.scale(9.0) - p_far).scale(1.0 / 8.0);
    let (_, v) = hermitian_eigen(&p);
    Some(projector(&v.columns(l - r, r).into_owned()))
}

/// Block-Toeplitz Cholesky start: the last block column of the upper
/// Cholesky factor, read bottom-up, approximates `G_0, G_1, ...`.
fn bauer(c: &FourierCoefficients, blocks: usize, order: usize) -> Result<Vec<CMatrix>> {
    let l = c.dim();
    let n = blocks.min(c.node_count() / 2);
    let mut t = CMatrix::zeros(n * l, n * l);
    for i in 0..n {
        for j in 0..n {
            let block = c.get(j as i64 - i as i64);
            t.view_mut((i * l, j * l), (l, l)).copy_from(&block);
        }
    }
    let t = hermitian_part(&t);
    let chol = nalgebra::Cholesky::new(t).ok_or(Error::NoConvergence {
        best_residual: f64::INFINITY,
    })?;
    let r = chol.l().adjoint();
    let k = order.min(n - 1);
    Ok((0..=k)
        .map(|j| r.view(((n - 1 - j) * l, (n - 1) * l), (l, l)).into_owned())
        .collect())
}
