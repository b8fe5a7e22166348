//! The limit function `L(z) = 2^{-1/2} G(z)^{-1} B(z) V` and checks of the
//! convergence `z^n p_n(z + 1/z) -> L(z)` for type-2 polynomials.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use serde::Serialize;

use crate::blaschke::{
    construct_product, isolation_scale, residue_kernel, BlaschkePotapovProduct, PoleState,
};
use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigen, inverse, kernel_frame, left_polar, op_norm, orthonormalize, principal_angle,
    CMatrix, MatField, C64,
};
use crate::measure::{BoundState, MatrixMeasure};
use crate::moprl::{BlockJacobi, NormType, PolySequence};
use crate::sampling::{mirror, BoundarySampling};
use crate::szego::{spectral_factorize, FactorConfig, OuterFunction};

#[derive(Debug, Clone)]
pub struct LimitFunction {
    pub g: OuterFunction,
    pub b: BlaschkePotapovProduct,
    pub v: CMatrix,
}

impl LimitFunction {
    pub fn eval(&self, z: C64) -> Result<CMatrix> {
        let g_inv = inverse(&self.g.eval(z))?;
        Ok(g_inv * self.b.eval(z)? * &self.v * C64::new(FRAC_1_SQRT_2, 0.0))
    }

    /// `L(z)^{-1} = sqrt(2) V^* B(z)^{-1} G(z)`.
    pub fn eval_inverse(&self, z: C64) -> Result<CMatrix> {
        Ok(self.v.adjoint() * self.b.eval_inverse(z)? * self.g.eval(z) * C64::new(SQRT_2, 0.0))
    }

    pub fn at_zero(&self) -> CMatrix {
        self.eval(C64::new(0.0, 0.0)).expect("G(0) invertible")
    }
}

/// Everything built from a measure on the way to `L`.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub states: Vec<BoundState>,
    pub weight: BoundarySampling,
    pub limit: LimitFunction,
    /// `max ||G^* G - w||` on the grid.
    pub factor_residual: f64,
    /// Angle between `ker res L^{-1}` and `ker w_k` per bound state.
    pub kernel_angles: Vec<f64>,
}

/// Factorizes the weight, builds the Blaschke–Potapov product with
/// `V_k = G(z_k) ker w_k`, and fixes the constant unitary making `L(0) > 0`.
pub fn build_pipeline(mu: &MatrixMeasure, cfg: &FactorConfig) -> Result<Pipeline> {
    let tol = mu.tolerances();
    let l = mu.dim();
    let weight = mu.szego_weight()?;
    let g = spectral_factorize(&weight, cfg, tol)?;
    let factor_residual = g.residual(&weight);
    let states = mu.bound_states();

    let mut poles = Vec::with_capacity(states.len());
    let mut kernels = Vec::with_capacity(states.len());
    for s in &states {
        let ker = kernel_frame(&s.weight, tol.rank);
        let frame = if ker.ncols() == 0 {
            ker.clone()
        } else {
            orthonormalize(&(g.eval(s.z) * &ker))?
        };
        poles.push(PoleState { z: s.z, frame });
        kernels.push(ker);
    }
    let b = construct_product(l, &poles)?;

    // C = 2^{-1/2} G(0)^{-1} B(0) = U P, so C U^* = U P U^* is positive.
    let c = inverse(g.g0())? * b.eval(C64::new(0.0, 0.0))? * C64::new(FRAC_1_SQRT_2, 0.0);
    let v = left_polar(&c, tol)?.unitary.adjoint();
    let limit = LimitFunction { g, b, v };

    let zs: Vec<C64> = states.iter().map(|s| s.z).collect();
    let mut kernel_angles = Vec::with_capacity(states.len());
    for (k, s) in states.iter().enumerate() {
        let rk = residue_kernel(|z| limit.eval_inverse(z), s.z, isolation_scale(&zs, k))?;
        let angle = principal_angle(&rk.kernel, &kernels[k]);
        if !(angle < 1e-6) {
            return Err(Error::KernelMismatch {
                index: k + 1,
                angle,
            });
        }
        kernel_angles.push(angle);
    }

    Ok(Pipeline {
        states,
        weight,
        limit,
        factor_residual,
        kernel_angles,
    })
}

/// Points of the polar grid: 24 angles times 10 radii `r sin(pi i / 18)`.
pub fn polar_grid(r: f64) -> Vec<C64> {
    let mut out = Vec::with_capacity(240);
    for i in 0..10 {
        let rad = r * (PI * i as f64 / 18.0).sin();
        for j in 0..24 {
            out.push(C64::from_polar(rad, 2.0 * PI * j as f64 / 24.0));
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct PointwiseRow {
    pub n: usize,
    /// `sup ||z^n p_n(z + 1/z) - L(z)||` over the polar grid.
    pub sup_error: f64,
    /// `||kappa_n - L(0)||`.
    pub kappa_error: f64,
}

/// Sup-errors of type-2 scaled polynomials against `L` on `|z| <= r`.
pub fn verify_pointwise(
    jacobi: &BlockJacobi,
    limit: &LimitFunction,
    n_list: &[usize],
    r: f64,
) -> Result<Vec<PointwiseRow>> {
    if r > 0.9 {
        return Err(Error::RadiusExceeded {
            modulus: r,
            limit: 0.9,
        });
    }
    let grid = polar_grid(r);
    let targets: Vec<CMatrix> = grid.iter().map(|&z| limit.eval(z)).collect::<Result<_>>()?;
    let l0 = limit.at_zero();
    n_list
        .iter()
        .map(|&n| {
            let mut sup: f64 = 0.0;
            for (z, t) in grid.iter().zip(&targets) {
                sup = sup.max(op_norm(&(jacobi.eval_scaled(n, *z)? - t)));
            }
            let kappa = jacobi.leading_coeff(n)?;
            Ok(PointwiseRow {
                n,
                sup_error: sup,
                kappa_error: op_norm(&(kappa - &l0)),
            })
        })
        .collect()
}

/// `|| G p~_n - 2^{-1/2} (e^{-in theta} B(theta) + e^{in theta} s(theta) B(-theta)) V ||_{2,2}`
/// on the factorization grid, for a type-2 sequence on the same grid.
pub fn verify_l2(seq: &PolySequence, limit: &LimitFunction, n: usize) -> Result<f64> {
    let g = limit.g.boundary();
    let count = g.node_count();
    let d = seq.discretization();
    if d.ac_len * 2 != count {
        return Err(Error::DimensionMismatch {
            expected: count,
            found: d.ac_len * 2,
        });
    }
    if n > seq.max_degree() {
        return Err(Error::DepthExceeded {
            requested: n,
            available: seq.max_degree(),
        });
    }
    let s = limit.g.s_function()?;
    let half = count / 2;
    let l = seq.dim();
    let mut b_vals = Vec::with_capacity(count);
    for m in 0..count {
        b_vals.push(limit.b.eval(C64::from_polar(1.0, g.theta(m)))?);
    }
    let values = seq.values(n);
    let field = MatField::from_fn(l, count, |m| {
        let idx = if m >= half {
            m - half
        } else {
            mirror(m, count) - half
        };
        let t = g.theta(m);
        let lhs = g.value(m) * values.get(idx);
        let e = C64::from_polar(1.0, -(n as f64) * t);
        let rhs = (&b_vals[m] * e + s.value(m) * &b_vals[mirror(m, count)] * e.conj()) * &limit.v;
        lhs - rhs * C64::new(FRAC_1_SQRT_2, 0.0)
    });
    Ok(BoundarySampling::new(field)?.norm_l2_2())
}

#[derive(Debug, Clone, Serialize)]
pub struct MassRow {
    pub n: usize,
    /// `|| sum_j p_n(E_j)^* w_j p_n(E_j) ||`.
    pub value: f64,
    /// `max_j || w_j^{1/2} p_n(E_j) ||`.
    pub max_root_norm: f64,
}

/// Singular-part norms of `p_n` for each `n` in `n_list`.
pub fn verify_masses(seq: &PolySequence, n_list: &[usize]) -> Result<Vec<MassRow>> {
    let l = seq.dim();
    n_list
        .iter()
        .map(|&n| {
            if n > seq.max_degree() {
                return Err(Error::DepthExceeded {
                    requested: n,
                    available: seq.max_degree(),
                });
            }
            let mut sum = CMatrix::zeros(l, l);
            let mut max_root: f64 = 0.0;
            for r in seq.mass_roots(n) {
                sum += r.adjoint() * &r;
                max_root = max_root.max(op_norm(&r));
            }
            Ok(MassRow {
                n,
                value: op_norm(&sum),
                max_root_norm: max_root,
            })
        })
        .collect()
}

/// Least-squares slope of `log value` against `n` over the last half of the rows.
pub fn fit_log_slope(rows: &[MassRow]) -> Option<f64> {
    let tail: Vec<(f64, f64)> = rows[rows.len() / 2..]
        .iter()
        .filter(|r| r.value > 0.0)
        .map(|r| (r.n as f64, r.value.ln()))
        .collect();
    if tail.len() < 2 {
        return None;
    }
    let k = tail.len() as f64;
    let mx = tail.iter().map(|p| p.0).sum::<f64>() / k;
    let my = tail.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = tail.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = tail.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

#[derive(Debug, Clone, Serialize)]
pub struct HRow {
    pub n: usize,
    /// Eigenvalues of the positive polar part of `H_n`, ascending.
    pub eigenvalues: Vec<f64>,
    pub log_det: f64,
    /// `||Theta_n - V||` for the unitary polar part `Theta_n`.
    pub unitary_defect: f64,
}

/// `H_n = sqrt(2) B(0)^{-1} G(0) kappa_n` for type-2 `kappa_n`.
///
/// `H_n = P_n Theta_n` (left polar, `P_n = sqrt(H_n H_n^*)`). Since
/// `kappa_n -> L(0)` the product tends to `V`, so `P_n -> 1` and `Theta_n -> V`.
pub fn h_diagnostic(
    jacobi: &BlockJacobi,
    limit: &LimitFunction,
    n_list: &[usize],
) -> Result<Vec<HRow>> {
    if jacobi.norm_type() != NormType::Type2 {
        return Err(Error::Validation(
            "H_n diagnostic needs type-2 Jacobi data".into(),
        ));
    }
    let zero = C64::new(0.0, 0.0);
    let pre = inverse(&limit.b.eval(zero)?)? * limit.g.g0() * C64::new(SQRT_2, 0.0);
    let tol = crate::linalg::Tolerances::default();
    n_list
        .iter()
        .map(|&n| {
            let h = &pre * jacobi.leading_coeff(n)?;
            let polar = left_polar(&h, &tol)?;
            let (eigenvalues, _) = hermitian_eigen(&polar.left_positive());
            Ok(HRow {
                n,
                eigenvalues,
                log_det: crate::linalg::det(&h).norm().ln(),
                unitary_defect: op_norm(&(&polar.unitary - &limit.v)),
            })
        })
        .collect()
}

/// Verification results for a list of degrees.
#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticsReport {
    pub n_values: Vec<usize>,
    pub radius: f64,
    pub pointwise: Vec<PointwiseRow>,
    pub l2_residuals: Vec<f64>,
    pub masses: Vec<MassRow>,
    pub h: Vec<HRow>,
}

/// Runs every check, converting `seq` to type 2 first if needed.
pub fn asymptotics_report(
    pipeline: &Pipeline,
    seq: &PolySequence,
    n_list: &[usize],
    radius: f64,
) -> Result<AsymptoticsReport> {
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Validation(
            "n values must be strictly increasing".into(),
        ));
    }
    let seq2 = if seq.jacobi().norm_type() == NormType::Type2 {
        seq.clone()
    } else {
        seq.to_type(NormType::Type2).0
    };
    let limit = &pipeline.limit;
    let pointwise = verify_pointwise(seq2.jacobi(), limit, n_list, radius)?;
    let l2_residuals = n_list
        .iter()
        .map(|&n| verify_l2(&seq2, limit, n))
        .collect::<Result<_>>()?;
    let masses = verify_masses(&seq2, n_list)?;
    let h = h_diagnostic(seq2.jacobi(), limit, n_list)?;
    Ok(AsymptoticsReport {
        n_values: n_list.to_vec(),
        radius,
        pointwise,
        l2_residuals,
        masses,
        h,
    })
}
