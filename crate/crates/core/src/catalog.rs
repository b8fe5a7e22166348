//! Test measures with known or well-understood behavior.

use crate::error::Result;
use crate::linalg::{c64, identity, CMatrix};
use crate::measure::{Density, Edge, MatrixMeasure, ScalarDensity};

/// Free case: the semicircle law times the identity.
pub fn free(dim: usize) -> Result<MatrixMeasure> {
    MatrixMeasure::builder(Density::Scalar {
        density: ScalarDensity::semicircle(),
        dim,
    })
    .build()
}

/// Arcsine law times the identity.
pub fn arcsine(dim: usize) -> Result<MatrixMeasure> {
    MatrixMeasure::builder(Density::Scalar {
        density: ScalarDensity::arcsine(),
        dim,
    })
    .build()
}

/// Scalar semicircle with a mass of weight 1/2 at `E = 2.5`, renormalized.
pub fn free_with_mass() -> Result<MatrixMeasure> {
    MatrixMeasure::builder(Density::Scalar {
        density: ScalarDensity::semicircle(),
        dim: 1,
    })
    .mass(2.5, identity(1).scale(0.5))
    .build()
}

/// Rank-one vector `(1, 1) / sqrt(2)` scaled by `weight`, as a projector mass.
fn rank_one(weight: f64) -> CMatrix {
    let v = CMatrix::from_column_slice(2, 1, &[c64(1.0, 0.0), c64(1.0, 0.0)]).unscale(2f64.sqrt());
    (&v * v.adjoint()).scale(weight)
}

/// 2x2 semicircle with a rank-one mass at `E = 2.5`, renormalized.
pub fn free_with_rank_one_mass() -> Result<MatrixMeasure> {
    MatrixMeasure::builder(Density::Scalar {
        density: ScalarDensity::semicircle(),
        dim: 2,
    })
    .mass(2.5, rank_one(0.5))
    .build()
}

/// `diag(semicircle, arcsine)`.
pub fn block_free_arcsine() -> Result<MatrixMeasure> {
    MatrixMeasure::builder(Density::Diagonal {
        entries: vec![ScalarDensity::semicircle(), ScalarDensity::arcsine()],
        unitary: identity(2),
    })
    .build()
}

/// Semicircle and perturbed arcsine entries rotated by an `x`-dependent angle.
pub fn twisted() -> Result<MatrixMeasure> {
    MatrixMeasure::builder(Density::Twisted {
        entries: [
            ScalarDensity::new(Edge::Semicircle, vec![1.0, 0.2]),
            ScalarDensity::new(Edge::Arcsine, vec![1.0, -0.1]),
        ],
        rate: 0.3,
    })
    .build()
}

/// Matrix-polynomial perturbation of the semicircle with a mass at `E = -3`.
pub fn perturbed_with_mass() -> Result<MatrixMeasure> {
    let c0 = crate::linalg::from_rows(&[vec![1.0, 0.3], vec![0.3, 1.0]], None);
    let c1 = crate::linalg::from_rows(
        &[vec![0.2, 0.0], vec![0.0, -0.1]],
        Some(&[vec![0.0, 0.05], vec![-0.05, 0.0]]),
    );
    MatrixMeasure::builder(Density::MatrixPolynomial {
        edge: Edge::Semicircle,
        coeffs: vec![c0, c1],
    })
    .mass(-3.0, rank_one(0.3))
    .build()
}

/// Every shipped measure with a short name.
pub fn shipped() -> Result<Vec<(&'static str, MatrixMeasure)>> {
    Ok(vec![
        ("free", free(1)?),
        ("arcsine", arcsine(1)?),
        ("free+mass", free_with_mass()?),
        ("free2+rank1", free_with_rank_one_mass()?),
        ("free(+)arcsine", block_free_arcsine()?),
        ("twisted", twisted()?),
        ("perturbed+mass", perturbed_with_mass()?),
    ])
}
