//! Shared inputs for the benchmarks in `benches/`.

use szego_core::linalg::{c64, orthonormalize};
use szego_core::{catalog, CMatrix, MatrixMeasure, PoleState, C64};

/// The shipped measures, built once.
pub fn measures() -> Vec<(&'static str, MatrixMeasure)> {
    catalog::shipped().expect("shipped measures are valid")
}

/// `count` poles on a spiral inside `|z| < 0.9`, each with a one-dimensional subspace of C^dim.
pub fn spiral_poles(dim: usize, count: usize) -> Vec<PoleState> {
    (0..count)
        .map(|k| {
            let t = k as f64 + 1.0;
            let z = C64::from_polar(0.9 * t / (count as f64 + 1.0), 2.4 * t);
            let v = CMatrix::from_fn(dim, 1, |i, _| {
                c64(1.0 + i as f64, (t * (i as f64 + 1.0)).sin())
            });
            PoleState {
                z,
                frame: orthonormalize(&v).expect("nonzero vector"),
            }
        })
        .collect()
}
