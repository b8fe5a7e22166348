#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use szego_core::linalg::{hermitian_part, identity, op_norm, orthonormalize};
use szego_core::{BoundarySampling, CMatrix, Density, Edge, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

pub fn unitary(rng: &mut impl Rng, l: usize) -> CMatrix {
    orthonormalize(&matrix(rng, l, l)).expect("full rank with probability one")
}

pub fn hermitian(rng: &mut impl Rng, l: usize) -> CMatrix {
    hermitian_part(&matrix(rng, l, l))
}

/// `X^* X + floor` for random `X`.
pub fn hpd(rng: &mut impl Rng, l: usize, floor: f64) -> CMatrix {
    let x = matrix(rng, l, l);
    hermitian_part(&(x.adjoint() * x)) + identity(l).scale(floor)
}

pub fn sampling(rng: &mut impl Rng, count: usize, l: usize) -> BoundarySampling {
    let vals: Vec<CMatrix> = (0..count).map(|_| matrix(rng, l, l)).collect();
    let mut it = vals.into_iter();
    BoundarySampling::from_fn(count, l, |_| it.next().unwrap()).unwrap()
}

/// `f(theta) = sum_{|k| <= 12} X_k rho^|k| e^{ik theta}`: smooth, with decaying modes.
pub fn smooth_sampling(rng: &mut impl Rng, count: usize, l: usize, rho: f64) -> BoundarySampling {
    let modes: Vec<(i32, CMatrix)> = (-12i32..=12)
        .map(|k| (k, matrix(rng, l, l).scale(rho.powi(k.abs()))))
        .collect();
    BoundarySampling::from_fn(count, l, |t| {
        modes.iter().fold(CMatrix::zeros(l, l), |acc, (k, x)| {
            acc + x * C64::from_polar(1.0, *k as f64 * t)
        })
    })
    .unwrap()
}

/// `H(theta)^* H(theta) + floor` with `H` a random trigonometric polynomial of degree 3.
pub fn smooth_pd_weight(
    rng: &mut impl Rng,
    count: usize,
    l: usize,
    floor: f64,
) -> BoundarySampling {
    let h: Vec<CMatrix> = (0..4)
        .map(|k| matrix(rng, l, l).scale(0.6f64.powi(k)))
        .collect();
    BoundarySampling::from_fn(count, l, |t| {
        let v = h
            .iter()
            .enumerate()
            .fold(CMatrix::zeros(l, l), |acc, (k, x)| {
                acc + x * C64::from_polar(1.0, k as f64 * t)
            });
        hermitian_part(&(v.adjoint() * v)) + identity(l).scale(floor)
    })
    .unwrap()
}

/// Semicircle times `C_0 + C_1 x` with `C_0 - 2 ||C_1|| >= 1/2`.
pub fn polynomial_density(rng: &mut impl Rng, l: usize) -> Density {
    let c0 = hpd(rng, l, 1.0);
    let c1 = hermitian(rng, l);
    let c1 = c1.scale(0.25 / op_norm(&c1).max(1e-3));
    Density::MatrixPolynomial {
        edge: Edge::Semicircle,
        coeffs: vec![c0, c1],
    }
}

pub fn random_point_in_disk(rng: &mut impl Rng, radius: f64) -> C64 {
    let r = radius * rng.random::<f64>().sqrt();
    C64::from_polar(
        r,
        rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
    )
}
