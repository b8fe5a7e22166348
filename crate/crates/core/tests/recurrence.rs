mod common;

use proptest::prelude::*;
use szego_core::linalg::{det, hermitian_defect, identity, is_hpd, max_abs_diff, op_norm};
use szego_core::moprl::StieltjesOptions;
use szego_core::{
    a0_quantity, catalog, stieltjes, BlockJacobi, MatrixMeasure, NormType, Tolerances, C64,
};

fn random_measure(seed: u64, l: usize, with_mass: bool) -> MatrixMeasure {
    let mut r = common::rng(seed);
    let density = common::polynomial_density(&mut r, l);
    let mut b = MatrixMeasure::builder(density).quad_order(1024);
    if with_mass {
        b = b.mass(-2.7, common::hpd(&mut r, l, 0.0).scale(0.3));
    }
    b.build().unwrap()
}

fn random_jacobi(seed: u64, l: usize, depth: usize) -> BlockJacobi {
    let mut r = common::rng(seed);
    let a = (0..depth).map(|_| common::hpd(&mut r, l, 0.5)).collect();
    let b = (0..depth).map(|_| common::hermitian(&mut r, l)).collect();
    BlockJacobi::new(a, b, NormType::Type1).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn stieltjes_output_is_orthonormal(seed in any::<u64>(), l in 1usize..4, with_mass in prop::bool::ANY) {
        let mu = random_measure(seed, l, with_mass);
        let seq = stieltjes(&mu, 30).unwrap();
        prop_assert!(seq.orthonormality_defect() < 1e-7);
        prop_assert!(seq.recurrence_residual() < 1e-8);
        prop_assert!(seq.drift_warning.is_none());
        prop_assert!(seq.jacobi().check().is_ok());
    }

    #[test]
    fn equivalence_acts_by_right_multiplication(seed in any::<u64>(), l in 2usize..4) {
        let mu = random_measure(seed, l, true);
        let seq = stieltjes(&mu, 12).unwrap();
        for target in [NormType::Type2, NormType::Type3] {
            let (seq2, t) = seq.to_type(target);
            prop_assert!(t.max_unitarity_defect() < 1e-12);
            prop_assert!(max_abs_diff(t.sigma(1), &identity(l)) < 1e-15);
            let d = seq.discretization();
            for n in 0..=12 {
                for i in 0..d.ac_len {
                    let lhs = seq.values(n).get(i) * t.sigma(n + 1);
                    prop_assert!(max_abs_diff(&lhs, &seq2.values(n).get(i)) < 1e-10);
                }
            }
            prop_assert!(seq2.orthonormality_defect() < 1e-7);
        }
    }

    #[test]
    fn type_representatives_have_their_shape(seed in any::<u64>(), l in 2usize..4) {
        let j = random_jacobi(seed, l, 8);
        let tol = Tolerances::default();
        let (j2, _) = j.to_type(NormType::Type2);
        let mut prod = identity(l);
        for n in 1..=8 {
            prod *= j2.a(n);
            prop_assert!(hermitian_defect(&prod) < 1e-10 * op_norm(&prod));
            prop_assert!(is_hpd(&prod, &tol));
        }
        let (j3, _) = j.to_type(NormType::Type3);
        for a in j3.a_blocks() {
            for r in 0..l {
                prop_assert!(a[(r, r)].re > 0.0 && a[(r, r)].im == 0.0);
                for c in r + 1..l {
                    prop_assert!(a[(r, c)].norm() == 0.0);
                }
            }
        }
        let (back, _) = j2.to_type(NormType::Type1);
        for (x, y) in back.a_blocks().iter().zip(j.a_blocks()) {
            prop_assert!(max_abs_diff(x, y) < 1e-10);
        }
    }

    #[test]
    fn determinants_are_type_invariant(seed in any::<u64>(), l in 1usize..4) {
        let j = random_jacobi(seed, l, 10);
        for target in [NormType::Type2, NormType::Type3] {
            let (jt, _) = j.to_type(target);
            for n in 1..=10 {
                let a = a0_quantity(&j, n).unwrap();
                let b = a0_quantity(&jt, n).unwrap();
                prop_assert!((a - b).abs() < 1e-10 * (1.0 + a.abs()));
                let k1 = det(&j.leading_coeff(n).unwrap()).norm();
                let k2 = det(&jt.leading_coeff(n).unwrap()).norm();
                prop_assert!((k1 / k2 - 1.0).abs() < 1e-8, "n {} k1 {:e} k2 {:e}", n, k1, k2);
            }
        }
    }

    #[test]
    fn kappa_is_the_scaled_value_at_zero(seed in any::<u64>(), l in 1usize..4) {
        let j = random_jacobi(seed, l, 6);
        for n in 0..=6 {
            let a = j.eval_scaled(n, C64::new(0.0, 0.0)).unwrap();
            let b = j.leading_coeff(n).unwrap();
            prop_assert!(max_abs_diff(&a, &b) < 1e-12 * (1.0 + op_norm(&b)));
        }
    }

    #[test]
    fn conjugating_the_measure_conjugates_the_coefficients(seed in any::<u64>(), l in 2usize..4) {
        let mu = random_measure(seed, l, true);
        let mut r = common::rng(seed.wrapping_add(1));
        let u = common::unitary(&mut r, l);
        let nu = mu.conjugated(&u).unwrap();
        let j = stieltjes(&mu, 15).unwrap().jacobi().clone();
        let k = stieltjes(&nu, 15).unwrap().jacobi().clone();
        prop_assert!(j.conjugation_defect(&k, &u) < 1e-9);
    }
}

#[test]
fn free_and_arcsine_coefficients() {
    let free = stieltjes(&catalog::free(1).unwrap(), 50).unwrap();
    for n in 1..=50 {
        assert!((free.jacobi().a(n)[(0, 0)].re - 1.0).abs() < 1e-8);
        assert!(free.jacobi().b(n)[(0, 0)].norm() < 1e-8);
    }
    let arc = stieltjes(&catalog::arcsine(1).unwrap(), 50).unwrap();
    assert!((arc.jacobi().a(1)[(0, 0)].re - 2f64.sqrt()).abs() < 1e-8);
    for n in 2..=50 {
        assert!((arc.jacobi().a(n)[(0, 0)].re - 1.0).abs() < 1e-8);
        assert!(arc.jacobi().b(n)[(0, 0)].norm() < 1e-8);
    }
    for n in 1..=50 {
        assert!((arc.leading_coeff(n).unwrap()[(0, 0)].re - 0.5f64.sqrt()).abs() < 1e-8);
    }
}

#[test]
fn block_diagonal_measure_splits() {
    let mixed = stieltjes(&catalog::block_free_arcsine().unwrap(), 30).unwrap();
    let free = stieltjes(&catalog::free(1).unwrap(), 30).unwrap();
    let arc = stieltjes(&catalog::arcsine(1).unwrap(), 30).unwrap();
    for n in 1..=30 {
        let a = mixed.jacobi().a(n);
        let b = mixed.jacobi().b(n);
        assert!((a[(0, 0)] - free.jacobi().a(n)[(0, 0)]).norm() < 1e-8);
        assert!((a[(1, 1)] - arc.jacobi().a(n)[(0, 0)]).norm() < 1e-8);
        assert!(a[(0, 1)].norm() < 1e-8 && a[(1, 0)].norm() < 1e-8);
        assert!(b.iter().all(|v| v.norm() < 1e-8));
    }
}

#[test]
fn semicircle_scaled_values_match_chebyshev() {
    let seq = stieltjes(&catalog::free(1).unwrap(), 40).unwrap();
    for &z in &[
        C64::new(0.5, 0.0),
        C64::new(0.3, -0.6),
        C64::new(-0.85, 0.1),
    ] {
        for n in [0usize, 1, 7, 40] {
            let exact =
                (C64::new(1.0, 0.0) - z.powu(2 * n as u32 + 2)) / (C64::new(1.0, 0.0) - z * z);
            let got = seq.eval_scaled(n, z).unwrap()[(0, 0)];
            assert!(
                (got - exact).norm() < 1e-10 * exact.norm().max(1.0),
                "n {n} z {z}"
            );
        }
    }
}

#[test]
fn large_arguments_do_not_overflow() {
    let seq = stieltjes(&catalog::free(1).unwrap(), 200).unwrap();
    let (_, log_scale) = seq
        .jacobi()
        .eval_poly_scaled(200, C64::new(1e3, 0.0))
        .unwrap();
    assert!(log_scale.is_finite());
    let v = seq.eval_scaled(200, C64::new(0.999, 0.0)).unwrap();
    assert!(v[(0, 0)].re.is_finite());
}

#[test]
fn sparse_reorthogonalization_still_converges() {
    let mu = catalog::twisted().unwrap();
    let seq = szego_core::moprl::stieltjes_with(
        &mu,
        60,
        StieltjesOptions {
            reorth_interval: 10,
        },
    )
    .unwrap();
    assert!(seq.orthonormality_defect() < 1e-7);
}
