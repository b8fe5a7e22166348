mod common;

use proptest::prelude::*;
use szego_core::linalg::{identity, max_abs_diff, op_norm, principal_sqrt, projector};
use szego_core::Tolerances;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn norms_are_equivalent(seed in any::<u64>(), l in 1usize..5, log_m in 2u32..8) {
        let mut r = common::rng(seed);
        let f = common::sampling(&mut r, 1 << log_m, l);
        let n1 = f.norm_l2_1();
        let n2 = f.norm_l2_2();
        prop_assert!(n2 <= n1 + 1e-12);
        prop_assert!(n1 <= (l as f64).sqrt() * n2 + 1e-12);
    }

    #[test]
    fn product_is_bounded(seed in any::<u64>(), l in 1usize..5, log_m in 2u32..8) {
        let mut r = common::rng(seed);
        let f = common::sampling(&mut r, 1 << log_m, l);
        let g = common::sampling(&mut r, 1 << log_m, l);
        let lhs = op_norm(&f.inner(&g).unwrap());
        prop_assert!(lhs <= l as f64 * f.norm_l2_2() * g.norm_l2_2() + 1e-12);
    }

    #[test]
    fn fourier_coefficients_obey_bessel(seed in any::<u64>(), l in 1usize..4) {
        let mut r = common::rng(seed);
        let f = common::sampling(&mut r, 64, l);
        let bound = f.norm_l2_2();
        for n in -31..=31 {
            prop_assert!(op_norm(&f.fourier_coeff(n).unwrap()) <= bound + 1e-12);
        }
    }

    #[test]
    fn smooth_coefficients_decay(seed in any::<u64>(), l in 1usize..4, rho in 0.2f64..0.7) {
        let mut r = common::rng(seed);
        let f = common::smooth_sampling(&mut r, 128, l, rho);
        let c = f.fourier_coefficients();
        let norms: Vec<f64> = (0..=32).map(|n| op_norm(&c.get(n)).max(op_norm(&c.get(-n)))).collect();
        // Envelope sup_{k >= n} ||c_k|| shrinks at the geometric rate, then vanishes.
        let env: Vec<f64> = (0..norms.len()).map(|n| norms[n..].iter().cloned().fold(0.0, f64::max)).collect();
        let scale = l as f64 * 2f64.sqrt();
        for (n, e) in env.iter().take(13).enumerate() {
            prop_assert!(*e <= scale * rho.powi(n as i32) + 1e-12);
        }
        prop_assert!(env[13] < 1e-12 * (1.0 + f.sup_norm()));
    }

    #[test]
    fn sqrt_fixes_projectors(seed in any::<u64>(), l in 1usize..6, k in 0usize..6) {
        let mut r = common::rng(seed);
        let k = k.min(l);
        let u = common::unitary(&mut r, l);
        let p = projector(&u.columns(0, k).into_owned());
        let s = principal_sqrt(&p, &Tolerances::default()).unwrap();
        prop_assert!(max_abs_diff(&s, &p) < 1e-12);
    }

    #[test]
    fn left_polar_reconstructs(seed in any::<u64>(), l in 1usize..6) {
        let mut r = common::rng(seed);
        let a = common::matrix(&mut r, l, l) + identity(l).scale(0.1);
        let tol = Tolerances::default();
        let Ok(polar) = szego_core::linalg::left_polar(&a, &tol) else { return Ok(()) };
        prop_assert!(max_abs_diff(&(&polar.unitary * &polar.positive), &a) < 1e-10 * (1.0 + op_norm(&a)));
        prop_assert!(szego_core::linalg::unitarity_defect(&polar.unitary) < 1e-12);
    }
}

#[test]
fn constant_unitary_has_unit_norms() {
    let mut r = common::rng(7);
    let u = common::unitary(&mut r, 3);
    let f = szego_core::BoundarySampling::from_fn(32, 3, |_| u.clone()).unwrap();
    assert!((f.norm_l2_1() - 1.0).abs() < 1e-13);
    assert!((f.norm_l2_2() - 1.0).abs() < 1e-13);
}
