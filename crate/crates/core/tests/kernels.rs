mod common;

use common::{kernel_probes, parabolic_by_differences, schrodinger_pde_residual};
use miura_core::integral::{cauchy_kernel_components, parabolic_kernel, schrodinger_kernel};
use num_complex::Complex64;
use proptest::prelude::*;

#[test]
fn schrodinger_kernel_solves_pde() {
    for n in [2, 3] {
        for (x, t) in kernel_probes(n) {
            let r = schrodinger_pde_residual(&x, t);
            assert!(r < 1e-4, "n={n} x={x:?} t={t}: {r:e}");
        }
    }
}

#[test]
fn schrodinger_gate() {
    for t in [0.0, -1e-12, -0.5, -3.0] {
        assert_eq!(schrodinger_kernel(&[0.2, 0.4], t), Complex64::new(0.0, 0.0));
    }
    assert_ne!(schrodinger_kernel(&[0.2, 0.4], 1e-3), Complex64::new(0.0, 0.0));
}

#[test]
fn parabolic_kernel_matches_differences() {
    for n in [2, 3] {
        for (x, t) in kernel_probes(n) {
            let got = parabolic_kernel(&x, -t).unwrap();
            let want = parabolic_by_differences(&x, -t);
            assert!(got.max_abs_diff(&want) < 1e-6, "n={n} x={x:?} t={}: {}", -t, got.max_abs_diff(&want));
            assert_eq!(parabolic_kernel(&x, t).unwrap().norm(), 0.0);
        }
    }
}

proptest! {
    #[test]
    fn cauchy_kernel_antisymmetric_and_homogeneous(
        x in prop::collection::vec(-2.0f64..2.0, 2..=3),
        lambda in 0.1f64..10.0,
    ) {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        prop_assume!(r2 > 1e-4);
        let n = x.len() as i32;
        let e = cauchy_kernel_components(&x).unwrap();
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let scaled: Vec<f64> = x.iter().map(|v| v * lambda).collect();
        let en = cauchy_kernel_components(&neg).unwrap();
        let es = cauchy_kernel_components(&scaled).unwrap();
        for j in 0..x.len() {
            prop_assert_eq!(en[j], -e[j]);
            let want = e[j] / lambda.powi(n - 1);
            prop_assert!((es[j] - want).abs() <= 1e-12 * (1.0 + want.abs()));
        }
    }
}
