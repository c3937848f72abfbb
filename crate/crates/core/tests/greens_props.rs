use nalgebra::DMatrix;
use num_complex::Complex64;
use relcoulomb::greens::{corner_fraction, green_matrix, truncated_inverse_oracle, CfOptions};
use relcoulomb::jacobi::JacobiOperator;
use relcoulomb::model::{Branch, Channel, PhysicalConstants};

fn hydrogen(eta: f64, binding: f64) -> JacobiOperator {
    let c = PhysicalConstants::default();
    let ch = Channel::dirac(1.0, 1, Branch::Plus, &c).unwrap();
    JacobiOperator::at_binding(ch, c, eta, binding).unwrap()
}

fn max_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).abs().max()
}

#[test]
fn corner_fraction_satisfies_tail_recursion() {
    let opts = CfOptions::default();
    for binding in [-0.45, -0.3, -0.2, -0.09, -0.02] {
        let op = hydrogen(1.0, binding);
        for n in 1..=10 {
            let f_n = corner_fraction(&op, n, &opts).unwrap().value;
            let f_next = corner_fraction(&op, n + 1, &opts).unwrap().value;
            let ab = op.cf_coefficients(n).unwrap();
            let recursed = -ab.a / (ab.b - f_next);
            assert!((f_n - recursed).abs() < 1e-12 * f_n.abs().max(1.0), "binding {binding} N {n}");
        }
    }
}

#[test]
fn leading_blocks_nest() {
    let opts = CfOptions::default();
    let op = hydrogen(1.0, -0.3);
    for (small, large) in [(1, 2), (2, 5), (5, 10)] {
        let g_small = green_matrix(&op, small, &opts).unwrap().green_matrix;
        let g_large = green_matrix(&op, large, &opts).unwrap().green_matrix;
        let block = g_large.view((0, 0), (small, small)).into_owned();
        assert!(max_diff(&g_small, &block) < 1e-10, "({small}, {large})");
    }
}

#[test]
fn rank_two_block_matches_large_truncation() {
    let opts = CfOptions::default();
    for binding in [-0.3, -0.2, -0.05] {
        let op = hydrogen(1.0, binding);
        let g = green_matrix(&op, 2, &opts).unwrap().green_matrix;
        let oracle = truncated_inverse_oracle(&op, 2000, 2).unwrap();
        assert!(max_diff(&g, &oracle) < 1e-5, "binding {binding}");
    }
}

#[test]
fn truncation_error_shrinks_with_size() {
    // Slowly converging case: η far from the level scale, binding near
    // threshold. Small truncations still carry spurious near-poles.
    let op = hydrogen(5.0, -0.001);
    let g = green_matrix(&op, 2, &CfOptions::default()).unwrap().green_matrix;
    let errors: Vec<f64> =
        [400, 1600, 6400].iter().map(|&k| max_diff(&g, &truncated_inverse_oracle(&op, k, 2).unwrap())).collect();
    assert!(errors[0] > errors[1] && errors[1] > errors[2], "{errors:?}");
    assert!(errors[2] < 1e-10, "{errors:?}");
}

#[test]
fn truncation_without_tail_is_visibly_wrong() {
    let op = hydrogen(1.0, -0.3);
    let g = green_matrix(&op, 2, &CfOptions::default()).unwrap().green_matrix;
    let bare = truncated_inverse_oracle(&op, 2, 2).unwrap();
    assert!(max_diff(&g, &bare) > 1e-3);
}

#[test]
fn complex_energies_respect_reflection() {
    let c = PhysicalConstants::default();
    let ch = Channel::dirac(1.0, 1, Branch::Plus, &c).unwrap();
    let opts = CfOptions::default();
    let at = |z: Complex64| {
        let op = JacobiOperator::at_binding(ch, c, 1.0, z).unwrap();
        green_matrix(&op, 3, &opts).unwrap()
    };
    let real = at(Complex64::new(-0.3, 0.0));
    assert_eq!(real.det_inverse.im, 0.0);
    let g_real = green_matrix(&hydrogen(1.0, -0.3), 3, &opts).unwrap();
    assert!((real.det_inverse.re - g_real.det_inverse).abs() < 1e-12 * g_real.det_inverse.abs());

    let upper = at(Complex64::new(-0.3, 0.01));
    let lower = at(Complex64::new(-0.3, -0.01));
    let mismatch = upper.green_matrix.map(|z| z.conj()) - lower.green_matrix;
    assert!(mismatch.iter().all(|z| z.norm() < 1e-12));
    assert!(upper.green_matrix.iter().any(|z| z.im.abs() > 1e-6));
}
