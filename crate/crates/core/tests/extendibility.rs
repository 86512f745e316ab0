use num_complex::Complex;
use proptest::prelude::*;
use tomolab_core::entanglement::{classify_determinant, Verdict};
use tomolab_core::extendibility::{build_extension_counterexample, WernerState, XStateParams};
use tomolab_core::linalg::{self, CMatrix};
use tomolab_core::random::random_density_matrix;

/// The 24 single-qubit Cliffords (up to phase), a unitary 2-design.
fn clifford_group() -> Vec<CMatrix<f64>> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let h = CMatrix::from_row_slice(2, 2, &[Complex::new(s, 0.0), Complex::new(s, 0.0), Complex::new(s, 0.0), Complex::new(-s, 0.0)]);
    let p = CMatrix::from_row_slice(2, 2, &[Complex::new(1.0, 0.0), Complex::new(0.0, 0.0), Complex::new(0.0, 0.0), Complex::new(0.0, 1.0)]);
    let same_up_to_phase = |a: &CMatrix<f64>, b: &CMatrix<f64>| (a.adjoint() * b).trace().norm() > 2.0 - 1e-9;
    let mut group = vec![linalg::identity::<f64>(2)];
    let mut frontier = group.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for g in &frontier {
            for gen in [&h, &p] {
                let cand = gen * g;
                if !group.iter().any(|x| same_up_to_phase(x, &cand)) {
                    group.push(cand.clone());
                    next.push(cand);
                }
            }
        }
        frontier = next;
    }
    group
}

#[test]
fn exact_twirl_matches_projection_formula() {
    let cliffords = clifford_group();
    assert_eq!(cliffords.len(), 24);
    for seed in 0..20 {
        let sigma = random_density_matrix::<f64>(4, 4, seed).unwrap();
        let mut acc = CMatrix::<f64>::zeros(4, 4);
        for c in &cliffords {
            let cc = linalg::kron(c, c);
            acc += &cc * sigma.matrix() * cc.adjoint();
        }
        acc /= Complex::new(24.0, 0.0);
        let werner = WernerState::twirl_of(&sigma, 2).unwrap().materialize::<f64>();
        assert!((acc - werner.matrix()).camax() < 1e-10, "seed {seed}");
    }
}

#[test]
fn counterexample_grid_certificates() {
    for y in [0.1, 0.5, 1.0, 2.0] {
        for eps in [0.001, 0.01, 0.1] {
            let ce = build_extension_counterexample::<f64>(y, eps).unwrap();
            assert!(ce.inequalities.iter().all(|c| c.holds()), "y={y} eps={eps}: {:?}", ce.inequalities);
            assert!(ce.params.extension_obstruction() > 0.0);
            assert_ne!(classify_determinant(ce.shifted_ppt_determinant), Verdict::Entangled);
            assert!(ce.shifted_ppt_min_eigenvalue >= -1e-12);
        }
    }
}

#[test]
fn builder_rejects_parameters_outside_the_family_domain() {
    // (y+1)(z-1) >= xw needs ε(2y + 2 + ε) <= 1.
    assert!(build_extension_counterexample::<f64>(5.0, 0.1).is_err());
}

proptest! {
    #[test]
    fn xstate_is_positive(x in 1e-3f64..10.0, y in 1e-3f64..10.0, z in 1e-3f64..10.0, w in 1e-3f64..10.0) {
        let rho = XStateParams { x, y, z, w }.materialize::<f64>();
        prop_assert!(rho.is_ok());
        let min = rho.unwrap().eigenvalues()[0];
        prop_assert!(min >= -1e-12);
    }

    #[test]
    fn werner_weights_sum_to_one(psi in -1.0f64..=1.0) {
        let w = WernerState::new(psi, 2).unwrap().materialize::<f64>();
        let swap = linalg::swap_operator::<f64>(2);
        prop_assert!((linalg::trace_of_product(&swap, w.matrix()).re - psi).abs() < 1e-12);
    }
}
