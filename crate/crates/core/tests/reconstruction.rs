use tomolab_core::filter::protocol::run_protocol;
use tomolab_core::metrics::trace_distance;
use tomolab_core::random::random_density_matrix;
use tomolab_core::reconstruction::{constraint_residual, constraint_residual_with_probs, dof_analysis, mle_reconstruct, Identifiability};

#[test]
fn five_filters_identify_generic_states() {
    let total = 200;
    let mut unique = 0;
    for seed in 0..total {
        let rho = random_density_matrix::<f64>(4, 4, 500 + seed).unwrap();
        let transcript = run_protocol(&rho, 5).unwrap();
        let fit = mle_reconstruct(&transcript).unwrap();
        let err = trace_distance(&fit.state, &rho).unwrap();
        if fit.identifiability == Identifiability::Unique && err <= 1e-4 {
            unique += 1;
        }
    }
    println!("unique reconstructions: {unique}/{total}");
    assert!(unique * 100 >= 95 * total, "{unique}/{total}");
}

#[test]
fn dof_ladder_is_monotone() {
    for seed in 0..20 {
        let rho = random_density_matrix::<f64>(4, 4, 900 + seed).unwrap();
        let transcript = run_protocol(&rho, 5).unwrap();
        let dofs: Vec<usize> = (0..=5).map(|m| dof_analysis(&transcript, &rho, m).unwrap().dof).collect();
        assert_eq!(dofs[0], 9, "seed {seed}");
        assert_eq!(dofs[1], 6, "seed {seed}");
        assert!(dofs.windows(2).all(|w| w[1] <= w[0]), "seed {seed}: {dofs:?}");
    }
}

#[test]
fn truth_has_zero_residual() {
    for seed in 0..50 {
        let rho = random_density_matrix::<f64>(4, 1 + seed as usize % 4, 1300 + seed).unwrap();
        let Ok(transcript) = run_protocol(&rho, 6) else { continue };
        for m in 0..=6 {
            assert!(constraint_residual(&rho, &transcript, m).unwrap() <= 1e-12);
            assert!(constraint_residual_with_probs(&rho, &transcript, m).unwrap() <= 1e-12);
        }
    }
}
