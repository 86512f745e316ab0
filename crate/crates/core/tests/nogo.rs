use num_complex::Complex;
use tomolab_core::entanglement::{ppt_determinant, singlet_fraction, MARGIN_TOL};
use tomolab_core::linalg;
use tomolab_core::nogo::{cylinder_test, find_counterexample_seeded, max_entangled_overlap, PROJECTION_TOL};
use tomolab_core::random::{haar_unitary, random_traceless_hermitian, rng_from_seed};
use tomolab_core::Observable;

#[test]
fn random_directions_yield_counterexamples() {
    let mut rng = rng_from_seed(77);
    let mut failures = Vec::new();
    for i in 0..100 {
        let r = random_traceless_hermitian::<f64, _>(&mut rng, 4);
        if let Err(e) = find_counterexample_seeded(&r, i) {
            failures.push(format!("{i}: {e}"));
        }
    }
    for f in &failures {
        println!("{f}");
    }
    assert!(failures.len() <= 1, "{} failures", failures.len());
}

#[test]
fn pairs_agree_on_every_measured_observable() {
    let mut rng = rng_from_seed(78);
    for _ in 0..30 {
        let obs: Vec<_> = (0..14).map(|_| random_traceless_hermitian::<f64, _>(&mut rng, 4)).collect();
        let pair = cylinder_test(&obs).unwrap();
        for o in &obs {
            let gap = (pair.rho_sep.expectation(o).unwrap() - pair.rho_ent.expectation(o).unwrap()).abs();
            assert!(gap <= PROJECTION_TOL, "{gap:e}");
        }
        assert!(ppt_determinant(&pair.rho_ent).unwrap() < -MARGIN_TOL);
    }
}

#[test]
fn witness_implies_negative_determinant() {
    let mut rng = rng_from_seed(79);
    for i in 0..40 {
        let r = random_traceless_hermitian::<f64, _>(&mut rng, 4);
        let pair = find_counterexample_seeded(&r, i).unwrap();
        for _ in 0..20 {
            let u = haar_unitary::<f64, _>(&mut rng, 2);
            if singlet_fraction(&pair.rho_ent, &u).unwrap() > 0.5 + 1e-8 {
                assert!(ppt_determinant(&pair.rho_ent).unwrap() < -MARGIN_TOL);
            }
        }
        if pair.witness > 0.5 + 1e-8 {
            assert!(pair.certificates.det_ent < -MARGIN_TOL);
        }
    }
}

#[test]
fn local_directions_are_invisible_to_bell_states() {
    let mut rng = rng_from_seed(80);
    for _ in 0..100 {
        let m = random_traceless_hermitian::<f64, _>(&mut rng, 2);
        let n = random_traceless_hermitian::<f64, _>(&mut rng, 2);
        let id = linalg::identity::<f64>(2);
        let local = linalg::kron(&id, m.matrix()) + linalg::kron(n.matrix(), &id) * Complex::new(1.0, 0.0);
        let overlap = max_entangled_overlap(&Observable::new(local).unwrap()).unwrap();
        assert!(overlap.value <= 1e-8, "{:e}", overlap.value);
    }
}
