use proptest::prelude::*;
use tomolab_core::entanglement::{concurrence, ppt_determinant, singlet_fraction};
use tomolab_core::linalg;
use tomolab_core::random::{haar_unitary, random_density_matrix, random_product_state, random_separable_state, rng_from_seed};
use tomolab_core::DensityMatrix;

#[test]
fn concurrence_and_determinant_agree_on_ten_thousand_states() {
    let mut compared = 0;
    for seed in 0..10_000 {
        let rho = random_density_matrix::<f64>(4, 4, seed).unwrap();
        let det = ppt_determinant(&rho).unwrap();
        if det.abs() < 1e-10 {
            continue;
        }
        compared += 1;
        let c = concurrence(&rho).unwrap().value;
        assert_eq!(c > 1e-7, det < -1e-10, "seed {seed}: C = {c:e}, det = {det:e}");
    }
    assert!(compared > 9000);
}

proptest! {
    #[test]
    fn concurrence_is_local_unitary_invariant(seed in any::<u64>(), rank in 1usize..=4) {
        let mut rng = rng_from_seed(seed);
        let rho = random_density_matrix::<f64>(4, rank, seed ^ 0x5a5a).unwrap();
        let local = linalg::kron(&haar_unitary::<f64, _>(&mut rng, 2), &haar_unitary::<f64, _>(&mut rng, 2));
        let c0 = concurrence(&rho).unwrap().value;
        let c1 = concurrence(&rho.conjugate(&local).unwrap()).unwrap().value;
        prop_assert!((c0 - c1).abs() <= 1e-10, "{} vs {}", c0, c1);
    }

    #[test]
    fn mixture_of_two_products_has_zero_concurrence(seed in any::<u64>(), p in 0.0f64..=1.0) {
        let mut rng = rng_from_seed(seed);
        let a = random_product_state::<f64, _>(&mut rng);
        let b = random_product_state::<f64, _>(&mut rng);
        let mix = DensityMatrix::new(a.matrix() * num_complex::Complex::new(p, 0.0) + b.matrix() * num_complex::Complex::new(1.0 - p, 0.0)).unwrap();
        prop_assert!(concurrence(&mix).unwrap().value < 1e-7);
    }
}

#[test]
fn singlet_fraction_bounded_on_separable_states() {
    let mut rng = rng_from_seed(42);
    let unitaries: Vec<_> = (0..100).map(|_| haar_unitary::<f64, _>(&mut rng, 2)).collect();
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let sep = random_separable_state::<f64, _>(&mut rng, 4);
        for u in &unitaries {
            worst = worst.max(singlet_fraction(&sep, u).unwrap());
        }
    }
    assert!(worst <= 0.5 + 1e-9, "{worst}");
}
