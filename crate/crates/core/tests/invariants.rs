use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mtt_core::cxcore::{
    hom_classes_dim, is_quasi_iso, quasi_iso_between, tensor_total, BoundedComplex, Degree,
};
use mtt_core::homcx::{hom_complex, hom_nonzero, poincare};
use mtt_core::models::{
    kunneth, random_chain_map, random_complex, random_complex_with_homology, random_triangle,
    semisimple_pairing,
};
use mtt_core::transport::TransportKernel;

fn complex(seed: u64, max_dim: usize) -> BoundedComplex {
    random_complex(&mut ChaCha8Rng::seed_from_u64(seed), max_dim, -2, 2)
}

fn pair(seed: u64) -> (BoundedComplex, BoundedComplex) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (random_complex(&mut rng, 3, -2, 2), random_complex(&mut rng, 3, -2, 2))
}

fn chi(x: &BoundedComplex, y: &BoundedComplex) -> i64 {
    poincare(x, y).eval(-1).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn shift_multiplies_by_q(seed in any::<u64>(), k in -3i32..=3) {
        let (x, y) = pair(seed);
        prop_assert_eq!(poincare(&x.shift(k as Degree), &y), poincare(&x, &y).shift(k));
        prop_assert_eq!(poincare(&x, &y.shift(k as Degree)), poincare(&x, &y).shift(-k));
    }

    #[test]
    fn poincare_matches_homology_pairing(seed in any::<u64>()) {
        let (x, y) = pair(seed);
        prop_assert_eq!(poincare(&x, &y), semisimple_pairing(&x.homology_dims(), &y.homology_dims()));
    }

    #[test]
    fn degree_zero_counts_homotopy_classes(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_complex(&mut rng, 2, -1, 1);
        let y = random_complex(&mut rng, 2, -1, 1);
        prop_assert_eq!(poincare(&x, &y).coeff(0), hom_classes_dim(&x, &y) as i64);
    }

    #[test]
    fn nonvanishing_agrees_with_poincare(seed in any::<u64>()) {
        let (x, y) = pair(seed);
        prop_assert_eq!(hom_nonzero(&x, &y), !poincare(&x, &y).is_zero());
        prop_assert_eq!(hom_complex(&x, &y).is_acyclic(), poincare(&x, &y).is_zero());
    }

    #[test]
    fn kunneth_formula(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = random_complex(&mut rng, 2, -1, 1);
        let x = random_complex(&mut rng, 3, -2, 2);
        let t = tensor_total(&k, &x);
        t.validate().unwrap();
        prop_assert_eq!(t.homology_dims(), kunneth(&k.homology_dims(), &x.homology_dims()));
    }

    #[test]
    fn euler_characteristic_of_hom(seed in any::<u64>()) {
        let (x, y) = pair(seed);
        prop_assert_eq!(chi(&x, &y), hom_complex(&x, &y).euler_characteristic());
        prop_assert_eq!(chi(&x, &y), x.euler_characteristic() * y.euler_characteristic());
    }

    #[test]
    fn quasi_isomorphic_complexes_pair_alike(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_complex(&mut rng, 3, -2, 2);
        let x2 = random_complex_with_homology(&mut rng, &x.homology_dims(), 3, -2, 2);
        let y = random_complex(&mut rng, 3, -2, 2);
        let f = quasi_iso_between(&x, &x2).expect("same homology");
        prop_assert!(is_quasi_iso(&f));
        prop_assert_eq!(poincare(&x, &y), poincare(&x2, &y));
        prop_assert_eq!(poincare(&y, &x), poincare(&y, &x2));
    }

    #[test]
    fn transport_is_functorial(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = TransportKernel::new(random_complex(&mut rng, 2, -1, 1), "A", "s", "t");
        let b = TransportKernel::new(random_complex(&mut rng, 2, -1, 1), "B", "t", "u");
        let x = random_complex(&mut rng, 2, -1, 1);
        let y = random_complex(&mut rng, 2, -1, 1);
        let f = random_chain_map(&mut rng, &x, &y);
        let ba = b.compose(&a).unwrap();
        prop_assert_eq!(
            ba.apply_complex(&x).homology_dims(),
            b.apply_complex(&a.apply_complex(&x)).homology_dims()
        );
        let composed = ba.apply_map(&f);
        composed.check().unwrap();
        prop_assert_eq!(composed.induced_on_homology().values().map(|m| m.rank()).sum::<usize>(),
            b.apply_map(&a.apply_map(&f)).induced_on_homology().values().map(|m| m.rank()).sum::<usize>());
    }

    #[test]
    fn euler_is_additive_on_triangles(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_triangle(&mut rng, 3, -2, 2);
        t.check().unwrap();
        let z = complex(seed ^ 1, 3);
        prop_assert_eq!(chi(&t.second, &z), chi(&t.first, &z) + chi(&t.third, &z));
        prop_assert_eq!(chi(&z, &t.second), chi(&z, &t.first) + chi(&z, &t.third));
    }
}
