use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rumin_core::complex::RuminComplex;
use rumin_core::exec::Exec;
use rumin_core::numerics::{dilation_invariance, FormField, Grid, TestForm};
use rumin_core::symbol::{equivariance_check, random_symplectic, PolyForm};

fn complex(n: usize) -> RuminComplex {
    RuminComplex::new(n).expect("complex")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn dc_squares_to_zero_on_polynomial_forms(n in 1usize..=2, h in 0usize..4, seed in any::<u64>()) {
        let c = complex(n);
        let h = h % (2 * n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = PolyForm::random(n, h, c.basis(h).dim(), 3, 4, &mut rng);
        let dda = a.apply(c.dc(h)).and_then(|b| b.apply(c.dc(h + 1))).unwrap();
        prop_assert!(dda.is_zero());
    }

    #[test]
    fn poly_form_json_round_trips(n in 1usize..=2, h in 0usize..5, seed in any::<u64>()) {
        let c = complex(n);
        let h = h % (2 * n + 2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = PolyForm::random(n, h, c.basis(h).dim(), 2, 3, &mut rng);
        let text = serde_json::to_string(&a.to_json()).unwrap();
        let back = PolyForm::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn dc_commutes_with_symplectic_maps(n in 1usize..=2, h in 0usize..5, map_seed in any::<u64>(), seed in any::<u64>()) {
        let c = complex(n);
        let h = h % (2 * n + 1);
        let map = random_symplectic(n, map_seed);
        let r = equivariance_check(&map, c.basis(h), c.basis(h + 1), c.dc(h), 1, seed).unwrap();
        prop_assert!(r.passed, "residual {}", r.max_residual);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn norms_are_absolutely_homogeneous(seed in any::<u64>(), s in -4.0f64..4.0, p in prop::sample::select(vec![1.0, 4.0 / 3.0, 2.0, 3.0, f64::INFINITY])) {
        let c = complex(1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tf = TestForm::random(1, 1, c.basis(1).dim(), &mut rng);
        let grid = Grid::with_nodes(1, 1.5, 33).unwrap();
        let f = FormField::sample(&tf, &grid, c.basis(1), 1, Exec::Sequential).unwrap();
        let base = f.lp_norm(p, Exec::Sequential);
        let scaled = f.scale(s).lp_norm(p, Exec::Sequential);
        prop_assert!((scaled - s.abs() * base).abs() <= 1e-12 * (1.0 + base));
    }

    #[test]
    fn execution_policies_agree_bitwise(seed in any::<u64>(), p in prop::sample::select(vec![1.0, 2.0, 1.5, f64::INFINITY])) {
        let c = complex(1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tf = TestForm::random(1, 0, 1, &mut rng);
        let grid = Grid::with_nodes(1, 1.5, 33).unwrap();
        let seq = FormField::sample(&tf, &grid, c.basis(0), 1, Exec::Sequential).unwrap();
        let par = FormField::sample(&tf, &grid, c.basis(0), 1, Exec::Parallel).unwrap();
        prop_assert_eq!(seq.data(), par.data());
        prop_assert_eq!(seq.lp_norm(p, Exec::Sequential).to_bits(), par.lp_norm(p, Exec::Parallel).to_bits());
    }

    #[test]
    fn ratio_is_dilation_invariant(lambda in 0.25f64..4.0) {
        let c = complex(1);
        let grid = Grid::with_nodes(1, 1.5, 33).unwrap();
        let r = dilation_invariance(&c, &TestForm::bump(1, 0, 1), lambda, &grid, Exec::default()).unwrap();
        prop_assert!(r.passed, "lambda {} difference {:?}", lambda, r.relative_difference);
    }
}
