use hyp2_core::hahn_banach::{audit_extension, full_extend, ExtendConfig, ExtensionProblem};
use hyp2_core::linalg::Mat;
use hyp2_core::two_functional::DBilinear2Functional;
use hyp2_core::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn scalar() -> impl Strategy<Value = Hyperbolic> {
    prop_oneof![
        (-50.0..50.0f64, -50.0..50.0f64).prop_map(|(p, q)| Hyperbolic::new(p, q)),
        (-50.0..50.0f64).prop_map(|p| Hyperbolic::new(p, 0.0)),
        (-50.0..50.0f64).prop_map(|q| Hyperbolic::new(0.0, q)),
        (-50.0..50.0f64).prop_map(Hyperbolic::real),
    ]
}

fn dvector(n: usize) -> impl Strategy<Value = DVector> {
    (prop::collection::vec(-5.0..5.0f64, n), prop::collection::vec(-5.0..5.0f64, n))
        .prop_map(|(a, b)| DVector::join(&a, &b).unwrap())
}

fn close(a: Hyperbolic, b: Hyperbolic, tol: f64) -> bool {
    (a - b).max_abs() <= tol * (1.0 + a.max_abs().max(b.max_abs()))
}

proptest! {
    #[test]
    fn ring_axioms(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert!(close((a + b) + c, a + (b + c), 1e-12));
        prop_assert!(close((a * b) * c, a * (b * c), 1e-12));
        prop_assert!(close(a * (b + c), a * b + a * c, 1e-12));
        prop_assert_eq!(a * b, b * a);
        prop_assert_eq!(a * Hyperbolic::ONE, a);
    }

    #[test]
    fn cartesian_round_trip(a in -100.0..100.0f64, b in -100.0..100.0f64) {
        let (a2, b2) = Hyperbolic::from_cartesian(a, b).cartesian();
        prop_assert!((a - a2).abs() <= 1e-12 * (1.0 + a.abs()) && (b - b2).abs() <= 1e-12 * (1.0 + b.abs()));
    }

    #[test]
    fn conjugation_and_modulus(a in scalar(), b in scalar()) {
        prop_assert_eq!((a * b).conj_dagger(), a.conj_dagger() * b.conj_dagger());
        prop_assert_eq!(a.conj_dagger().conj_dagger(), a);
        prop_assert!(close((a * b).modulus_k(), a.modulus_k() * b.modulus_k(), 1e-12));
        prop_assert!(leq_prime((a + b).modulus_k(), a.modulus_k() + b.modulus_k()) != OrderResult::GreaterEq
            || (a + b).modulus_k() == a.modulus_k() + b.modulus_k());
    }

    #[test]
    fn inverse_exists_exactly_for_invertibles(a in scalar()) {
        match a.inverse() {
            Ok(inv) => prop_assert!(close(a * inv, Hyperbolic::ONE, 1e-12)),
            Err(_) => prop_assert!(!a.is_invertible()),
        }
    }

    #[test]
    fn lattice_bounds(xs in prop::collection::vec(scalar(), 1..8)) {
        let s = sup_d(xs.iter().copied()).unwrap();
        let i = inf_d(xs.iter().copied()).unwrap();
        for &x in &xs {
            prop_assert!(x.leq(s) && i.leq(x));
        }
        prop_assert!(i.leq(s));
    }

    #[test]
    fn split_join_round_trip(x in dvector(4)) {
        let (x1, x2) = x.split();
        prop_assert_eq!(DVector::join(&x1, &x2).unwrap(), x);
    }

    #[test]
    fn gram_det_axioms(x in dvector(3), y in dvector(3), z in dvector(3), alpha in scalar()) {
        let n = D2Norm::gram_det();
        let nxy = n.eval(&x, &y).unwrap();
        prop_assert!(nxy.is_nonneg());
        prop_assert!(close(nxy, n.eval(&y, &x).unwrap(), 1e-12));
        prop_assert!(close(n.eval(&x.scale(alpha), &y).unwrap(), alpha.modulus_k() * nxy, 1e-9));
        let lhs = n.eval(&x, &(&y + &z)).unwrap();
        let rhs = nxy + n.eval(&x, &z).unwrap();
        prop_assert!(lhs.leq_tol(rhs, 1e-9 * (1.0 + rhs.max_abs())));
        if linear_dependent(&x, &y) {
            prop_assert!(nxy.max_abs() <= 1e-9);
        }
    }

    #[test]
    fn functional_is_antisymmetric_and_decomposes(x in dvector(3), y in dvector(3), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = |rng: &mut ChaCha8Rng| {
            let a = Mat::from_fn(3, 3, |_, _| rand::Rng::random_range(rng, -1.0..1.0));
            a.plus(&a.transpose().scaled(-1.0))
        };
        let f = DBilinear2Functional::new(c(&mut rng), c(&mut rng)).unwrap();
        prop_assert_eq!(f.eval(&x, &x).unwrap(), Hyperbolic::ZERO);
        prop_assert!(close(f.eval(&x, &y).unwrap(), -f.eval(&y, &x).unwrap(), 1e-12));
        let k = f.k_decompose();
        prop_assert!(close(k.recombine(&x, &y), f.eval(&x, &y).unwrap(), 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn extension_invariants(seed in any::<u64>(), n in 2usize..5, d1 in 0usize..5, d2 in 0usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (d1, d2) = (d1.min(n), d2.min(n));
        let gauss = |rng: &mut ChaCha8Rng| two_norm::random_vector(n, rng);
        let m = DSubmodule::new(n, (0..d1).map(|_| gauss(&mut rng)).collect(), (0..d2).map(|_| gauss(&mut rng)).collect()).unwrap();
        let c = |rng: &mut ChaCha8Rng| {
            let a = Mat::from_fn(n, n, |_, _| rand::Rng::random_range(rng, -1.0..1.0));
            a.plus(&a.transpose().scaled(-1.0))
        };
        let f = DBilinear2Functional::new(c(&mut rng), c(&mut rng)).unwrap();
        let z = two_norm::random_dvector(n, &mut rng);
        let problem = ExtensionProblem::new(m, z, f, D2Norm::gram_det()).unwrap();
        let trace = full_extend(&problem, &ExtendConfig::default()).unwrap();
        let audit = audit_extension(&problem, &trace, 100, 1e-7, &mut rng).unwrap();
        prop_assert!(audit.passes(1e-10, 1e-5), "{:?}", audit);
    }
}
