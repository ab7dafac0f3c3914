use bidisk_core::{BiPoly, Complex64, Var};
use proptest::prelude::*;

fn gaussian_poly(max_deg: u32, max_terms: usize) -> impl Strategy<Value = BiPoly> {
    prop::collection::vec((0..=max_deg, 0..=max_deg, -3i32..=3, -3i32..=3), 0..=max_terms).prop_map(|ts| {
        BiPoly::from_terms(ts.into_iter().map(|(i, j, re, im)| (i, j, Complex64::new(re as f64, im as f64))))
    })
}

fn var() -> impl Strategy<Value = Var> {
    prop_oneof![Just(Var::Z1), Just(Var::Z2)]
}

fn divisors() -> [BiPoly; 3] {
    let one = BiPoly::one();
    [
        &BiPoly::z1() - &one,
        &BiPoly::z1() - &BiPoly::z2(),
        &(&BiPoly::z1() * &BiPoly::z2()) - &one,
    ]
}

proptest! {
    #[test]
    fn ring_axioms(p in gaussian_poly(4, 6), q in gaussian_poly(4, 6), r in gaussian_poly(4, 6)) {
        prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
        prop_assert_eq!(&(&p + &q) + &r, &p + &(&q + &r));
        prop_assert_eq!(&p * &q, &q * &p);
        prop_assert_eq!(&p + &q, &q + &p);
        prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
        prop_assert_eq!(&p * &BiPoly::one(), p.clone());
        prop_assert!((&p - &p).is_zero());
    }

    #[test]
    fn backward_shift_identity(p in gaussian_poly(8, 20), v in var()) {
        let rebuilt = &(&BiPoly::var(v) * &p.backward_shift(v)) + &p.project(v);
        prop_assert_eq!(rebuilt, p);
    }

    #[test]
    fn divide_exact_recovers_quotient(q in gaussian_poly(6, 12), k in 0usize..3) {
        let d = divisors()[k].clone();
        let product = &q * &d;
        prop_assert_eq!(product.divide_exact(&d).unwrap(), q);
    }

    #[test]
    fn sup_norm_monotone_under_refinement(p in gaussian_poly(5, 8), n in 2usize..24) {
        prop_assert!(p.sup_norm_grid(2 * n) >= p.sup_norm_grid(n));
    }

    #[test]
    fn json_round_trip(p in gaussian_poly(6, 10)) {
        let s = serde_json::to_string(&p).unwrap();
        let back: BiPoly = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn eval_is_a_ring_homomorphism(p in gaussian_poly(3, 5), q in gaussian_poly(3, 5), x in -0.9f64..0.9, y in -0.9f64..0.9) {
        let z = bidisk_core::Point2::new(Complex64::new(x, 0.3 * y), Complex64::new(y, -0.2 * x)).unwrap();
        let lhs = (&p * &q).eval(&z);
        let rhs = p.eval(&z) * q.eval(&z);
        prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + rhs.norm()));
    }
}
