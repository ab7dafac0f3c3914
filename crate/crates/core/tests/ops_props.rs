use bidisk_core::ops::{comp_norm_sequence, dbr_defect_check, toeplitz, verify_han, SymbolPair};
use bidisk_core::{BiPoly, Complex64, KernelExpr, Point2, TrigPoly};
use proptest::prelude::*;

fn trig_poly(deg: i64) -> impl Strategy<Value = TrigPoly> {
    prop::collection::vec((-deg..=deg, -deg..=deg, -2.0f64..2.0, -2.0f64..2.0), 0..=30).prop_map(|ts| {
        TrigPoly::from_terms(ts.into_iter().map(|(m, n, re, im)| (m, n, Complex64::new(re, im))))
    })
}

fn contractive_poly() -> impl Strategy<Value = BiPoly> {
    prop::collection::vec((0u32..=2, 0u32..=2, -1.0f64..1.0, -1.0f64..1.0), 1..=3).prop_map(|ts| {
        let p = BiPoly::from_terms(ts.into_iter().map(|(i, j, re, im)| (i, j, Complex64::new(re, im))));
        let l1: f64 = p.terms().map(|(_, c)| c.norm()).sum();
        if l1 > 1.0 {
            p.scale_real(1.0 / l1)
        } else {
            p
        }
    })
}

fn small_point() -> impl Strategy<Value = Point2> {
    (0.0f64..0.5, 0.0f64..std::f64::consts::TAU, 0.0f64..0.5, 0.0f64..std::f64::consts::TAU)
        .prop_map(|(r1, t1, r2, t2)| Point2::new(Complex64::from_polar(r1, t1), Complex64::from_polar(r2, t2)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn toeplitz_adjoint_is_conjugate_symbol(s in trig_poly(3), n in 1u32..7) {
        let a = toeplitz(&s.conj(), n);
        let b = toeplitz(&s, n).adjoint();
        prop_assert_eq!(a.matrix(), b.matrix());
    }

    #[test]
    fn toeplitz_product_identity_holds(f in trig_poly(3), g in trig_poly(3)) {
        prop_assert!(verify_han(&f, &g, 12) <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn composition_norms_nondecreasing(phi in contractive_poly(), psi in contractive_poly()) {
        let b = SymbolPair::new(phi, psi).unwrap();
        let seq = comp_norm_sequence(&b, &[1, 2, 3, 4, 5]);
        for w in seq.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-10 * w[1].max(1.0), "{seq:?}");
        }
    }

    #[test]
    fn defect_error_shrinks_as_n_doubles(z in small_point(), w in small_point(), k in 0usize..2) {
        let phi = [
            BiPoly::from_real_terms([(0, 0, 0.5), (1, 0, 0.5)]),
            BiPoly::monomial(1, 1, Complex64::new(1.0, 0.0)),
        ][k].clone();
        let exact = KernelExpr::dbr2(phi.clone()).unwrap().eval(&z, &w);
        let errs: Vec<f64> = [5, 10, 20, 40]
            .iter()
            .map(|&n| (dbr_defect_check(&phi, &w, &z, n) - exact).norm())
            .collect();
        for e in errs.windows(2) {
            prop_assert!(e[1] <= e[0] + 1e-9, "{errs:?}");
        }
        prop_assert!(errs[3] <= 1e-6);
    }
}
