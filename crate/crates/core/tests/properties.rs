use std::f64::consts::PI;

use proptest::prelude::*;

use rbfmol::constants::{heat_constants, interp_constants};
use rbfmol::harness::{estimate_rate, pairwise_orders, RateOutcome};
use rbfmol::lattice::DEFAULT_TOL;
use rbfmol::multiplier::heat_defect;
use rbfmol::*;

fn basis(which: u8, c: f64) -> BasisFunction {
    match which % 3 {
        0 => BasisFunction::gaussian(1, c).unwrap(),
        1 => BasisFunction::multiquadric(1, c).unwrap(),
        _ => BasisFunction::polyharmonic(1, 3.0).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn symbol_is_a_probability(which in 0u8..3, c in 0.5f64..2.0, eta in -10.0f64..10.0) {
        let sym = CardinalSymbol::new(&basis(which, c), DEFAULT_TOL).unwrap();
        let v = sym.value(&[eta]);
        prop_assert!((-1e-15..=1.0 + 1e-15).contains(&v), "{v}");
        prop_assert!((v + sym.complement(&[eta]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn symbol_is_even(which in 0u8..3, eta in 0.0f64..7.0) {
        let sym = CardinalSymbol::new(&basis(which, 1.0), DEFAULT_TOL).unwrap();
        prop_assert!((sym.value(&[eta]) - sym.value(&[-eta])).abs() < 1e-14);
    }

    #[test]
    fn periodization_is_periodic(which in 0u8..3, eta in -PI..PI, k in -3i32..3) {
        let sym = CardinalSymbol::new(&basis(which, 1.0), DEFAULT_TOL).unwrap();
        let a = sym.periodization(&[eta]);
        let b = sym.periodization(&[eta + 2.0 * PI * k as f64]);
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn heat_defect_is_nonnegative(eta in -PI..PI, planar in any::<bool>()) {
        let phi = if planar {
            BasisFunction::multiquadric(2, 1.0).unwrap()
        } else {
            BasisFunction::polyharmonic(1, 3.0).unwrap()
        };
        let x: Vec<f64> = (0..phi.n).map(|d| eta * (1.0 - 0.3 * d as f64)).collect();
        prop_assert!(heat_defect(&phi, &x).unwrap() >= -1e-13);
    }

    #[test]
    fn power_laws_are_recovered(p in 0.5f64..6.0, scale in 1e-3f64..1e3) {
        let hs: Vec<f64> = (2..8).map(|k| 2f64.powi(-k)).collect();
        let es: Vec<f64> = hs.iter().map(|h| scale * h.powf(p)).collect();
        match estimate_rate(&hs, &es).unwrap() {
            RateOutcome::Fit(f) => prop_assert!((f.slope - p).abs() < 1e-9),
            other => prop_assert!(false, "{other:?}"),
        }
        prop_assert!(pairwise_orders(&hs, &es).iter().all(|o| (o - p).abs() < 1e-9));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn lower_constant_is_below_upper(which in 0u8..3, c in 0.75f64..2.0) {
        let phi = basis(which, c);
        let k = interp_constants(&phi, &[]).unwrap();
        prop_assert!(k.l_lower <= k.l_upper * (1.0 + 1e-12));
        prop_assert!(k.l_lower >= 0.0);
        if which % 3 != 0 {
            let g = heat_constants(&phi).unwrap();
            prop_assert!(g.g_lower <= g.g_upper * (1.0 + 1e-12));
        }
    }

    #[test]
    fn heat_stencil_annihilates_constants(h in 0.1f64..1.0, which in 1u8..3) {
        let heat = make_symbol(&SymbolSpec::Heat, 1).unwrap();
        let s = generator_stencil(&basis(which, 1.0), &heat, h, 32, 1e-10).unwrap();
        let scale = s.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        // algebraic stencil tails are cut at the half width
        let tol = if which == 1 { 1e-5 } else { 1e-9 };
        prop_assert!(s.row_sum().norm() < tol * scale, "{}", s.row_sum().norm() / scale);
        for j in 1..=32i64 {
            prop_assert!((s.get(&[j]) - s.get(&[-j])).norm() < 1e-10 * scale);
        }
    }

    #[test]
    fn config_hash_is_stable(start in 1i32..4, count in 4usize..9, sigma in 0.5f64..2.0) {
        let text = format!(
            r#"{{"kind":"interp_convergence","basis":{{"family":"polyharmonic","n":1,"p":3}},
            "datum":{{"n":1,"kind":"gaussian","params":{{"sigma":{sigma}}}}},
            "ladder":{{"start":{start},"count":{count}}}}}"#
        );
        let a = ExperimentConfig::from_json(&text).unwrap();
        let b = ExperimentConfig::from_json(&a.canonical()).unwrap();
        prop_assert_eq!(a.hash(), b.hash());
        prop_assert_eq!(a.hash().len(), 16);
    }
}
