use nalgebra::DMatrix;
use proptest::prelude::*;
use slicecalc::json::{CalcResultJson, ElementJson, MatrixJson, SpectrumJson};
use slicecalc::lang::parse_function;
use slicecalc_core::calculus::CalcResult;
use slicecalc_core::spectrum::{SSpectrum, SpectralSphere};
use slicecalc_core::{CliffordElement, CliffordMatrix, ImaginaryUnit, MultiIndex};

fn any_float() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), -1e3..1e3f64, any::<f64>().prop_filter("finite", |x| x.is_finite())]
}

fn element() -> impl Strategy<Value = CliffordElement> {
    (0usize..=11).prop_flat_map(|n| {
        prop::collection::vec(prop_oneof![3 => Just(0.0), 1 => any_float()], 1 << n)
            .prop_map(move |c| CliffordElement::from_coeffs(n, c).unwrap())
    })
}

fn operator() -> impl Strategy<Value = CliffordMatrix> {
    (1usize..=3, 0usize..=10).prop_flat_map(|(d, n)| {
        prop::collection::btree_map(0usize..1 << n, prop::collection::vec(any_float(), d * d), 0..6).prop_map(
            move |comps| {
                let comps = comps
                    .into_iter()
                    .map(|(m, xs)| (MultiIndex::from_mask(m).unwrap(), DMatrix::from_row_slice(d, d, &xs)));
                CliffordMatrix::from_components(d, n, comps.collect::<Vec<_>>()).unwrap()
            },
        )
    })
}

fn round<T: serde::Serialize + serde::de::DeserializeOwned>(x: &T) -> T {
    serde_json::from_str(&serde_json::to_string(x).unwrap()).unwrap()
}

proptest! {
    #[test]
    fn elements_round_trip(a in element()) {
        let back = round(&ElementJson::from_element(&a)).to_element().unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn operators_round_trip(t in operator()) {
        let back = round(&MatrixJson::from_matrix(&t)).to_matrix().unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn spectra_round_trip(parts in prop::collection::vec((any_float(), 0.0..1e6f64, 1usize..9), 1..6)) {
        let spheres = parts.into_iter().map(|(u, v, m)| SpectralSphere { u, v, multiplicity: m }).collect();
        let s = SSpectrum::from_spheres(spheres);
        prop_assert_eq!(round(&SpectrumJson::from_spectrum(&s)).to_spectrum(), s);
    }

    #[test]
    fn calc_results_round_trip(t in operator(), nodes in 2usize..9000, err in 0.0..1.0f64, j in 0usize..100) {
        prop_assume!(t.n() >= 1);
        let unit = ImaginaryUnit::generator(t.n(), 1 + j % t.n()).unwrap();
        let r = CalcResult { value: t, nodes, richardson_error: err, unit };
        prop_assert_eq!(round(&CalcResultJson::from_result(&r)).to_result().unwrap(), r);
    }

    #[test]
    fn polynomial_labels_reparse(coeffs in prop::collection::vec(-10.0..10.0f64, 1..6)) {
        let text = format!("poly:{}", coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","));
        let f = parse_function(&text).unwrap();
        let z = num_complex::Complex64::new(0.3, -0.2);
        let direct = coeffs.iter().rev().fold(num_complex::Complex64::new(0.0, 0.0), |acc, c| acc * z + c);
        prop_assert!((f.eval_shadow(z).unwrap() - direct).norm() <= 1e-12 * (1.0 + direct.norm()));
    }

    #[test]
    fn arbitrary_text_never_panics(text in "\\PC{0,24}") {
        let _ = parse_function(&text);
    }
}
