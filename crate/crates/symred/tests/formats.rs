use proptest::prelude::*;
use symred::formats::{parse_number, read_spectrum, write_spectrum};
use symred_core::reduction::SpectrumEntry;
use symred_core::scalar::{Complex64, Number, Rational, Scalar};

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![any::<f64>().prop_filter("finite", |v| v.is_finite()), -1e3..1e3f64, Just(0.0), Just(-0.0)]
}

proptest! {
    #[test]
    fn spectrum_round_trip(entries in proptest::collection::vec((finite(), finite(), "[A-Za-z0-9_\\[\\],x ]{1,8}", 0usize..4), 0..20)) {
        let spectrum: Vec<SpectrumEntry> = entries
            .into_iter()
            .map(|(re, im, label, copy)| SpectrumEntry { value: Complex64::new(re, im), label, copy })
            .collect();
        let mut buf = Vec::new();
        write_spectrum(&mut buf, &spectrum).unwrap();
        let back = read_spectrum(buf.as_slice()).unwrap();
        prop_assert_eq!(back.len(), spectrum.len());
        for (a, b) in back.iter().zip(&spectrum) {
            prop_assert_eq!(a.value.re.to_bits(), b.value.re.to_bits());
            prop_assert_eq!(a.value.im.to_bits(), b.value.im.to_bits());
            prop_assert_eq!(&a.label, &b.label);
            prop_assert_eq!(a.copy, b.copy);
        }
    }

    #[test]
    fn rational_literals_round_trip(n in -10_000i64..10_000, d in 1i64..5_000) {
        let q = Number::Exact(Rational::from_ratio(n, d));
        prop_assert_eq!(parse_number(&q.to_string()).unwrap(), q);
    }

    #[test]
    fn complex_literals_round_trip(re in finite(), im in finite().prop_filter("nonzero", |v| *v != 0.0)) {
        let z = Number::Approx(Complex64::new(re, im));
        prop_assert_eq!(parse_number(&z.to_string()).unwrap(), z);
    }
}
