use num_complex::Complex64;
use proptest::prelude::*;

use symctl::feedback::SkewFeedback;
use symctl::io::{from_json, poly_from_doc, poly_to_doc, to_json, FeedbackDoc, MatrixDoc, RealizationDoc};
use symctl::{CMatrix, Error, Poly, Realization, SymmetryType};

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO,
        Just(f64::MAX),
        Just(f64::MIN_POSITIVE),
        Just(-0.0),
    ]
}

fn complex() -> impl Strategy<Value = Complex64> {
    (finite(), finite()).prop_map(|(re, im)| Complex64::new(re, im))
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec(complex(), rows * cols).prop_map(move |v| CMatrix::from_row_slice(rows, cols, &v))
}

fn same_bits(a: &CMatrix, b: &CMatrix) -> bool {
    a.shape() == b.shape()
        && a.iter().zip(b.iter()).all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits())
}

proptest! {
    #[test]
    fn matrices_round_trip_bit_exactly(m in (0usize..5, 0usize..5).prop_flat_map(|(r, c)| matrix(r, c))) {
        let text = to_json(&MatrixDoc::from(&m)).unwrap();
        let doc: MatrixDoc = from_json(&text).unwrap();
        let back = CMatrix::try_from(&doc).unwrap();
        prop_assert!(same_bits(&m, &back));
    }

    #[test]
    fn realizations_round_trip(
        (a, b, c, d) in (0usize..4, 1usize..4).prop_flat_map(|(n, m)| (matrix(n, n), matrix(n, m), matrix(m, n), matrix(m, m))),
        tag in prop::option::of(prop::sample::select(SymmetryType::ALL.to_vec())),
    ) {
        let r = Realization::new(a, b, c, d).unwrap();
        let text = to_json(&RealizationDoc::new(&r, tag)).unwrap();
        let doc: RealizationDoc = from_json(&text).unwrap();
        prop_assert_eq!(doc.symmetry, tag);
        let back = doc.realization().unwrap();
        prop_assert!(same_bits(&r.a, &back.a) && same_bits(&r.b, &back.b));
        prop_assert!(same_bits(&r.c, &back.c) && same_bits(&r.d, &back.d));
    }

    #[test]
    fn feedback_and_polynomials_round_trip(coords in prop::collection::vec(complex(), 6)) {
        let f = SkewFeedback::new(4, coords.clone()).unwrap();
        let doc: FeedbackDoc = from_json(&to_json(&FeedbackDoc::from(&f)).unwrap()).unwrap();
        let back = SkewFeedback::try_from(&doc).unwrap();
        for (x, y) in f.coords.iter().zip(&back.coords) {
            prop_assert_eq!(x.re.to_bits(), y.re.to_bits());
            prop_assert_eq!(x.im.to_bits(), y.im.to_bits());
        }
        let mut monic = coords;
        monic.push(Complex64::new(1.0, 0.0));
        let p = Poly::new(monic);
        let q = poly_from_doc(&from_json::<Vec<[f64; 2]>>(&to_json(&poly_to_doc(&p)).unwrap()).unwrap()).unwrap();
        prop_assert_eq!(p.coeffs().len(), q.coeffs().len());
        for (x, y) in p.coeffs().iter().zip(q.coeffs()) {
            prop_assert_eq!(x.re.to_bits(), y.re.to_bits());
            prop_assert_eq!(x.im.to_bits(), y.im.to_bits());
        }
    }
}

#[test]
fn malformed_documents_are_rejected() {
    let short = r#"{"rows": 2, "cols": 2, "data": [[1.0, 0.0]]}"#;
    let doc: MatrixDoc = from_json(short).unwrap();
    assert!(matches!(CMatrix::try_from(&doc), Err(Error::Format(_))));
    assert!(from_json::<MatrixDoc>(r#"{"rows": 1, "cols": 1, "data": [[1.0, 0.0]], "extra": 1}"#).is_err());
    assert!(from_json::<MatrixDoc>("not json").is_err());
}
