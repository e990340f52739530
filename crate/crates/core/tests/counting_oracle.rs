use imt_core::curves::{oracle, CurveError, CurveModel};
use imt_core::ff::{is_prime, make_ext_field};
use num_bigint::BigInt;

fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&c| BigInt::from(c)).collect()
}

fn models() -> Vec<CurveModel> {
    vec![
        CurveModel::hyperelliptic("d1", ints(&[0, 1, 0, 1, 0, -1, 0, 1]), vec![2, 11]).unwrap(),
        CurveModel::hyperelliptic("d2", ints(&[0, -1, 3, -2, -6, 10, 16, 7, 1]), vec![2, 3]).unwrap(),
        CurveModel::superelliptic("d3", 3, ints(&[1, -1, 0, 0, 1]), vec![2, 3, 229]).unwrap(),
        CurveModel::plane_quartic(
            "d7",
            ints(&[0, 0, 2, 1, 1, 0, 0, -1, 2, 1, -1, -2, 0, -2, 1]),
            vec![2, 7],
        )
        .unwrap(),
        CurveModel::hyperelliptic("x7-5x", ints(&[0, -5, 0, 0, 0, 0, 0, 1]), vec![2, 3, 5]).unwrap(),
        CurveModel::hyperelliptic("x8+11x4+3", ints(&[3, 0, 0, 0, 11, 0, 0, 0, 1]), vec![2, 3, 109]).unwrap(),
        CurveModel::superelliptic("y4", 4, ints(&[1, -1, 0, 1]), vec![2, 23]).unwrap(),
        // a quartic where y appears to degree four, so fibers are quartics
        CurveModel::plane_quartic(
            "fermat-like",
            ints(&[1, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0, -1]),
            vec![2],
        )
        .unwrap(),
    ]
}

fn check(curve: &CurveModel, p: u64, k: usize) {
    let field = make_ext_field(p, k).unwrap();
    let fast = curve.count_points(&field);
    let slow = oracle::brute_force_count(curve, &field);
    match (fast, slow) {
        (Ok(a), Ok(b)) => assert_eq!(a, b, "{} over F_{}^{}", curve.name(), p, k),
        (Err(a), Err(b)) => assert!(a.is_bad_prime() && b.is_bad_prime()),
        (a, b) => panic!("{} p={p} k={k}: {a:?} vs {b:?}", curve.name()),
    }
}

#[test]
fn prime_fields() {
    for curve in models() {
        for p in (3..400).filter(|&p| is_prime(p)) {
            check(&curve, p, 1);
        }
    }
}

#[test]
fn quadratic_extensions() {
    for curve in models() {
        for p in (3..100).filter(|&p| is_prime(p)) {
            check(&curve, p, 2);
        }
    }
}

#[test]
fn cubic_extensions() {
    for curve in models() {
        for p in (3..22).filter(|&p| is_prime(p)) {
            check(&curve, p, 3);
        }
    }
}

#[test]
fn oracle_refuses_large_fields() {
    let curve = &models()[0];
    let field = make_ext_field(23, 3).unwrap();
    assert_eq!(
        oracle::brute_force_count(curve, &field),
        Err(CurveError::FieldTooLarge(12167))
    );
}

#[test]
fn triples_respect_weil_bound() {
    for curve in models() {
        for p in [13u64, 17, 19, 31] {
            if let Ok(c) = curve.count_triple(p) {
                assert_eq!(c.p, p);
            }
        }
    }
}
