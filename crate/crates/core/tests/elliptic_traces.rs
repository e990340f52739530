use imt_core::curves::CurveModel;
use imt_core::ecmatch::{ec_count, WeierstrassCurve};
use imt_core::pipeline::{run, Resolution, RunOptions};
use imt_core::quadfield::ImagQuadField;
use num_bigint::BigInt;

fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&c| BigInt::from(c)).collect()
}

/// Every resolved a_p equals the trace of `e`, counted directly.
fn traces_match(c: &CurveModel, d: u64, e: (i64, i64), up_to: u64) -> usize {
    let m = ImagQuadField::new(d).unwrap();
    let opts = RunOptions {
        primes_up_to: up_to,
        ..RunOptions::default()
    };
    let out = run(c, &m, &opts).unwrap();
    assert_eq!(out.violation_count(), 0);
    let e = WeierstrassCurve::new(e.0, e.1).unwrap();
    let mut compared = 0;
    for r in out.records.iter().filter(|r| r.p >= 5 && !e.is_bad(r.p)) {
        match r.a_p {
            Some(a) => {
                assert_eq!(a, ec_count(&e, r.p).unwrap().a_p, "p = {}", r.p);
                compared += 1;
            }
            None => assert_eq!(r.resolution, Some(Resolution::Unresolved)),
        }
    }
    compared
}

#[test]
fn d1_traces_are_those_of_y2_x3_plus_x() {
    let c = CurveModel::hyperelliptic("d1", ints(&[0, 1, 0, 1, 0, -1, 0, 1]), vec![2, 11]).unwrap();
    assert!(traces_match(&c, 1, (1, 0), 120) >= 25);
}

#[test]
fn d3_traces_are_those_of_y2_x3_plus_3664() {
    let c = CurveModel::superelliptic("d3", 3, ints(&[1, -1, 0, 0, 1]), vec![2, 3, 229]).unwrap();
    assert!(traces_match(&c, 3, (0, 3664), 120) >= 25);
}

#[test]
fn d2_traces_are_those_of_the_matched_curve() {
    let c = CurveModel::hyperelliptic("d2", ints(&[0, -1, 3, -2, -6, 10, 16, 7, 1]), vec![2, 3]).unwrap();
    assert!(traces_match(&c, 2, (-30, -56), 120) >= 25);
}
