//! Traces of Frobenius of the associated elliptic curve, and a bounded
//! search for a short Weierstrass model reproducing them.

use rayon::prelude::*;
use thiserror::Error;

use crate::ff::PrimeField;
use crate::imstruct::{HeckeKind, HeckeValue};
use crate::quadfield::ImagQuadField;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EcError {
    #[error("p = {p}: a_p = {a_p} violates the Hasse bound")]
    HasseViolation { p: u64, a_p: i64 },
    #[error("4A^3 + 27B^2 = 0 for (A, B) = ({0}, {1})")]
    Singular(i64, i64),
    #[error("p = {0} is bad for this curve")]
    BadPrime(u64),
    #[error("need at least {need} primes of data, have {have}")]
    TooFewPrimes { have: usize, need: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EllipticAp {
    pub p: u64,
    pub a_p: i64,
}

/// `y^2 = x^3 + A x + B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WeierstrassCurve {
    pub a: i64,
    pub b: i64,
}

pub const MIN_MATCH_PRIMES: usize = 20;
pub const DEFAULT_COEFF_BOUND: i64 = 200;
pub const DEFAULT_PRIME_BOUND: u64 = 300;

fn hasse_ok(p: u64, a_p: i64) -> bool {
    i128::from(a_p) * i128::from(a_p) <= 4 * i128::from(p)
}

pub fn ap_from_psi(h: &HeckeValue, m: &ImagQuadField) -> Result<EllipticAp, EcError> {
    let a_p = match h.kind {
        HeckeKind::Inert => 0,
        HeckeKind::Split => i64::try_from(m.trace(&h.psi)).unwrap_or(i64::MAX),
    };
    if !hasse_ok(h.p, a_p) {
        return Err(EcError::HasseViolation { p: h.p, a_p });
    }
    Ok(EllipticAp { p: h.p, a_p })
}

impl WeierstrassCurve {
    pub fn new(a: i64, b: i64) -> Result<Self, EcError> {
        let c = WeierstrassCurve { a, b };
        if c.disc_core() == 0 {
            return Err(EcError::Singular(a, b));
        }
        Ok(c)
    }

    /// `4 A^3 + 27 B^2`.
    fn disc_core(&self) -> i128 {
        let (a, b) = (i128::from(self.a), i128::from(self.b));
        4 * a * a * a + 27 * b * b
    }

    /// Whether `p` divides `6 (4 A^3 + 27 B^2)`.
    pub fn is_bad(&self, p: u64) -> bool {
        p == 2 || p == 3 || self.disc_core() % i128::from(p) == 0
    }
}

/// `a_p = p + 1 - #E(F_p)` by summing quadratic characters.
pub fn ec_count(e: &WeierstrassCurve, p: u64) -> Result<EllipticAp, EcError> {
    if e.is_bad(p) {
        return Err(EcError::BadPrime(p));
    }
    let f = PrimeField::new(p).map_err(|_| EcError::BadPrime(p))?;
    Ok(EllipticAp {
        p,
        a_p: ap_mod(&f, f.from_i64(e.a), f.from_i64(e.b)),
    })
}

fn ap_mod(f: &PrimeField, a: u64, b: u64) -> i64 {
    let sum: i64 = (0..f.p())
        .map(|x| {
            let v = f.add(f.mul(f.add(f.mul(x, x), a), x), b);
            i64::from(f.legendre(v))
        })
        .sum();
    -sum
}

/// Precomputed `a_p` for every `(A mod p, B mod p)`.
struct ApTable {
    p: u64,
    a_p: i64,
    table: Vec<i8>,
}

const TABLE_PRIMES: usize = 6;

/// All `(A, B)` with `|A|, |B| <= coeff_bound` whose traces agree with
/// `aps` at every common good prime up to `prime_bound`, sorted by
/// `(|A| + |B|, A, B)`.
pub fn find_matching_curve(
    aps: &[EllipticAp],
    coeff_bound: i64,
    prime_bound: u64,
) -> Result<Vec<WeierstrassCurve>, EcError> {
    let mut data: Vec<EllipticAp> = aps.iter().copied().filter(|e| e.p >= 5 && e.p <= prime_bound).collect();
    data.sort_unstable();
    data.dedup_by_key(|e| e.p);
    if data.len() < MIN_MATCH_PRIMES {
        return Err(EcError::TooFewPrimes {
            have: data.len(),
            need: MIN_MATCH_PRIMES,
        });
    }
    let tables: Vec<ApTable> = data
        .iter()
        .take(TABLE_PRIMES)
        .map(|e| {
            let f = PrimeField::new(e.p).expect("prime");
            let mut table = Vec::with_capacity((e.p * e.p) as usize);
            for a in 0..e.p {
                for b in 0..e.p {
                    table.push(ap_mod(&f, a, b) as i8);
                }
            }
            ApTable {
                p: e.p,
                a_p: e.a_p,
                table,
            }
        })
        .collect();
    let rest: Vec<(PrimeField, i64)> = data
        .iter()
        .skip(TABLE_PRIMES)
        .map(|e| (PrimeField::new(e.p).expect("prime"), e.a_p))
        .collect();

    let mut survivors: Vec<WeierstrassCurve> = (-coeff_bound..=coeff_bound)
        .into_par_iter()
        .flat_map_iter(|a| {
            let tables = &tables;
            let rest = &rest;
            (-coeff_bound..=coeff_bound).filter_map(move |b| {
                let e = WeierstrassCurve::new(a, b).ok()?;
                let mut compared = 0usize;
                for t in tables {
                    if e.is_bad(t.p) {
                        continue;
                    }
                    let p = t.p as i64;
                    let idx = (a.rem_euclid(p) * p + b.rem_euclid(p)) as usize;
                    if i64::from(t.table[idx]) != t.a_p {
                        return None;
                    }
                    compared += 1;
                }
                for (f, a_p) in rest {
                    if e.is_bad(f.p()) {
                        continue;
                    }
                    if ap_mod(f, f.from_i64(a), f.from_i64(b)) != *a_p {
                        return None;
                    }
                    compared += 1;
                }
                (compared >= MIN_MATCH_PRIMES).then_some(e)
            })
        })
        .collect();
    survivors.sort_by_key(|e| (e.a.abs() + e.b.abs(), e.a, e.b));
    Ok(survivors)
}

/// Fraction of good primes `5 <= p <= prime_bound` with `a_p = 0`.
pub fn zero_trace_fraction(e: &WeierstrassCurve, prime_bound: u64) -> f64 {
    let aps: Vec<i64> = (5..=prime_bound)
        .filter(|&p| crate::ff::is_prime(p))
        .filter_map(|p| ec_count(e, p).ok())
        .map(|x| x.a_p)
        .collect();
    aps.iter().filter(|&&a| a == 0).count() as f64 / aps.len().max(1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::is_prime;
    use crate::quadfield::QuadInt;

    /// Point count by enumerating all `(x, y)`.
    fn naive_ap(a: i64, b: i64, p: u64) -> i64 {
        let pi = p as i64;
        let mut n = 1i64;
        for x in 0..pi {
            for y in 0..pi {
                if (y * y - x * x * x - a * x - b).rem_euclid(pi) == 0 {
                    n += 1;
                }
            }
        }
        pi + 1 - n
    }

    #[test]
    fn counts_match_enumeration() {
        for (a, b) in [(1, 0), (0, 1), (-2, 3), (7, -11), (0, -2)] {
            let e = WeierstrassCurve::new(a, b).unwrap();
            for p in (5..80).filter(|&p| is_prime(p)) {
                if let Ok(ap) = ec_count(&e, p) {
                    assert_eq!(ap.a_p, naive_ap(a, b, p), "({a},{b}) p={p}");
                }
            }
        }
    }

    #[test]
    fn cm_examples() {
        let e = WeierstrassCurve::new(1, 0).unwrap();
        for p in [7u64, 11, 19, 23, 31] {
            assert_eq!(ec_count(&e, p).unwrap().a_p, 0);
        }
        let e = WeierstrassCurve::new(0, 1).unwrap();
        assert_eq!(ec_count(&e, 5).unwrap().a_p, 0);
        assert_eq!(ec_count(&e, 3), Err(EcError::BadPrime(3)));
        assert!(WeierstrassCurve::new(-3, 2).is_err());
    }

    #[test]
    fn traces_from_psi() {
        let m = ImagQuadField::new(1).unwrap();
        let h = HeckeValue {
            p: 5,
            kind: HeckeKind::Split,
            psi: QuadInt::new(2, 1),
        };
        assert_eq!(ap_from_psi(&h, &m).unwrap().a_p, 4);
        let inert = HeckeValue {
            p: 7,
            kind: HeckeKind::Inert,
            psi: QuadInt::new(-7, 0),
        };
        assert_eq!(ap_from_psi(&inert, &m).unwrap().a_p, 0);
        let bad = HeckeValue {
            p: 5,
            kind: HeckeKind::Split,
            psi: QuadInt::new(3, 0),
        };
        assert!(matches!(ap_from_psi(&bad, &m), Err(EcError::HasseViolation { .. })));
    }

    fn aps_of(a: i64, b: i64, bound: u64) -> Vec<EllipticAp> {
        let e = WeierstrassCurve::new(a, b).unwrap();
        (5..=bound)
            .filter(|&p| is_prime(p))
            .filter_map(|p| ec_count(&e, p).ok())
            .collect()
    }

    #[test]
    fn self_match() {
        let aps = aps_of(0, -2, 150);
        let found = find_matching_curve(&aps, 12, 150).unwrap();
        assert!(found.contains(&WeierstrassCurve { a: 0, b: -2 }));
        // survivors agree everywhere they are good
        for e in &found {
            for ap in &aps {
                if let Ok(x) = ec_count(e, ap.p) {
                    assert_eq!(x.a_p, ap.a_p);
                }
            }
        }
        assert!(zero_trace_fraction(&found[0], 300) >= 0.45);
    }

    #[test]
    fn random_split_traces_match_nothing() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let aps: Vec<EllipticAp> = (5..300u64)
            .filter(|&p| is_prime(p))
            .map(|p| {
                let a_p = if p % 4 == 3 {
                    0
                } else {
                    let r = (2.0 * (p as f64).sqrt()).floor() as i64;
                    rng.gen_range(-r..=r)
                };
                EllipticAp { p, a_p }
            })
            .collect();
        assert!(find_matching_curve(&aps, 40, 300).unwrap().is_empty());
    }

    #[test]
    fn too_few_primes() {
        let aps = aps_of(1, 1, 40);
        assert!(matches!(
            find_matching_curve(&aps, 5, 40),
            Err(EcError::TooFewPrimes { .. })
        ));
    }
}
