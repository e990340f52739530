//! Imaginary-multiplication structure of `L_p`: the inert factorization, the
//! split factorization into conjugate cubics over `O_M`, the values of the
//! Hecke character `psi`, and a bounded search for a modulus on which the
//! unit part of `psi` is constant.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::Zero;
use thiserror::Error;

use crate::curves::{CurveError, CurveModel};
use crate::lpoly::{shortcut_inert, LPolynomial, LpolyError};
use crate::quadfield::{ImagQuadField, QuadInt, SplitType};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ImError {
    #[error("theorem violation at p = {p}: {reason}")]
    TheoremViolation { p: u64, reason: String },
    #[error("p = {p}: no cubic factor over O_M")]
    NoFactorFound { p: u64 },
    #[error("p = {p}: {} distinct conjugate factor pairs", .factors.len())]
    MultipleFactorsFound { p: u64, factors: Vec<CubicFactor> },
    #[error("p = {p}: w is not divisible by p")]
    NonDivisible { p: u64 },
    #[error("p = {p}: psi * conj(psi) = {norm}, expected {expected}")]
    NormCheckFailed { p: u64, norm: BigInt, expected: BigInt },
    #[error("p = {0} is not inert")]
    NotInert(u64),
    #[error("p = {0} is not split")]
    NotSplit(u64),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("need at least {need} split primes, have {have}")]
    TooFewPrimes { have: usize, need: usize },
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Lpoly(#[from] LpolyError),
}

impl ImError {
    /// Errors that contradict the predicted structure, as opposed to input
    /// or precondition problems.
    pub fn is_violation(&self) -> bool {
        matches!(
            self,
            ImError::TheoremViolation { .. }
                | ImError::NoFactorFound { .. }
                | ImError::NonDivisible { .. }
                | ImError::NormCheckFailed { .. }
                | ImError::Lpoly(LpolyError::S1NonZero { .. })
        )
    }
}

/// `L = (1 + p T^2)(1 - t T^2 + p^2 T^4)` with `b = p - t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InertFactorization {
    pub p: u64,
    pub b: i64,
    pub t: i64,
}

/// `1 - u T + v T^2 - w T^3` over `O_M`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CubicFactor {
    pub u: QuadInt,
    pub v: QuadInt,
    pub w: QuadInt,
}

/// The canonical factor and its partner, each recovered from its own roots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitFactorization {
    pub p: u64,
    pub factor: CubicFactor,
    pub conjugate: CubicFactor,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeckeKind {
    Split,
    Inert,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeckeValue {
    pub p: u64,
    pub kind: HeckeKind,
    pub psi: QuadInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterConsistencyReport {
    /// Smallest consistent modulus, if one was found.
    pub modulus: Option<u64>,
    /// Residue `(x mod N, y mod N)` of a generator, mapped to the unit `psi / generator`.
    pub table: BTreeMap<(i64, i64), QuadInt>,
    pub consistent: bool,
    /// Conflicts at the largest modulus tried when none was consistent.
    pub violations: Vec<String>,
    pub primes_used: usize,
    /// Number of `(generator, unit)` samples behind the table.
    pub samples: usize,
}

impl CharacterConsistencyReport {
    /// Mean number of samples per table entry; values near 1 mean the
    /// modulus is barely constrained by the data.
    pub fn density(&self) -> f64 {
        self.samples as f64 / self.table.len().max(1) as f64
    }
}

pub const MIN_CONSISTENCY_PRIMES: usize = 10;
pub const DEFAULT_MAX_MODULUS: u64 = 1024;

pub fn check_inert(l: &LPolynomial, p: u64) -> Result<InertFactorization, ImError> {
    let violation = |reason: String| ImError::TheoremViolation { p, reason };
    if l.a1 != 0 || l.a3 != 0 {
        return Err(violation(format!(
            "L is not a polynomial in T^2: a1 = {}, a3 = {}",
            l.a1, l.a3
        )));
    }
    let pp = p as i64;
    let b = l.a2;
    let t = pp - b;
    if t.abs() > 2 * pp {
        return Err(violation(format!("|t| = {} exceeds 2p", t.abs())));
    }
    if !(-pp..=3 * pp).contains(&b) {
        return Err(violation(format!("b = {b} outside [-p, 3p]")));
    }
    let (p128, t128) = (i128::from(pp), i128::from(t));
    let product = poly_mul_i128(&[1, 0, p128], &[1, 0, -t128, 0, p128 * p128]);
    if product != l.coefficients() {
        return Err(violation("(1 + pT^2)(1 - tT^2 + p^2T^4) differs from L".into()));
    }
    Ok(InertFactorization { p, b, t })
}

fn poly_mul_i128(a: &[i128], b: &[i128]) -> [i128; 7] {
    let mut out = [0i128; 7];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

impl CubicFactor {
    /// Coefficients of `1 - u T + v T^2 - w T^3`, ascending.
    pub fn coefficients(&self, m: &ImagQuadField) -> [QuadInt; 4] {
        [QuadInt::from_int(1), m.neg(&self.u), self.v.clone(), m.neg(&self.w)]
    }

    pub fn conj(&self, m: &ImagQuadField) -> CubicFactor {
        CubicFactor {
            u: m.conj(&self.u),
            v: m.conj(&self.v),
            w: m.conj(&self.w),
        }
    }

    /// Whether `self * other` equals `L` coefficientwise in `O_M`.
    pub fn times_equals(&self, other: &CubicFactor, m: &ImagQuadField, l: &LPolynomial) -> bool {
        let a = self.coefficients(m);
        let b = other.coefficients(m);
        let target = l.coefficients();
        (0..7usize).all(|k| {
            let mut acc = QuadInt::from_int(0);
            for i in k.saturating_sub(3)..=k.min(3) {
                acc = m.add(&acc, &m.mul(&a[i], &b[k - i]));
            }
            acc == QuadInt::from_int(target[k])
        })
    }

    fn is_canonical(&self) -> bool {
        self.w.y > BigInt::zero() || (self.w.y.is_zero() && self.w.x > BigInt::zero())
    }
}

fn factor_from_roots(m: &ImagQuadField, roots: &[Complex64]) -> CubicFactor {
    let e1: Complex64 = roots.iter().sum();
    let e2 = roots[0] * roots[1] + roots[0] * roots[2] + roots[1] * roots[2];
    let e3 = roots[0] * roots[1] * roots[2];
    CubicFactor {
        u: m.round(e1),
        v: m.round(e2),
        w: m.round(e3),
    }
}

/// Searches the ten splittings of the six roots into complementary triples
/// for a factor `c` with `c * conj(c) = L` exactly.
pub fn split_cubic_factor(l: &LPolynomial, m: &ImagQuadField) -> Result<SplitFactorization, ImError> {
    let mut pairs = split_cubic_factors(l, m)?;
    if pairs.len() == 1 {
        return Ok(pairs.pop().unwrap());
    }
    Err(ImError::MultipleFactorsFound {
        p: l.p,
        factors: pairs.into_iter().map(|s| s.factor).collect(),
    })
}

/// Every verified conjugate pair, canonical factor first, in discovery order.
pub fn split_cubic_factors(l: &LPolynomial, m: &ImagQuadField) -> Result<Vec<SplitFactorization>, ImError> {
    let p = l.p;
    let roots = l.evaluate_roots()?;
    let mut pairs: Vec<SplitFactorization> = Vec::new();
    for i in 1..6 {
        for j in i + 1..6 {
            // triples containing root 0 enumerate each complementary pair once
            let chosen = [0, i, j];
            let rest: Vec<usize> = (0..6).filter(|k| !chosen.contains(k)).collect();
            let c = factor_from_roots(m, &chosen.map(|k| roots[k]));
            let d = factor_from_roots(m, &[roots[rest[0]], roots[rest[1]], roots[rest[2]]]);
            if !c.times_equals(&c.conj(m), m, l) {
                continue;
            }
            let (factor, conjugate) = if c.is_canonical() { (c, d) } else { (d, c) };
            if !pairs.iter().any(|s| s.factor == factor) {
                pairs.push(SplitFactorization { p, factor, conjugate });
            }
        }
    }
    if pairs.is_empty() {
        return Err(ImError::NoFactorFound { p });
    }
    Ok(pairs)
}

/// `psi = w / p` for a verified cubic factor.
pub fn extract_psi_split(p: u64, factor: &CubicFactor, m: &ImagQuadField) -> Result<HeckeValue, ImError> {
    let pb = BigInt::from(p);
    let w_norm = m.norm(&factor.w);
    if w_norm != pb.pow(3) {
        return Err(ImError::TheoremViolation {
            p,
            reason: format!("Nm(w) = {w_norm}, expected p^3"),
        });
    }
    if !m.divisible_by(&factor.w, &pb) {
        return Err(ImError::NonDivisible { p });
    }
    let psi = QuadInt::new(factor.w.x.div_floor(&pb), factor.w.y.div_floor(&pb));
    let norm = m.norm(&psi);
    if norm != pb {
        return Err(ImError::NormCheckFailed { p, norm, expected: pb });
    }
    Ok(HeckeValue {
        p,
        kind: HeckeKind::Split,
        psi,
    })
}

/// `psi = -p` at an inert prime, checked against the `(1 + pT^2)` factor.
pub fn extract_psi_inert(f: &InertFactorization, m: &ImagQuadField) -> Result<HeckeValue, ImError> {
    let p = f.p;
    let pp = i128::from(p);
    // the quadratic factor 1 + pT^2 = 1 - psi T^2 with psi = -p
    let psi_from_factor = -pp;
    let product = poly_mul_i128(&[1, 0, -psi_from_factor], &[1, 0, -i128::from(f.t), 0, pp * pp]);
    if product[2] != i128::from(f.b) || product[4] != pp * i128::from(f.b) {
        return Err(ImError::TheoremViolation {
            p,
            reason: "the inert factorization does not carry a (1 + pT^2) factor".into(),
        });
    }
    let psi = QuadInt::from_int(BigInt::from(psi_from_factor));
    let norm = m.norm(&psi);
    let expected = BigInt::from(p).pow(2);
    if norm != expected {
        return Err(ImError::NormCheckFailed { p, norm, expected });
    }
    Ok(HeckeValue {
        p,
        kind: HeckeKind::Inert,
        psi,
    })
}

/// The value at the conjugate prime equals the conjugate value.
pub fn conjugation_check(psi_p: &HeckeValue, psi_pbar: &HeckeValue, m: &ImagQuadField) -> bool {
    psi_p.p == psi_pbar.p && psi_pbar.psi == m.conj(&psi_p.psi)
}

/// Finds the smallest `N <= n_max` such that `psi / alpha`, over every
/// generator `alpha` of the prime ideal `(psi)`, depends only on
/// `alpha mod N`.
pub fn character_consistency(
    values: &[HeckeValue],
    m: &ImagQuadField,
    n_max: u64,
) -> Result<CharacterConsistencyReport, ImError> {
    let split = values.iter().filter(|v| v.kind == HeckeKind::Split).count();
    if split < MIN_CONSISTENCY_PRIMES {
        return Err(ImError::TooFewPrimes {
            have: split,
            need: MIN_CONSISTENCY_PRIMES,
        });
    }
    let (ring, samples) = unit_samples(values, m)?;
    Ok(search_modulus(ring, &samples, 1, n_max, split))
}

/// Smallest consistent modulus with no lower bound on the number of primes.
pub fn learn_character(
    values: &[HeckeValue],
    m: &ImagQuadField,
    n_max: u64,
) -> Result<CharacterConsistencyReport, ImError> {
    let (ring, samples) = unit_samples(values, m)?;
    let primes = values.iter().filter(|v| v.kind == HeckeKind::Split).count();
    Ok(search_modulus(ring, &samples, 1, n_max, primes))
}

/// Whether `value` agrees with a learned table: `None` when none of its
/// generator residues occur in the table.
pub fn table_agrees(
    report: &CharacterConsistencyReport,
    value: &HeckeValue,
    m: &ImagQuadField,
) -> Result<Option<bool>, ImError> {
    let Some(n) = report.modulus else {
        return Ok(None);
    };
    let (_, samples) = unit_samples(std::slice::from_ref(value), m)?;
    let ni = n as i64;
    let mut hits = 0;
    for s in samples.iter().filter(|s| n % s.p != 0) {
        let k = (s.alpha.0.rem_euclid(ni), s.alpha.1.rem_euclid(ni));
        if let Some(z) = report.table.get(&k) {
            if small(z) != s.zeta {
                return Ok(Some(false));
            }
            hits += 1;
        }
    }
    Ok((hits > 0).then_some(true))
}

/// `omega^2 = t omega - n`.
#[derive(Clone, Copy)]
struct Ring {
    t: i64,
    n: i64,
}

impl Ring {
    fn mul(&self, a: (i64, i64), b: (i64, i64)) -> (i64, i64) {
        let yy = a.1 * b.1;
        (a.0 * b.0 - self.n * yy, a.0 * b.1 + a.1 * b.0 + self.t * yy)
    }

    fn mul_mod(&self, a: (i64, i64), b: (i64, i64), m: i64) -> (i64, i64) {
        let (x, y) = self.mul(a, b);
        (x.rem_euclid(m), y.rem_euclid(m))
    }
}

struct Sample {
    p: u64,
    alpha: (i64, i64),
    zeta: (i64, i64),
}

fn small(q: &QuadInt) -> (i64, i64) {
    (
        i64::try_from(&q.x).expect("fits in i64"),
        i64::try_from(&q.y).expect("fits in i64"),
    )
}

/// `(alpha, psi / alpha)` over all associates `alpha` of the generator of `(psi)`.
fn unit_samples(values: &[HeckeValue], m: &ImagQuadField) -> Result<(Ring, Vec<Sample>), ImError> {
    if m.class_number() != 1 {
        return Err(ImError::Unsupported(format!("class number {} > 1", m.class_number())));
    }
    let omega = QuadInt::new(0, 1);
    let sq = small(&m.mul(&omega, &omega));
    let ring = Ring { t: sq.1, n: -sq.0 };
    let units = m.units();
    let mut samples = Vec::new();
    for v in values.iter().filter(|v| v.kind == HeckeKind::Split) {
        let g = match m.split_type(v.p) {
            SplitType::Split { pi: Some(g) } => g,
            _ => return Err(ImError::NotSplit(v.p)),
        };
        let base = [g.clone(), m.conj(&g)]
            .into_iter()
            .find(|cand| m.div_exact(&v.psi, cand).is_some_and(|z| m.is_unit(&z)))
            .ok_or_else(|| ImError::TheoremViolation {
                p: v.p,
                reason: "psi does not generate a prime above p".into(),
            })?;
        for u in &units {
            let alpha = m.mul(u, &base);
            let zeta = m.div_exact(&v.psi, &alpha).expect("associate divides");
            samples.push(Sample {
                p: v.p,
                alpha: small(&alpha),
                zeta: small(&zeta),
            });
        }
    }
    Ok((ring, samples))
}

/// The residue map must be single valued and multiplicative wherever the
/// product of two sampled residues is itself sampled.
fn search_modulus(
    ring: Ring,
    samples: &[Sample],
    from: u64,
    n_max: u64,
    primes_used: usize,
) -> CharacterConsistencyReport {
    let mut last_violations = Vec::new();
    for n in from..=n_max {
        let ni = n as i64;
        let mut table: BTreeMap<(i64, i64), (i64, i64)> = BTreeMap::new();
        let mut violations = Vec::new();
        for s in samples.iter().filter(|s| n % s.p != 0) {
            let k = (s.alpha.0.rem_euclid(ni), s.alpha.1.rem_euclid(ni));
            match table.get(&k) {
                Some(&prev) if prev != s.zeta => {
                    violations.push(format!("N = {n}: residue {k:?} maps to both {prev:?} and {:?}", s.zeta));
                    break;
                }
                Some(_) => {}
                None => {
                    table.insert(k, s.zeta);
                }
            }
        }
        if violations.is_empty() {
            let entries: Vec<((i64, i64), (i64, i64))> = table.iter().map(|(k, z)| (*k, *z)).collect();
            'outer: for (i, &(k1, z1)) in entries.iter().enumerate() {
                for &(k2, z2) in &entries[..=i] {
                    let k = ring.mul_mod(k1, k2, ni);
                    if let Some(&z) = table.get(&k) {
                        if z != ring.mul(z1, z2) {
                            violations.push(format!("N = {n}: not multiplicative at {k1:?} * {k2:?}"));
                            break 'outer;
                        }
                    }
                }
            }
        }
        if violations.is_empty() {
            return CharacterConsistencyReport {
                modulus: Some(n),
                table: table.into_iter().map(|(k, z)| (k, QuadInt::new(z.0, z.1))).collect(),
                consistent: true,
                violations,
                primes_used,
                samples: samples.len(),
            };
        }
        last_violations = violations;
    }
    CharacterConsistencyReport {
        modulus: None,
        table: BTreeMap::new(),
        consistent: false,
        violations: last_violations,
        primes_used,
        samples: samples.len(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShortcutOutcome {
    pub counts: [u64; 2],
    pub lpoly: LPolynomial,
    pub factorization: InertFactorization,
    pub elapsed: Duration,
}

/// Inert-prime pipeline from `N_1, N_2` alone.
pub fn shortcut_pipeline(c: &CurveModel, m: &ImagQuadField, p: u64) -> Result<ShortcutOutcome, ImError> {
    if m.split_type(p) != SplitType::Inert {
        return Err(ImError::NotInert(p));
    }
    let start = Instant::now();
    let counts = c.count_pair(p)?;
    let lpoly = shortcut_inert(counts, p)?;
    let factorization = check_inert(&lpoly, p)?;
    Ok(ShortcutOutcome {
        counts,
        lpoly,
        factorization,
        elapsed: start.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(x: i64, y: i64) -> QuadInt {
        QuadInt::new(x, y)
    }

    /// `c * conj(c)` for `c = 1 - uT + psi conj(u) T^2 - p psi T^3`.
    fn synthetic(m: &ImagQuadField, p: u64, u: QuadInt, psi: QuadInt) -> (LPolynomial, CubicFactor) {
        let v = m.mul(&psi, &m.conj(&u));
        let w = m.scale(&psi, &BigInt::from(p));
        let c = CubicFactor { u, v, w };
        let a = c.coefficients(m);
        let b = c.conj(m).coefficients(m);
        let mut coeffs = [BigInt::zero(), BigInt::zero(), BigInt::zero()];
        for (k, slot) in coeffs.iter_mut().enumerate() {
            let k = k + 1;
            let mut acc = q(0, 0);
            for i in k.saturating_sub(3)..=k.min(3) {
                acc = m.add(&acc, &m.mul(&a[i], &b[k - i]));
            }
            assert!(acc.y.is_zero());
            *slot = acc.x;
        }
        let to = |b: &BigInt| i128::try_from(b).unwrap();
        let l = LPolynomial::new(p, to(&coeffs[0]), to(&coeffs[1]), to(&coeffs[2])).unwrap();
        assert!(c.times_equals(&c.conj(m), m, &l));
        (l, c)
    }

    #[test]
    fn inert_examples() {
        let p = 11;
        let l = LPolynomial::new(p, 0, 11, 0).unwrap();
        assert_eq!(check_inert(&l, p).unwrap(), InertFactorization { p, b: 11, t: 0 });
        let l = LPolynomial::new(p, 0, -11, 0).unwrap();
        assert_eq!(check_inert(&l, p).unwrap().t, 22);
        let l = LPolynomial::new(p, 1, -11, 0).unwrap();
        assert!(matches!(check_inert(&l, p), Err(ImError::TheoremViolation { .. })));
        let l = LPolynomial::new(p, 0, -12, 0).unwrap();
        assert!(check_inert(&l, p).is_err());
        let m = ImagQuadField::new(1).unwrap();
        let f = check_inert(&LPolynomial::new(p, 0, 5, 0).unwrap(), p).unwrap();
        assert_eq!(extract_psi_inert(&f, &m).unwrap().psi, q(-11, 0));
    }

    #[test]
    fn synthetic_split_round_trip() {
        let cases: [(u64, u64, QuadInt, QuadInt); 4] = [
            (1, 101, q(3, 2), q(10, 1)),
            (1, 13, q(-1, 1), q(3, 2)),
            (7, 29, q(2, -1), q(-1, 4)),
            (3, 31, q(3, -2), q(-6, 1)),
        ];
        for (d, p, u, psi) in cases {
            let m = ImagQuadField::new(d).unwrap();
            assert_eq!(m.norm(&psi), BigInt::from(p));
            let (l, c) = synthetic(&m, p, u, psi.clone());
            let found = split_cubic_factor(&l, &m).unwrap();
            let expected = if c.is_canonical() { c.clone() } else { c.conj(&m) };
            assert_eq!(found.factor, expected);
            assert_eq!(found.conjugate, expected.conj(&m));
            let hp = extract_psi_split(p, &found.factor, &m).unwrap();
            let hq = extract_psi_split(p, &found.conjugate, &m).unwrap();
            assert!(conjugation_check(&hp, &hq, &m));
            assert!(hp.psi == psi || hp.psi == m.conj(&psi));
        }
    }

    #[test]
    fn split_cubic_gives_multiple_pairs() {
        // here c itself splits over O_M, so other triples also pair up
        let m = ImagQuadField::new(3).unwrap();
        let (l, _) = synthetic(&m, 31, q(1, 1), q(-6, 1));
        match split_cubic_factor(&l, &m) {
            Err(ImError::MultipleFactorsFound { factors, .. }) => {
                assert_eq!(factors.len(), 3);
                assert!(factors.iter().all(|f| f.times_equals(&f.conj(&m), &m, &l)));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unit_twist_breaks_conjugation() {
        let m = ImagQuadField::new(1).unwrap();
        let (l, _) = synthetic(&m, 13, q(-1, 1), q(3, 2));
        let found = split_cubic_factor(&l, &m).unwrap();
        let hp = extract_psi_split(13, &found.factor, &m).unwrap();
        let mut twisted = found.conjugate.clone();
        twisted.w = m.mul(&q(0, 1), &twisted.w);
        let hq = extract_psi_split(13, &twisted, &m).unwrap();
        assert!(!conjugation_check(&hp, &hq, &m));
    }

    #[test]
    fn generic_weil_polynomial_has_no_factor() {
        // (1 - T + 101T^2)(1 + 3T + 101T^2)(1 - 7T + 101T^2)
        let p = 101i128;
        let t = [1i128, -3, 7];
        let e1: i128 = t.iter().sum();
        let e2 = t[0] * t[1] + t[0] * t[2] + t[1] * t[2];
        let e3 = t[0] * t[1] * t[2];
        let l = LPolynomial::new(101, -e1, e2 + 3 * p, -(e3 + 2 * p * e1)).unwrap();
        for d in [1u64, 2, 3, 7] {
            let m = ImagQuadField::new(d).unwrap();
            assert_eq!(split_cubic_factor(&l, &m), Err(ImError::NoFactorFound { p: 101 }));
        }
    }

    /// Gaussian primes `alpha = 1 mod (2 + 2i)` up to units, with `psi` built
    /// from a character of conductor dividing 4.
    #[test]
    fn recovers_synthetic_character() {
        let m = ImagQuadField::new(1).unwrap();
        let modulus = q(2, 2);
        let units = m.units();
        let mut values = Vec::new();
        for p in (5..400u64).filter(|&p| crate::ff::is_prime(p) && p % 4 == 1) {
            let g = m.solve_norm(p).unwrap();
            // the associate that is 1 mod (2 + 2i); psi = that associate
            let primary = units
                .iter()
                .map(|u| m.mul(u, &g))
                .find(|a| m.div_exact(&m.sub(a, &q(1, 0)), &modulus).is_some())
                .unwrap();
            values.push(HeckeValue {
                p,
                kind: HeckeKind::Split,
                psi: primary,
            });
        }
        let report = character_consistency(&values, &m, 64).unwrap();
        assert!(report.consistent);
        let n = report.modulus.unwrap();
        assert!(16 % n == 0, "N = {n}");
        assert_eq!(n, 4);
        assert!(character_consistency(&values[..1], &m, 64).is_err());
    }

    #[test]
    fn inconsistent_data_is_reported() {
        let m = ImagQuadField::new(1).unwrap();
        // psi values that are random associates carry no character
        let mut values = Vec::new();
        let units = m.units();
        for (i, p) in (5..400u64)
            .filter(|&p| crate::ff::is_prime(p) && p % 4 == 1)
            .enumerate()
        {
            let g = m.solve_norm(p).unwrap();
            let u = &units[(i * 7 + (p as usize) * 3) % 4];
            values.push(HeckeValue {
                p,
                kind: HeckeKind::Split,
                psi: m.mul(u, &g),
            });
        }
        let report = character_consistency(&values, &m, 8).unwrap();
        assert!(!report.consistent);
        assert!(!report.violations.is_empty());
    }
}
