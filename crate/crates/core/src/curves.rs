//! Genus-3 curve models and exact point counting of their smooth projective
//! models over `F_{p^k}`.
//!
//! Three families are supported:
//!
//! * hyperelliptic `y^2 = f(x)` with `deg f` in `{7, 8}`;
//! * superelliptic `y^m = f(x)` with `(m, deg f)` in `{(3, 4), (4, 3)}`;
//! * smooth plane quartics `F(X, Y, Z) = 0`.
//!
//! Counting works one fiber of a coordinate projection at a time. Values of
//! polynomials along a fiber sweep are produced by forward differences, so
//! the inner loops are additions only. For plane quartics the fiber
//! polynomials are cubics whenever one variable appears to degree 3, and
//! their roots are counted from the discriminant and Cardano's resolvent.
//! Fibers over Frobenius-conjugate points have equal size, so only one
//! representative per orbit is evaluated.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::ff::{ExtField, FieldElement, FieldError, Poly, PrimeField};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurveError {
    #[error("invalid curve model: {0}")]
    InvalidModel(String),
    #[error("p = {0} is listed as a bad prime")]
    BadPrime(u64),
    #[error("bad reduction at p = {p}: {reason}")]
    BadReduction { p: u64, reason: String },
    #[error("count {count} over F_{p}^{k} violates the Weil bound; p is suspected bad")]
    BadPrimeSuspected { p: u64, k: usize, count: u64 },
    #[error("field of order {0} is too large for exhaustive enumeration")]
    FieldTooLarge(u128),
    #[error(transparent)]
    Field(#[from] FieldError),
}

impl CurveError {
    /// Whether this error only means "skip this prime".
    pub fn is_bad_prime(&self) -> bool {
        matches!(
            self,
            CurveError::BadPrime(_) | CurveError::BadReduction { .. } | CurveError::BadPrimeSuspected { .. }
        )
    }
}

/// Exponents `(i, j, l)` of `X^i Y^j Z^l` in the fixed lexicographic order
/// used for the fifteen coefficients of a ternary quartic.
pub const QUARTIC_MONOMIALS: [(u32, u32, u32); 15] = [
    (4, 0, 0),
    (3, 1, 0),
    (3, 0, 1),
    (2, 2, 0),
    (2, 1, 1),
    (2, 0, 2),
    (1, 3, 0),
    (1, 2, 1),
    (1, 1, 2),
    (1, 0, 3),
    (0, 4, 0),
    (0, 3, 1),
    (0, 2, 2),
    (0, 1, 3),
    (0, 0, 4),
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CurveKind {
    /// `y^2 = f(x)`, coefficients ascending.
    Hyperelliptic { f: Vec<BigInt> },
    /// `y^m = f(x)`, coefficients ascending.
    Superelliptic { m: u32, f: Vec<BigInt> },
    /// `F(X, Y, Z) = 0`, coefficients in [`QUARTIC_MONOMIALS`] order.
    PlaneQuartic { coeffs: Vec<BigInt> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveModel {
    name: String,
    kind: CurveKind,
    bad_primes: Vec<u64>,
}

/// Counts of points of the smooth model over `F_p`, `F_{p^2}`, `F_{p^3}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PointCounts {
    pub p: u64,
    pub n: [u64; 3],
}

fn trim(mut f: Vec<BigInt>) -> Vec<BigInt> {
    while f.last().is_some_and(|c| c.is_zero()) {
        f.pop();
    }
    f
}

impl CurveModel {
    pub fn hyperelliptic(name: &str, f: Vec<BigInt>, bad_primes: Vec<u64>) -> Result<Self, CurveError> {
        let f = trim(f);
        let deg = f.len().saturating_sub(1);
        if !(7..=8).contains(&deg) {
            return Err(CurveError::InvalidModel(format!(
                "hyperelliptic genus-3 model needs deg f in {{7, 8}}, got {deg}"
            )));
        }
        if discriminant(&f).is_zero() {
            return Err(CurveError::InvalidModel("f is not squarefree".into()));
        }
        Ok(Self::assemble(name, CurveKind::Hyperelliptic { f }, bad_primes))
    }

    pub fn superelliptic(name: &str, m: u32, f: Vec<BigInt>, bad_primes: Vec<u64>) -> Result<Self, CurveError> {
        let f = trim(f);
        let deg = f.len().saturating_sub(1);
        match (m, deg) {
            (3, 4) | (4, 3) => {}
            (2, _) => return Err(CurveError::InvalidModel("y^2 = f(x) is a hyperelliptic model".into())),
            _ => {
                return Err(CurveError::InvalidModel(format!(
                    "superelliptic genus-3 model needs (m, deg f) in {{(3, 4), (4, 3)}}, got ({m}, {deg})"
                )))
            }
        }
        if discriminant(&f).is_zero() {
            return Err(CurveError::InvalidModel("f is not squarefree".into()));
        }
        Ok(Self::assemble(name, CurveKind::Superelliptic { m, f }, bad_primes))
    }

    pub fn plane_quartic(name: &str, coeffs: Vec<BigInt>, bad_primes: Vec<u64>) -> Result<Self, CurveError> {
        if coeffs.len() != 15 {
            return Err(CurveError::InvalidModel(format!(
                "a ternary quartic has 15 coefficients, got {}",
                coeffs.len()
            )));
        }
        let at_infinity_zero = QUARTIC_MONOMIALS
            .iter()
            .zip(&coeffs)
            .all(|(&(_, _, l), c)| l > 0 || c.is_zero());
        if at_infinity_zero {
            return Err(CurveError::InvalidModel(
                "Z divides F, so the quartic is reducible".into(),
            ));
        }
        Ok(Self::assemble(name, CurveKind::PlaneQuartic { coeffs }, bad_primes))
    }

    fn assemble(name: &str, kind: CurveKind, mut bad_primes: Vec<u64>) -> Self {
        bad_primes.sort_unstable();
        bad_primes.dedup();
        CurveModel {
            name: name.to_string(),
            kind,
            bad_primes,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &CurveKind {
        &self.kind
    }

    pub fn bad_primes(&self) -> &[u64] {
        &self.bad_primes
    }

    pub fn is_listed_bad(&self, p: u64) -> bool {
        self.bad_primes.binary_search(&p).is_ok()
    }

    /// Primes that divide the leading coefficient, the discriminant of `f`,
    /// or the exponent `m`. Empty for plane quartics.
    pub fn discriminant_primes(&self) -> Vec<u64> {
        let (f, m) = match &self.kind {
            CurveKind::Hyperelliptic { f } => (f, 2u32),
            CurveKind::Superelliptic { m, f } => (f, *m),
            CurveKind::PlaneQuartic { .. } => return Vec::new(),
        };
        let n = discriminant(f) * f.last().unwrap() * BigInt::from(m);
        let mut out = Vec::new();
        let mut n = n.abs();
        let mut d = BigInt::from(2);
        while &d * &d <= n {
            if (&n % &d).is_zero() {
                out.push(d.to_u64().expect("small prime factors"));
                while (&n % &d).is_zero() {
                    n /= &d;
                }
            }
            d += 1;
        }
        if n > BigInt::one() {
            if let Some(v) = n.to_u64() {
                out.push(v);
            }
        }
        out
    }

    fn check_prime(&self, p: u64) -> Result<(), CurveError> {
        if self.is_listed_bad(p) {
            return Err(CurveError::BadPrime(p));
        }
        let fp = |c: &BigInt| c.mod_floor(&BigInt::from(p)).is_zero();
        match &self.kind {
            CurveKind::Hyperelliptic { f } if fp(f.last().unwrap()) => Err(CurveError::BadReduction {
                p,
                reason: "p divides the leading coefficient".into(),
            }),
            CurveKind::Superelliptic { f, .. } if fp(f.last().unwrap()) => Err(CurveError::BadReduction {
                p,
                reason: "p divides the leading coefficient".into(),
            }),
            CurveKind::Superelliptic { m, .. } if u64::from(*m) % p == 0 => Err(CurveError::BadReduction {
                p,
                reason: "p divides the exponent m".into(),
            }),
            CurveKind::PlaneQuartic { coeffs }
                if QUARTIC_MONOMIALS
                    .iter()
                    .zip(coeffs)
                    .all(|(&(_, _, l), c)| l > 0 || fp(c)) =>
            {
                Err(CurveError::BadReduction {
                    p,
                    reason: "Z divides the reduction".into(),
                })
            }
            _ => Ok(()),
        }
    }

    /// Number of points of the smooth projective model over `field`.
    pub fn count_points(&self, field: &ExtField) -> Result<u64, CurveError> {
        let p = field.characteristic();
        self.check_prime(p)?;
        let base = field.base();
        Ok(match &self.kind {
            CurveKind::Hyperelliptic { f } => count_hyperelliptic(field, &reduce_coeffs(base, f)),
            CurveKind::Superelliptic { m, f } => count_superelliptic(field, *m, &reduce_coeffs(base, f)),
            CurveKind::PlaneQuartic { coeffs } => count_plane_quartic(field, &reduce_coeffs(base, coeffs))?,
        })
    }

    /// `N_1, N_2, N_3`, each checked against the Weil bound.
    pub fn count_triple(&self, p: u64) -> Result<PointCounts, CurveError> {
        self.check_prime(p)?;
        let base = PrimeField::new(p)?;
        let mut n = [0u64; 3];
        for (i, slot) in n.iter_mut().enumerate() {
            let field = ExtField::over(base.clone(), i + 1)?;
            *slot = self.count_checked(&field)?;
        }
        Ok(PointCounts { p, n })
    }

    /// `N_1, N_2` only.
    pub fn count_pair(&self, p: u64) -> Result<[u64; 2], CurveError> {
        self.check_prime(p)?;
        let base = PrimeField::new(p)?;
        let n1 = self.count_checked(&ExtField::over(base.clone(), 1)?)?;
        let n2 = self.count_checked(&ExtField::over(base, 2)?)?;
        Ok([n1, n2])
    }

    fn count_checked(&self, field: &ExtField) -> Result<u64, CurveError> {
        let count = self.count_points(field)?;
        if !within_weil_bound(count, field.order()) {
            return Err(CurveError::BadPrimeSuspected {
                p: field.characteristic(),
                k: field.degree(),
                count,
            });
        }
        Ok(count)
    }
}

/// `|N - (q + 1)| <= 6 sqrt(q)`, in exact integer arithmetic.
pub fn within_weil_bound(count: u64, q: u128) -> bool {
    let dev = i128::from(count) - q as i128 - 1;
    (dev * dev) as u128 <= 36 * q
}

fn reduce_coeffs(base: &PrimeField, f: &[BigInt]) -> Vec<u64> {
    f.iter().map(|c| base.from_bigint(c)).collect()
}

/// Discriminant of an integer polynomial (zero iff it has a repeated root).
pub fn discriminant(f: &[BigInt]) -> BigInt {
    let f = trim(f.to_vec());
    let n = f.len().saturating_sub(1);
    if n < 1 {
        return BigInt::zero();
    }
    let df: Vec<BigInt> = f.iter().enumerate().skip(1).map(|(i, c)| c * i).collect();
    let res = resultant(&f, &df);
    let sign = if (n * (n - 1) / 2).is_multiple_of(2) { 1 } else { -1 };
    res / f.last().unwrap() * sign
}

/// Resultant via the Sylvester determinant, fraction-free elimination.
fn resultant(f: &[BigInt], g: &[BigInt]) -> BigInt {
    let m = f.len() - 1;
    let n = g.len() - 1;
    let size = m + n;
    if size == 0 {
        return BigInt::one();
    }
    let mut mat = vec![vec![BigInt::zero(); size]; size];
    for row in 0..n {
        for (j, c) in f.iter().rev().enumerate() {
            mat[row][row + j] = c.clone();
        }
    }
    for row in 0..m {
        for (j, c) in g.iter().rev().enumerate() {
            mat[n + row][row + j] = c.clone();
        }
    }
    bareiss_determinant(mat)
}

fn bareiss_determinant(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Forward-difference table of a polynomial along `start, start + 1, ...`.
struct Stepper {
    diffs: Vec<FieldElement>,
}

impl Stepper {
    fn new(degree: usize) -> Self {
        Stepper {
            diffs: vec![FieldElement::default(); degree + 1],
        }
    }

    fn reset(&mut self, field: &ExtField, poly: &[FieldElement], start: &FieldElement) {
        let one = field.one();
        let mut x = *start;
        for slot in self.diffs.iter_mut() {
            *slot = poly
                .iter()
                .rev()
                .fold(field.zero(), |acc, c| field.add(&field.mul(&acc, &x), c));
            x = field.add(&x, &one);
        }
        let n = self.diffs.len();
        for i in 1..n {
            for j in (i..n).rev() {
                self.diffs[j] = field.sub(&self.diffs[j], &self.diffs[j - 1]);
            }
        }
    }

    #[inline(always)]
    fn value(&self) -> &FieldElement {
        &self.diffs[0]
    }

    #[inline(always)]
    fn step(&mut self, field: &ExtField) {
        for i in 0..self.diffs.len() - 1 {
            self.diffs[i] = field.add(&self.diffs[i], &self.diffs[i + 1]);
        }
    }
}

/// Runs `visit` on the values of each polynomial (coefficients in the field)
/// at every element of the field, in index order.
fn sweep(field: &ExtField, polys: &[Vec<FieldElement>], mut visit: impl FnMut(u128, &[FieldElement])) {
    let p = field.characteristic();
    let prefixes = field.order() / u128::from(p);
    let mut steppers: Vec<Stepper> = polys.iter().map(|f| Stepper::new(f.len().saturating_sub(1))).collect();
    let mut values = vec![field.zero(); polys.len()];
    for prefix in 0..prefixes {
        let start = field.element(prefix * u128::from(p));
        for (st, f) in steppers.iter_mut().zip(polys) {
            st.reset(field, f, &start);
        }
        for a in 0..p {
            for (v, st) in values.iter_mut().zip(&steppers) {
                *v = *st.value();
            }
            visit(prefix * u128::from(p) + u128::from(a), &values);
            for st in steppers.iter_mut() {
                st.step(field);
            }
        }
    }
}

fn lift(field: &ExtField, f: &[u64]) -> Vec<FieldElement> {
    f.iter().map(|&c| field.from_base(c)).collect()
}

fn count_hyperelliptic(field: &ExtField, f: &[u64]) -> u64 {
    let q = field.order() as u64;
    let mut char_sum: i64 = 0;
    sweep(field, &[lift(field, f)], |_, v| {
        char_sum += i64::from(field.quadratic_character(&v[0]));
    });
    let infinity = if f.len() - 1 == 7 {
        1
    } else {
        1 + i64::from(field.quadratic_character(&field.from_base(*f.last().unwrap())))
    };
    (q as i64 + char_sum + infinity) as u64
}

fn count_superelliptic(field: &ExtField, m: u32, f: &[u64]) -> u64 {
    let q = field.order();
    let g = (q - 1).gcd(&u128::from(m)) as u64;
    if g == 1 {
        // y -> y^m permutes F_q, so every fiber has exactly one point
        return q as u64 + 1;
    }
    let mut affine: u64 = 0;
    sweep(field, &[lift(field, f)], |_, v| {
        affine += if v[0].is_zero() {
            1
        } else if field.is_power(&v[0], g) {
            g
        } else {
            0
        };
    });
    affine + 1
}

/// Coefficients `c[i][j]` of `x^i y^j` in `F(x, y, 1)`.
fn affine_quartic(f: &[u64]) -> [[u64; 5]; 5] {
    let mut c = [[0u64; 5]; 5];
    for (&(i, j, _), &v) in QUARTIC_MONOMIALS.iter().zip(f) {
        c[i as usize][j as usize] = v;
    }
    c
}

fn count_plane_quartic(field: &ExtField, f: &[u64]) -> Result<u64, CurveError> {
    let p = field.characteristic();
    let c = affine_quartic(f);
    let deg_in = |solve_x: bool| {
        (0..5)
            .flat_map(|i| (0..5).map(move |j| (i, j)))
            .filter(|&(i, j)| c[i][j] != 0)
            .map(|(i, j)| if solve_x { i } else { j })
            .max()
            .unwrap_or(0)
    };
    // solve for the variable of lower degree, sweeping the other
    let solve_x = deg_in(true) < deg_in(false);
    // coeff_polys[s] = coefficient of (solve variable)^s as a polynomial in the fiber variable
    let coeff_polys: Vec<Vec<FieldElement>> = (0..5)
        .map(|s| {
            (0..5 - s)
                .map(|t| field.from_base(if solve_x { c[s][t] } else { c[t][s] }))
                .collect()
        })
        .collect();
    let counter = FiberCounter::new(field);
    let k = field.degree();
    let mut affine: u64 = 0;
    let mut err = None;
    sweep(field, &coeff_polys, |index, coeffs| {
        if err.is_some() {
            return;
        }
        let orbit = if k == 1 {
            1
        } else {
            let v = field.element(index);
            if field.in_base(&v) {
                1
            } else {
                let s1 = field.frobenius(&v);
                if field.index_of(&s1) < index {
                    return;
                }
                if k == 3 && field.index_of(&field.frobenius(&s1)) < index {
                    return;
                }
                k as u64
            }
        };
        match counter.count(coeffs) {
            Some(n) => affine += orbit * n,
            None => {
                err = Some(CurveError::BadReduction {
                    p,
                    reason: "a fiber of the affine model is a whole line".into(),
                })
            }
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    // points [x : 1 : 0] and [1 : 0 : 0]
    let at_infinity = Poly::new((0..5).map(|i| field.from_base(c_at_infinity(f, i as u32))).collect());
    let mut infinity = field.count_roots(&at_infinity)? as u64;
    if f[0] == 0 {
        infinity += 1;
    }
    Ok(affine + infinity)
}

/// Coefficient of `X^i Y^(4-i) Z^0`.
fn c_at_infinity(f: &[u64], i: u32) -> u64 {
    QUARTIC_MONOMIALS
        .iter()
        .zip(f)
        .find(|(&(a, b, l), _)| a == i && b == 4 - i && l == 0)
        .map(|(_, &v)| v)
        .unwrap()
}

/// Distinct-root counts of polynomials of degree at most four.
pub struct FiberCounter<'a> {
    field: &'a ExtField,
    chi_minus_three: i8,
    q_mod_3: u128,
    inv2: u64,
    inv3: u64,
    inv27: u64,
    // (p + 1) / 3 when q = 2 mod 3
    cardano_exp: u128,
}

impl<'a> FiberCounter<'a> {
    pub fn new(field: &'a ExtField) -> Self {
        let base = field.base();
        let p = base.p();
        let q = field.order();
        let (inv2, inv3, inv27) = if p > 3 {
            (base.inv(2), base.inv(3), base.inv(27 % p))
        } else {
            (0, 0, 0)
        };
        FiberCounter {
            field,
            chi_minus_three: field.quadratic_character(&field.from_i64(-3)),
            q_mod_3: q % 3,
            inv2,
            inv3,
            inv27,
            cardano_exp: (u128::from(p) + 1) / 3,
        }
    }

    /// Number of distinct roots in the field; `None` for the zero polynomial.
    pub fn count(&self, coeffs: &[FieldElement]) -> Option<u64> {
        let f = self.field;
        let deg = coeffs.iter().rposition(|c| !c.is_zero())?;
        Some(match deg {
            0 => 0,
            1 => 1,
            2 => {
                let (a, b, c0) = (&coeffs[2], &coeffs[1], &coeffs[0]);
                let disc = f.sub(&f.square(b), &f.scale(&f.mul(a, c0), 4 % f.characteristic()));
                (1 + f.quadratic_character(&disc)) as u64
            }
            3 if f.characteristic() > 3 => self.cubic(&coeffs[..4]),
            _ => f.count_roots(&Poly::new(coeffs[..=deg].to_vec())).expect("nonzero") as u64,
        })
    }

    fn cubic(&self, c: &[FieldElement]) -> u64 {
        let f = self.field;
        // c3^2 g(X / c3) = X^3 + c2 X^2 + c1 c3 X + c0 c3^2 has the same root count
        let b2 = c[2];
        let b1 = f.mul(&c[1], &c[3]);
        let b0 = f.mul(&c[0], &f.square(&c[3]));
        // X = t - b2/3 gives t^3 + a t + b
        let b2_sq = f.square(&b2);
        let a = f.sub(&b1, &f.scale(&b2_sq, self.inv3));
        let b = f.add(
            &f.sub(
                &f.scale(&f.mul(&b2_sq, &b2), f.base().mul(2, self.inv27)),
                &f.scale(&f.mul(&b1, &b2), self.inv3),
            ),
            &b0,
        );
        let half_b = f.scale(&b, self.inv2);
        let d = f.add(&f.square(&half_b), &f.scale(&f.mul(&f.square(&a), &a), self.inv27));
        if d.is_zero() {
            return if a.is_zero() { 1 } else { 2 };
        }
        // discriminant is -108 d
        if self.chi_minus_three * f.quadratic_character(&d) == -1 {
            return 1;
        }
        if self.q_mod_3 == 1 {
            let s = f.sqrt(&d).expect("d is a square here");
            let mut u = f.sub(&s, &half_b);
            if u.is_zero() {
                u = f.neg(&f.add(&s, &half_b));
            }
            if f.is_power(&u, 3) {
                3
            } else {
                0
            }
        } else {
            // Work in F_q(s) with s^2 = d. For u = -b/2 + s the cubic splits
            // iff u^((q+1)/3) = -a/3. Here k is 1 or 3, and for k = 3
            // (q+1)/3 = (p+1)/3 * (p^2 - p + 1), so with w = u^((p+1)/3) and
            // the p-power map phi the test reads phi^2(w) w = (-a/3) phi(w).
            let u = (f.neg(&half_b), f.one());
            let w = quad_pow(f, &d, u, self.cardano_exp);
            let target = f.neg(&f.scale(&a, self.inv3));
            if f.degree() == 1 {
                return if w.0 == target && w.1.is_zero() { 3 } else { 0 };
            }
            let c = f.pow(&d, (u128::from(f.characteristic()) - 1) / 2);
            let w1 = f.frobenius(&w.1);
            let phi = (f.frobenius(&w.0), f.mul(&w1, &c));
            let phi2 = (
                f.frobenius(&phi.0),
                f.mul(&f.mul(&f.frobenius(&w1), &f.frobenius(&c)), &c),
            );
            let lhs = quad_mul(f, &d, &phi2, &w);
            let rhs = (f.mul(&phi.0, &target), f.mul(&phi.1, &target));
            if lhs == rhs {
                3
            } else {
                0
            }
        }
    }
}

type QuadElem = (FieldElement, FieldElement);

fn quad_mul(f: &ExtField, d: &FieldElement, x: &QuadElem, y: &QuadElem) -> QuadElem {
    let a = f.mul(&x.0, &y.0);
    let b = f.mul(&x.1, &y.1);
    let cross = f.sub(&f.mul(&f.add(&x.0, &x.1), &f.add(&y.0, &y.1)), &f.add(&a, &b));
    (f.add(&a, &f.mul(d, &b)), cross)
}

fn quad_pow(f: &ExtField, d: &FieldElement, mut base: QuadElem, mut n: u128) -> QuadElem {
    let mut acc = (f.one(), f.zero());
    while n > 0 {
        if n & 1 == 1 {
            acc = quad_mul(f, d, &acc, &base);
        }
        n >>= 1;
        if n > 0 {
            base = quad_mul(f, d, &base, &base);
        }
    }
    acc
}

/// Exhaustive point counts used as an independent test oracle.
pub mod oracle {
    use super::*;

    /// Largest field the oracle accepts.
    pub const MAX_ORDER: u128 = 10_000;

    /// Counts points by enumerating every affine pair `(x, y)` plus the
    /// points at infinity of the smooth model.
    pub fn brute_force_count(curve: &CurveModel, field: &ExtField) -> Result<u64, CurveError> {
        let q = field.order();
        if q > MAX_ORDER {
            return Err(CurveError::FieldTooLarge(q));
        }
        curve.check_prime(field.characteristic())?;
        let base = field.base();
        Ok(match curve.kind() {
            CurveKind::Hyperelliptic { f } => {
                let f = reduce_coeffs(base, f);
                let fibers = power_fibers(field, 2);
                let affine: u64 = field
                    .elements()
                    .map(|x| fibers[field.index_of(&horner(field, &f, &x)) as usize])
                    .sum();
                let infinity = if f.len() == 8 {
                    1
                } else {
                    fibers[field.index_of(&field.from_base(f[8])) as usize]
                };
                affine + infinity
            }
            CurveKind::Superelliptic { m, f } => {
                let f = reduce_coeffs(base, f);
                let fibers = power_fibers(field, *m);
                let affine: u64 = field
                    .elements()
                    .map(|x| fibers[field.index_of(&horner(field, &f, &x)) as usize])
                    .sum();
                affine + 1
            }
            CurveKind::PlaneQuartic { coeffs } => {
                let f = reduce_coeffs(base, coeffs);
                let affine = if field.degree() == 1 {
                    quartic_affine_prime(base, &f)
                } else {
                    quartic_affine_ext(field, &f)
                };
                let mut infinity = field
                    .elements()
                    .filter(|x| eval_quartic(field, &f, x, &field.one(), &field.zero()).is_zero())
                    .count() as u64;
                if eval_quartic(field, &f, &field.one(), &field.zero(), &field.zero()).is_zero() {
                    infinity += 1;
                }
                affine + infinity
            }
        })
    }

    /// `fibers[index(v)] = #{y : y^m = v}`, by enumerating all `y`.
    fn power_fibers(field: &ExtField, m: u32) -> Vec<u64> {
        let mut fibers = vec![0u64; field.order() as usize];
        for y in field.elements() {
            let v = field.pow(&y, u128::from(m));
            fibers[field.index_of(&v) as usize] += 1;
        }
        fibers
    }

    fn horner(field: &ExtField, f: &[u64], x: &FieldElement) -> FieldElement {
        f.iter().rev().fold(field.zero(), |acc, &c| {
            field.add(&field.mul(&acc, x), &field.from_base(c))
        })
    }

    fn eval_quartic(field: &ExtField, f: &[u64], x: &FieldElement, y: &FieldElement, z: &FieldElement) -> FieldElement {
        QUARTIC_MONOMIALS
            .iter()
            .zip(f)
            .fold(field.zero(), |acc, (&(i, j, l), &c)| {
                let term = field.mul(
                    &field.mul(&field.pow(x, i.into()), &field.pow(y, j.into())),
                    &field.pow(z, l.into()),
                );
                field.add(&acc, &field.scale(&term, c))
            })
    }

    /// Fiber polynomial `F(x, y, 1)` in `y` for fixed `x`, coefficients ascending.
    fn fiber_in_y(field: &ExtField, f: &[u64], x: &FieldElement) -> [FieldElement; 5] {
        let mut out = [field.zero(); 5];
        for (&(i, j, _), &c) in QUARTIC_MONOMIALS.iter().zip(f) {
            let term = field.scale(&field.pow(x, i.into()), c);
            out[j as usize] = field.add(&out[j as usize], &term);
        }
        out
    }

    fn quartic_affine_ext(field: &ExtField, f: &[u64]) -> u64 {
        // every (x, y) is visited; values along y are stepped by differences
        let p = field.characteristic();
        let prefixes = field.order() / u128::from(p);
        let mut zeros = 0u64;
        for x in field.elements() {
            let g = fiber_in_y(field, f, &x);
            let mut st = Stepper::new(4);
            for prefix in 0..prefixes {
                st.reset(field, &g, &field.element(prefix * u128::from(p)));
                for _ in 0..p {
                    zeros += u64::from(st.value().is_zero());
                    st.step(field);
                }
            }
        }
        zeros
    }

    const LANES: usize = 32;

    #[inline(always)]
    fn add_mod(a: i32, b: i32, p: i32) -> i32 {
        let s = a.wrapping_add(b).wrapping_sub(p);
        s.wrapping_add((s >> 31) & p)
    }

    #[inline(always)]
    fn lanes_body(d: [[i32; LANES]; 4], top: i32, p: i32) -> [u32; LANES] {
        let mut hits = [0u32; LANES];
        let [mut d0, mut d1, mut d2, mut d3] = d;
        for _ in 0..p {
            for l in 0..LANES {
                hits[l] = hits[l].wrapping_add(u32::from(d0[l] == 0));
                d0[l] = add_mod(d0[l], d1[l], p);
                d1[l] = add_mod(d1[l], d2[l], p);
                d2[l] = add_mod(d2[l], d3[l], p);
                d3[l] = add_mod(d3[l], top, p);
            }
        }
        hits
    }

    #[cfg(target_arch = "x86_64")]
    #[target_feature(enable = "avx2")]
    unsafe fn lanes_avx2(d: [[i32; LANES]; 4], top: i32, p: i32) -> [u32; LANES] {
        lanes_body(d, top, p)
    }

    #[cfg(target_arch = "x86_64")]
    #[target_feature(enable = "avx512f,avx512bw")]
    unsafe fn lanes_avx512(d: [[i32; LANES]; 4], top: i32, p: i32) -> [u32; LANES] {
        lanes_body(d, top, p)
    }

    fn run_lanes(d: [[i32; LANES]; 4], top: i32, p: i32) -> [u32; LANES] {
        #[cfg(target_arch = "x86_64")]
        if std::is_x86_feature_detected!("avx512f") && std::is_x86_feature_detected!("avx512bw") {
            // SAFETY: the features were detected at runtime
            return unsafe { lanes_avx512(d, top, p) };
        }
        #[cfg(target_arch = "x86_64")]
        if std::is_x86_feature_detected!("avx2") {
            // SAFETY: the feature was detected at runtime
            return unsafe { lanes_avx2(d, top, p) };
        }
        lanes_body(d, top, p)
    }

    /// Prime-field case: every pair is visited, thirty-two values of `x` at a
    /// time, with fourth-order differences in `y`.
    fn quartic_affine_prime(base: &PrimeField, f: &[u64]) -> u64 {
        let p = base.p();
        assert!(p < 1 << 29);
        let pi = p as i32;
        let mut zeros = 0u64;
        let xs: Vec<u64> = (0..p).collect();
        for chunk in xs.chunks(LANES) {
            let mut d = [[0i32; LANES]; 4];
            let mut top = 0i32;
            for (lane, &x) in chunk.iter().enumerate() {
                let mut g = [0u64; 5];
                for (&(i, j, _), &c) in QUARTIC_MONOMIALS.iter().zip(f) {
                    g[j as usize] = base.add(g[j as usize], base.mul(c, base.pow(x, i.into())));
                }
                let vals: Vec<u64> = (0..5u64)
                    .map(|y| g.iter().rev().fold(0, |acc, &c| base.add(base.mul(acc, y % p), c)))
                    .collect();
                let mut diffs = vals.clone();
                for i in 1..5 {
                    for j in (i..5).rev() {
                        diffs[j] = base.sub(diffs[j], diffs[j - 1]);
                    }
                }
                for r in 0..4 {
                    d[r][lane] = diffs[r] as i32;
                }
                top = diffs[4] as i32;
            }
            let live = chunk.len();
            let hits = run_lanes(d, top, pi);
            zeros += hits[..live].iter().map(|&h| u64::from(h)).sum::<u64>();
        }
        zeros
    }
}
