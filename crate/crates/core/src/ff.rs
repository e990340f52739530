//! Prime fields `F_p` and their extensions `F_{p^k}` for `k <= 3`.
//!
//! Elements are plain coordinate triples; every operation goes through the
//! field value, which owns the modulus and the reduction constants. Residues
//! are kept in `[0, p)` at all times.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use thiserror::Error;

/// Largest supported characteristic (exclusive).
pub const MAX_CHARACTERISTIC: u64 = 1 << 31;

/// Discrete-log tables are built for primes below this bound.
const TABLE_LIMIT: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("characteristic {0} out of range (need 2 < p < 2^31)")]
    CharacteristicOutOfRange(u64),
    #[error("extension degree {0} is not supported (k must be 1, 2 or 3)")]
    UnsupportedDegree(usize),
    #[error("polynomial is zero")]
    ZeroPolynomial,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Distinct prime factors of `n` by trial division.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

struct LogTables {
    dlog: Vec<u32>,
    exp: Vec<u32>,
}

/// The prime field `F_p` with `2 < p < 2^31`.
#[derive(Clone)]
pub struct PrimeField {
    p: u64,
    // floor(2^64 / p), for Barrett reduction of values below 2^64
    magic: u64,
    generator: u64,
    tables: Option<Arc<LogTables>>,
}

impl fmt::Debug for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PrimeField({})", self.p)
    }
}

impl PartialEq for PrimeField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
    }
}

impl Eq for PrimeField {}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p <= 2 || p >= MAX_CHARACTERISTIC {
            return Err(FieldError::CharacteristicOutOfRange(p));
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        let magic = (u128::from(u64::MAX) + 1).div_euclid(u128::from(p)) as u64;
        let mut field = PrimeField {
            p,
            magic,
            generator: 0,
            tables: None,
        };
        field.generator = field.find_generator();
        if p < TABLE_LIMIT {
            let mut dlog = vec![0u32; p as usize];
            let mut exp = vec![0u32; (p - 1) as usize];
            let mut acc = 1u64;
            for (i, slot) in exp.iter_mut().enumerate() {
                *slot = acc as u32;
                dlog[acc as usize] = i as u32;
                acc = field.mul(acc, field.generator);
            }
            field.tables = Some(Arc::new(LogTables { dlog, exp }));
        }
        Ok(field)
    }

    fn find_generator(&self) -> u64 {
        let factors = prime_factors(self.p - 1);
        (2..self.p)
            .find(|&g| factors.iter().all(|&r| self.pow(g, (self.p - 1) / r) != 1))
            .unwrap_or(1)
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    /// A fixed primitive root, the smallest one.
    pub fn generator(&self) -> u64 {
        self.generator
    }

    #[inline(always)]
    pub fn reduce(&self, x: u64) -> u64 {
        let q = ((u128::from(x) * u128::from(self.magic)) >> 64) as u64;
        let r = x.wrapping_sub(q.wrapping_mul(self.p));
        if r >= self.p {
            r - self.p
        } else {
            r
        }
    }

    #[inline(always)]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline(always)]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline(always)]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline(always)]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce(a * b)
    }

    pub fn pow(&self, mut a: u64, mut n: u64) -> u64 {
        let mut acc = 1;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            n >>= 1;
        }
        acc
    }

    /// Inverse of a nonzero residue.
    pub fn inv(&self, a: u64) -> u64 {
        debug_assert!(a != 0);
        if let Some(t) = &self.tables {
            let l = t.dlog[a as usize] as u64;
            return t.exp[((self.p - 1 - l) % (self.p - 1)) as usize] as u64;
        }
        self.pow(a, self.p - 2)
    }

    pub fn from_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }

    pub fn from_bigint(&self, v: &BigInt) -> u64 {
        v.mod_floor(&BigInt::from(self.p)).to_u64().unwrap()
    }

    /// Residue as a signed integer in `(-p/2, p/2]`.
    pub fn centered(&self, a: u64) -> i64 {
        if a > self.p / 2 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }

    /// Legendre symbol.
    pub fn legendre(&self, a: u64) -> i8 {
        if a == 0 {
            return 0;
        }
        if let Some(t) = &self.tables {
            return if t.dlog[a as usize] % 2 == 0 { 1 } else { -1 };
        }
        if self.pow(a, (self.p - 1) / 2) == 1 {
            1
        } else {
            -1
        }
    }

    /// Whether a nonzero `a` is a `g`-th power, for `g | p - 1`.
    pub fn is_power(&self, a: u64, g: u64) -> bool {
        debug_assert!(a != 0 && (self.p - 1).is_multiple_of(g));
        if let Some(t) = &self.tables {
            return u64::from(t.dlog[a as usize]) % g == 0;
        }
        self.pow(a, (self.p - 1) / g) == 1
    }

    pub fn sqrt(&self, a: u64) -> Option<u64> {
        if a == 0 {
            return Some(0);
        }
        if let Some(t) = &self.tables {
            let l = t.dlog[a as usize];
            return (l % 2 == 0).then(|| u64::from(t.exp[(l / 2) as usize]));
        }
        if self.legendre(a) != 1 {
            return None;
        }
        // Tonelli-Shanks
        let mut q = self.p - 1;
        let mut s = 0;
        while q.is_multiple_of(2) {
            q /= 2;
            s += 1;
        }
        let z = (2..self.p).find(|&z| self.legendre(z) == -1).unwrap();
        let mut m = s;
        let mut c = self.pow(z, q);
        let mut t = self.pow(a, q);
        let mut r = self.pow(a, q.div_ceil(2));
        while t != 1 {
            let mut i = 0;
            let mut t2 = t;
            while t2 != 1 {
                t2 = self.mul(t2, t2);
                i += 1;
            }
            let b = self.pow(c, 1 << (m - i - 1));
            m = i;
            c = self.mul(b, b);
            t = self.mul(t, c);
            r = self.mul(r, b);
        }
        Some(r)
    }
}

/// An element of `F_{p^k}`: `k` coordinates in the power basis of the
/// field's modulus, little-endian; unused coordinates are zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct FieldElement(pub(crate) [u64; 3]);

impl FieldElement {
    pub fn coords(&self) -> &[u64; 3] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0 == [0; 3]
    }
}

/// The field `F_{p^k}` for `k` in `{1, 2, 3}`.
#[derive(Clone, Debug)]
pub struct ExtField {
    base: PrimeField,
    k: usize,
    // low coefficients of the monic modulus x^k + c_{k-1} x^{k-1} + ... + c_0
    modulus: [u64; 3],
    // t^k and t^(k+1) reduced to the power basis
    fold: [[u64; 3]; 2],
    // coordinates of sigma(t^j) where sigma is the p-power Frobenius
    frob: [[u64; 3]; 3],
    order: u128,
    nonresidue: FieldElement,
}

impl PartialEq for ExtField {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base && self.k == other.k && self.modulus == other.modulus
    }
}

impl Eq for ExtField {}

/// Builds `F_{p^k}` with the lexicographically first irreducible monic
/// modulus, ordered by `(c_{k-1}, ..., c_0)`.
pub fn make_ext_field(p: u64, k: usize) -> Result<ExtField, FieldError> {
    let base = PrimeField::new(p)?;
    ExtField::over(base, k)
}

impl ExtField {
    pub fn over(base: PrimeField, k: usize) -> Result<Self, FieldError> {
        if !(1..=3).contains(&k) {
            return Err(FieldError::UnsupportedDegree(k));
        }
        let p = base.p();
        let modulus = match k {
            1 => [0, 0, 0],
            2 => {
                // x^2 + c1 x + c0 is irreducible iff its discriminant is a non-square
                let mut found = None;
                'scan2: for c1 in 0..p {
                    for c0 in 0..p {
                        let disc = base.sub(base.mul(c1, c1), base.mul(4, c0));
                        if base.legendre(disc) == -1 {
                            found = Some([c0, c1, 0]);
                            break 'scan2;
                        }
                    }
                }
                found.expect("an irreducible quadratic exists")
            }
            _ => {
                let fp = ExtField::over(base.clone(), 1)?;
                let mut found = None;
                'scan3: for c2 in 0..p {
                    for c1 in 0..p {
                        for c0 in 0..p {
                            let f = Poly::from_base(&fp, &[c0, c1, c2, 1]);
                            // a cubic is irreducible iff it has no roots
                            if fp.count_roots(&f).expect("nonzero") == 0 {
                                found = Some([c0, c1, c2]);
                                break 'scan3;
                            }
                        }
                    }
                }
                found.expect("an irreducible cubic exists")
            }
        };
        let mut fold = [[0u64; 3]; 2];
        if k > 1 {
            // t^k = -(c0 + c1 t + ...)
            for i in 0..k {
                fold[0][i] = base.neg(modulus[i]);
            }
            // t^(k+1) = t * t^k
            let top = fold[0][k - 1];
            for i in (0..k).rev() {
                let shifted = if i == 0 { 0 } else { fold[0][i - 1] };
                fold[1][i] = base.add(shifted, base.mul(top, fold[0][i]));
            }
        }
        let order = u128::from(p).pow(k as u32);
        let mut field = ExtField {
            base,
            k,
            modulus,
            fold,
            frob: [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
            order,
            nonresidue: FieldElement::default(),
        };
        let t = field.generator_t();
        let sigma_t = field.pow(&t, u128::from(p));
        let sigma_t2 = field.mul(&sigma_t, &sigma_t);
        field.frob = [[1, 0, 0], sigma_t.0, sigma_t2.0];
        // every element of F_p is a square in F_{p^2}
        let first = if k == 2 { u128::from(p) } else { 1 };
        field.nonresidue = (first..order)
            .map(|i| field.element(i))
            .find(|e| field.quadratic_character(e) == -1)
            .expect("odd field has a non-square");
        Ok(field)
    }

    fn generator_t(&self) -> FieldElement {
        if self.k == 1 {
            // the power basis of F_p is just {1}
            FieldElement([0, 0, 0])
        } else {
            FieldElement([0, 1, 0])
        }
    }

    pub fn base(&self) -> &PrimeField {
        &self.base
    }

    pub fn characteristic(&self) -> u64 {
        self.base.p()
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    /// Number of elements `q = p^k`.
    pub fn order(&self) -> u128 {
        self.order
    }

    /// Monic modulus, coefficients ascending (length `k + 1`).
    pub fn modulus(&self) -> Vec<u64> {
        let mut m = self.modulus[..self.k].to_vec();
        if self.k == 1 {
            m = vec![0];
        }
        m.push(1);
        m
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement([0; 3])
    }

    pub fn one(&self) -> FieldElement {
        FieldElement([1, 0, 0])
    }

    pub fn from_base(&self, a: u64) -> FieldElement {
        FieldElement([self.base.reduce(a), 0, 0])
    }

    pub fn from_i64(&self, a: i64) -> FieldElement {
        FieldElement([self.base.from_i64(a), 0, 0])
    }

    pub fn from_bigint(&self, a: &BigInt) -> FieldElement {
        FieldElement([self.base.from_bigint(a), 0, 0])
    }

    /// Element from coordinates; each is reduced mod p.
    pub fn from_coords(&self, coords: &[u64]) -> FieldElement {
        let mut c = [0u64; 3];
        for (slot, &v) in c.iter_mut().zip(coords.iter()).take(self.k) {
            *slot = v % self.base.p();
        }
        FieldElement(c)
    }

    /// The element with base-p digits of `index` as coordinates.
    pub fn element(&self, mut index: u128) -> FieldElement {
        let p = u128::from(self.base.p());
        let mut c = [0u64; 3];
        for slot in c.iter_mut().take(self.k) {
            *slot = (index % p) as u64;
            index /= p;
        }
        FieldElement(c)
    }

    pub fn index_of(&self, e: &FieldElement) -> u128 {
        let p = u128::from(self.base.p());
        (0..self.k).rev().fold(0u128, |acc, i| acc * p + u128::from(e.0[i]))
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.order).map(move |i| self.element(i))
    }

    /// Whether the element lies in the prime subfield.
    pub fn in_base(&self, a: &FieldElement) -> bool {
        a.0[1] == 0 && a.0[2] == 0
    }

    #[inline(always)]
    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let f = &self.base;
        FieldElement([f.add(a.0[0], b.0[0]), f.add(a.0[1], b.0[1]), f.add(a.0[2], b.0[2])])
    }

    #[inline(always)]
    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let f = &self.base;
        FieldElement([f.sub(a.0[0], b.0[0]), f.sub(a.0[1], b.0[1]), f.sub(a.0[2], b.0[2])])
    }

    #[inline(always)]
    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        let f = &self.base;
        FieldElement([f.neg(a.0[0]), f.neg(a.0[1]), f.neg(a.0[2])])
    }

    #[inline(always)]
    pub fn scale(&self, a: &FieldElement, s: u64) -> FieldElement {
        let f = &self.base;
        FieldElement([f.mul(a.0[0], s), f.mul(a.0[1], s), f.mul(a.0[2], s)])
    }

    #[inline(always)]
    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let f = &self.base;
        let (a, b) = (&a.0, &b.0);
        match self.k {
            1 => FieldElement([f.mul(a[0], b[0]), 0, 0]),
            2 => {
                let c0 = a[0] * b[0];
                let c1 = f.reduce(a[0] * b[1]) + f.reduce(a[1] * b[0]);
                let c2 = f.reduce(a[1] * b[1]);
                FieldElement([
                    f.reduce(f.reduce(c0) + c2 * self.fold[0][0]),
                    f.reduce(c1 + c2 * self.fold[0][1]),
                    0,
                ])
            }
            _ => {
                // three products of residues below 2^31 fit in a u64
                let c0 = f.reduce(a[0] * b[0]);
                let c1 = f.reduce(a[0] * b[1] + a[1] * b[0]);
                let c2 = f.reduce(a[0] * b[2] + a[1] * b[1] + a[2] * b[0]);
                let c3 = f.reduce(a[1] * b[2] + a[2] * b[1]);
                let c4 = f.reduce(a[2] * b[2]);
                let [r3, r4] = &self.fold;
                FieldElement([
                    f.reduce(c0 + c3 * r3[0] + c4 * r4[0]),
                    f.reduce(c1 + c3 * r3[1] + c4 * r4[1]),
                    f.reduce(c2 + c3 * r3[2] + c4 * r4[2]),
                ])
            }
        }
    }

    #[inline(always)]
    pub fn square(&self, a: &FieldElement) -> FieldElement {
        self.mul(a, a)
    }

    /// `e^n` by square-and-multiply; `e^0 = 1`.
    pub fn pow(&self, e: &FieldElement, mut n: u128) -> FieldElement {
        let mut acc = self.one();
        let mut base = *e;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            n >>= 1;
            if n > 0 {
                base = self.square(&base);
            }
        }
        acc
    }

    /// Inverse of a nonzero element.
    pub fn inv(&self, a: &FieldElement) -> FieldElement {
        debug_assert!(!a.is_zero());
        if self.k == 1 {
            return FieldElement([self.base.inv(a.0[0]), 0, 0]);
        }
        // a^-1 = a^(e-1) / N(a) with e = (q-1)/(p-1)
        let e = (self.order - 1) / u128::from(self.base.p() - 1);
        let partial = self.pow(a, e - 1);
        let n = self.norm(a);
        self.scale(&partial, self.base.inv(n))
    }

    /// The p-power Frobenius automorphism.
    #[inline]
    pub fn frobenius(&self, a: &FieldElement) -> FieldElement {
        if self.k == 1 {
            return *a;
        }
        let f = &self.base;
        let mut out = [a.0[0], 0, 0];
        for j in 1..self.k {
            if a.0[j] == 0 {
                continue;
            }
            for (i, slot) in out.iter_mut().enumerate().take(self.k) {
                *slot = f.add(*slot, f.mul(a.0[j], self.frob[j][i]));
            }
        }
        FieldElement(out)
    }

    /// Norm down to `F_p`.
    pub fn norm(&self, a: &FieldElement) -> u64 {
        match self.k {
            1 => a.0[0],
            2 => self.mul(a, &self.frobenius(a)).0[0],
            _ => {
                let s1 = self.frobenius(a);
                let s2 = self.frobenius(&s1);
                self.mul(&self.mul(a, &s1), &s2).0[0]
            }
        }
    }

    /// Quadratic character: 0, 1 or -1.
    pub fn quadratic_character(&self, a: &FieldElement) -> i8 {
        if a.is_zero() {
            return 0;
        }
        self.base.legendre(self.norm(a))
    }

    /// Whether a nonzero `a` is a `g`-th power, for `g | q - 1`.
    pub fn is_power(&self, a: &FieldElement, g: u64) -> bool {
        debug_assert!(!a.is_zero());
        let p = self.base.p();
        if (p - 1).is_multiple_of(g) {
            // a^((q-1)/g) = N(a)^((p-1)/g)
            self.base.is_power(self.norm(a), g)
        } else {
            self.pow(a, (self.order - 1) / u128::from(g)) == self.one()
        }
    }

    /// A square root, when one exists.
    pub fn sqrt(&self, a: &FieldElement) -> Option<FieldElement> {
        if a.is_zero() {
            return Some(*a);
        }
        match self.k {
            1 => self.base.sqrt(a.0[0]).map(|r| FieldElement([r, 0, 0])),
            3 => {
                // b = sigma(a^((p+1)/2)) * a satisfies b^2 = N(a) a
                let root_norm = self.base.sqrt(self.norm(a))?;
                let half = self.pow(a, u128::from(self.base.p().div_ceil(2)));
                let b = self.mul(&self.frobenius(&half), a);
                Some(self.scale(&b, self.base.inv(root_norm)))
            }
            _ => self.tonelli_shanks(a),
        }
    }

    fn tonelli_shanks(&self, a: &FieldElement) -> Option<FieldElement> {
        if self.quadratic_character(a) != 1 {
            return None;
        }
        let mut q = self.order - 1;
        let mut s = 0u32;
        while q.is_multiple_of(2) {
            q /= 2;
            s += 1;
        }
        let one = self.one();
        let mut m = s;
        let mut c = self.pow(&self.nonresidue, q);
        let mut t = self.pow(a, q);
        let mut r = self.pow(a, q.div_ceil(2));
        while t != one {
            let mut i = 0;
            let mut t2 = t;
            while t2 != one {
                t2 = self.square(&t2);
                i += 1;
            }
            let b = self.pow(&c, 1u128 << (m - i - 1));
            m = i;
            c = self.square(&b);
            t = self.mul(&t, &c);
            r = self.mul(&r, &b);
        }
        Some(r)
    }

    /// Number of distinct roots of `f` in this field, as the degree of
    /// `gcd(x^q - x, f)`.
    pub fn count_roots(&self, f: &Poly) -> Result<usize, FieldError> {
        if f.is_zero() {
            return Err(FieldError::ZeroPolynomial);
        }
        let f = f.monic(self);
        match f.degree() {
            0 => return Ok(0),
            1 => return Ok(1),
            _ => {}
        }
        let xq = self.x_pow_q_mod(&f);
        let h = xq.sub(self, &Poly::x(self));
        Ok(Poly::gcd(self, &h, &f).degree())
    }

    /// `x^q mod f` for monic `f`: `x^p` by repeated squaring, then the
    /// remaining Frobenius powers by composition,
    /// `x^(p^(j+1)) = sigma(h_j)(x^p)`.
    pub fn x_pow_q_mod(&self, f: &Poly) -> Poly {
        let xp = Poly::x(self).pow_mod(self, u128::from(self.base.p()), f);
        let mut acc = xp.clone();
        for _ in 1..self.k {
            let twisted = acc.map_coeffs(|c| self.frobenius(c));
            acc = twisted.compose_mod(self, &xp, f);
        }
        acc
    }
}

/// Dense univariate polynomial over an [`ExtField`], coefficients ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly(Vec<FieldElement>);

impl Poly {
    pub fn new(mut coeffs: Vec<FieldElement>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly(coeffs)
    }

    pub fn from_base(field: &ExtField, coeffs: &[u64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| field.from_base(c)).collect())
    }

    pub fn from_i64(field: &ExtField, coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| field.from_i64(c)).collect())
    }

    pub fn x(field: &ExtField) -> Self {
        Poly(vec![field.zero(), field.one()])
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Option<&FieldElement> {
        self.0.last()
    }

    pub fn eval(&self, field: &ExtField, x: &FieldElement) -> FieldElement {
        self.0
            .iter()
            .rev()
            .fold(field.zero(), |acc, c| field.add(&field.mul(&acc, x), c))
    }

    pub fn monic(&self, field: &ExtField) -> Poly {
        match self.leading() {
            None => self.clone(),
            Some(lc) => {
                let inv = field.inv(lc);
                self.map_coeffs(|c| field.mul(c, &inv))
            }
        }
    }

    pub fn map_coeffs(&self, f: impl Fn(&FieldElement) -> FieldElement) -> Poly {
        Poly::new(self.0.iter().map(f).collect())
    }

    pub fn add(&self, field: &ExtField, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let zero = field.zero();
        Poly::new(
            (0..n)
                .map(|i| field.add(self.0.get(i).unwrap_or(&zero), other.0.get(i).unwrap_or(&zero)))
                .collect(),
        )
    }

    pub fn sub(&self, field: &ExtField, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let zero = field.zero();
        Poly::new(
            (0..n)
                .map(|i| field.sub(self.0.get(i).unwrap_or(&zero), other.0.get(i).unwrap_or(&zero)))
                .collect(),
        )
    }

    pub fn mul(&self, field: &ExtField, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly(Vec::new());
        }
        let mut out = vec![field.zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] = field.add(&out[i + j], &field.mul(a, b));
            }
        }
        Poly::new(out)
    }

    pub fn derivative(&self, field: &ExtField) -> Poly {
        Poly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| field.scale(c, i as u64 % field.characteristic()))
                .collect(),
        )
    }

    /// Remainder modulo a nonzero divisor.
    pub fn rem(&self, field: &ExtField, divisor: &Poly) -> Poly {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let dlen = divisor.0.len();
        if self.0.len() < dlen {
            return self.clone();
        }
        let lc_inv = field.inv(divisor.leading().unwrap());
        let mut r = self.0.clone();
        for top in (dlen - 1..r.len()).rev() {
            let coef = field.mul(&r[top], &lc_inv);
            if coef.is_zero() {
                continue;
            }
            let shift = top + 1 - dlen;
            for (j, d) in divisor.0.iter().enumerate() {
                r[shift + j] = field.sub(&r[shift + j], &field.mul(&coef, d));
            }
        }
        r.truncate(dlen - 1);
        Poly::new(r)
    }

    pub fn mul_mod(&self, field: &ExtField, other: &Poly, modulus: &Poly) -> Poly {
        self.mul(field, other).rem(field, modulus)
    }

    pub fn pow_mod(&self, field: &ExtField, mut n: u128, modulus: &Poly) -> Poly {
        let mut acc = Poly::new(vec![field.one()]).rem(field, modulus);
        let mut base = self.rem(field, modulus);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul_mod(field, &base, modulus);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul_mod(field, &base, modulus);
            }
        }
        acc
    }

    /// `self(inner) mod modulus`.
    pub fn compose_mod(&self, field: &ExtField, inner: &Poly, modulus: &Poly) -> Poly {
        let mut acc = Poly(Vec::new());
        for c in self.0.iter().rev() {
            acc = acc.mul_mod(field, inner, modulus).add(field, &Poly::new(vec![*c]));
        }
        acc
    }

    /// Monic greatest common divisor (zero if both inputs are zero).
    pub fn gcd(field: &ExtField, a: &Poly, b: &Poly) -> Poly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let r = a.rem(field, &b);
            a = b;
            b = r;
        }
        a.monic(field)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_roots(field: &ExtField, f: &Poly) -> usize {
        field.elements().filter(|x| f.eval(field, x).is_zero()).count()
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(make_ext_field(9, 1).unwrap_err(), FieldError::NotPrime(9));
        assert_eq!(
            make_ext_field(2, 1).unwrap_err(),
            FieldError::CharacteristicOutOfRange(2)
        );
        assert_eq!(
            make_ext_field(2147483659, 1).unwrap_err(),
            FieldError::CharacteristicOutOfRange(2147483659)
        );
        assert_eq!(make_ext_field(5, 4).unwrap_err(), FieldError::UnsupportedDegree(4));
        assert_eq!(make_ext_field(5, 0).unwrap_err(), FieldError::UnsupportedDegree(0));
    }

    #[test]
    fn modulus_choice() {
        assert_eq!(make_ext_field(3, 1).unwrap().modulus(), vec![0, 1]);
        assert_eq!(make_ext_field(3, 2).unwrap().modulus(), vec![1, 0, 1]);
        // exhaustive oracle: first rootless monic quadratic in (c1, c0) order
        for p in [5u64, 7, 11, 13] {
            let fp = make_ext_field(p, 1).unwrap();
            let expect = (0..p)
                .flat_map(|c1| (0..p).map(move |c0| (c1, c0)))
                .find(|&(c1, c0)| (0..p).all(|x| (x * x + c1 * x + c0) % p != 0))
                .unwrap();
            let f = make_ext_field(p, 2).unwrap();
            assert_eq!(f.modulus(), vec![expect.1, expect.0, 1], "p = {p}");
            // cubic: first monic cubic without roots
            let expect3 = (0..p)
                .flat_map(|c2| (0..p).flat_map(move |c1| (0..p).map(move |c0| (c2, c1, c0))))
                .find(|&(c2, c1, c0)| (0..p).all(|x| (x * x * x + c2 * x * x + c1 * x + c0) % p != 0))
                .unwrap();
            assert_eq!(
                make_ext_field(p, 3).unwrap().modulus(),
                vec![expect3.2, expect3.1, expect3.0, 1]
            );
            drop(fp);
        }
        assert_eq!(make_ext_field(5, 2).unwrap().modulus(), vec![2, 0, 1]);
    }

    #[test]
    fn pow_examples() {
        let f7 = make_ext_field(7, 1).unwrap();
        assert_eq!(f7.pow(&f7.from_base(2), 3), f7.one());
        assert_eq!(f7.pow(&f7.from_base(5), 0), f7.one());
        let f9 = make_ext_field(3, 2).unwrap();
        let gen = f9
            .elements()
            .find(|e| !e.is_zero() && (1..8).all(|n| f9.pow(e, n) != f9.one()))
            .unwrap();
        assert_eq!(f9.pow(&gen, 8), f9.one());
    }

    #[test]
    fn quadratic_character_examples() {
        let f7 = make_ext_field(7, 1).unwrap();
        assert_eq!(f7.quadratic_character(&f7.zero()), 0);
        assert_eq!(f7.quadratic_character(&f7.from_base(4)), 1);
        assert_eq!(f7.quadratic_character(&f7.from_base(3)), -1);
    }

    #[test]
    fn count_roots_examples() {
        let f3 = make_ext_field(3, 1).unwrap();
        assert_eq!(f3.count_roots(&Poly::from_i64(&f3, &[1, 0, 1])).unwrap(), 0);
        let f5 = make_ext_field(5, 1).unwrap();
        assert_eq!(f5.count_roots(&Poly::from_i64(&f5, &[-1, 0, 1])).unwrap(), 2);
        let f7 = make_ext_field(7, 1).unwrap();
        // (x-1)^2 (x-2) = x^3 - 4x^2 + 5x - 2
        assert_eq!(f7.count_roots(&Poly::from_i64(&f7, &[-2, 5, -4, 1])).unwrap(), 2);
        assert_eq!(f7.count_roots(&Poly::new(vec![])), Err(FieldError::ZeroPolynomial));
    }

    #[test]
    fn frobenius_identity_exhaustive() {
        for (p, k) in [
            (3u64, 1usize),
            (3, 2),
            (3, 3),
            (5, 3),
            (7, 2),
            (11, 3),
            (19, 3),
            (97, 2),
        ] {
            let f = make_ext_field(p, k).unwrap();
            let q = f.order();
            assert!(q <= 10_000);
            for e in f.elements() {
                assert_eq!(f.pow(&e, q), e);
                assert_eq!(f.frobenius(&e), f.pow(&e, u128::from(p)));
            }
        }
    }

    #[test]
    fn sqrt_and_power_tests_match_exponentiation() {
        for (p, k) in [(7u64, 3usize), (13, 3), (5, 2), (11, 2), (31, 1), (17, 3)] {
            let f = make_ext_field(p, k).unwrap();
            let q = f.order();
            for e in f.elements().filter(|e| !e.is_zero()) {
                let is_sq = f.pow(&e, (q - 1) / 2) == f.one();
                assert_eq!(f.quadratic_character(&e) == 1, is_sq);
                match f.sqrt(&e) {
                    Some(r) => assert_eq!(f.square(&r), e),
                    None => assert!(!is_sq),
                }
                for g in [3u64, 4] {
                    if (q - 1).is_multiple_of(u128::from(g)) {
                        let expect = f.pow(&e, (q - 1) / u128::from(g)) == f.one();
                        assert_eq!(f.is_power(&e, g), expect);
                    }
                }
                assert_eq!(f.mul(&e, &f.inv(&e)), f.one());
            }
        }
    }

    #[test]
    fn large_prime_without_tables() {
        let p = 2_147_483_629u64; // largest prime below 2^31
        assert!(is_prime(p));
        let f = make_ext_field(p, 3).unwrap();
        let a = f.from_coords(&[123456789, 987654321, 55555]);
        assert_eq!(f.pow(&a, f.order()), a);
        let sq = f.square(&a);
        let r = f.sqrt(&sq).unwrap();
        assert_eq!(f.square(&r), sq);
        assert_eq!(f.mul(&a, &f.inv(&a)), f.one());
        let fp = PrimeField::new(p).unwrap();
        let r = fp.sqrt(fp.mul(77, 77)).unwrap();
        assert!(r == 77 || r == p - 77);
    }

    #[test]
    fn count_roots_matches_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for (p, k) in [(3u64, 1usize), (5, 2), (7, 3), (13, 2), (101, 1), (11, 3), (3, 3)] {
            let f = make_ext_field(p, k).unwrap();
            for _ in 0..60 {
                let deg = rng.gen_range(1..=4);
                let mut coeffs: Vec<FieldElement> = (0..=deg).map(|_| f.element(rng.gen_range(0..f.order()))).collect();
                if coeffs[deg].is_zero() {
                    coeffs[deg] = f.one();
                }
                // force some repeated roots
                let poly = if rng.gen_bool(0.3) {
                    let r = f.element(rng.gen_range(0..f.order()));
                    let lin = Poly::new(vec![f.neg(&r), f.one()]);
                    lin.mul(&f, &lin).mul(&f, &Poly::new(coeffs[..deg.min(2) + 1].to_vec()))
                } else {
                    Poly::new(coeffs)
                };
                if poly.is_zero() {
                    continue;
                }
                assert_eq!(f.count_roots(&poly).unwrap(), brute_roots(&f, &poly));
            }
        }
    }

    proptest! {
        #[test]
        fn field_axioms(p in prop::sample::select(vec![3u64, 5, 7, 101, 65521, 2147483629]),
                        k in 1usize..=3, xs in prop::array::uniform9(any::<u64>())) {
            let f = make_ext_field(p, k).unwrap();
            let a = f.from_coords(&xs[0..3]);
            let b = f.from_coords(&xs[3..6]);
            let c = f.from_coords(&xs[6..9]);
            prop_assert_eq!(f.mul(&f.add(&a, &b), &c), f.add(&f.mul(&a, &c), &f.mul(&b, &c)));
            prop_assert_eq!(f.mul(&a, &b), f.mul(&b, &a));
            prop_assert_eq!(f.mul(&f.mul(&a, &b), &c), f.mul(&a, &f.mul(&b, &c)));
            if !a.is_zero() {
                prop_assert_eq!(f.mul(&a, &f.inv(&a)), f.one());
            }
            prop_assert_eq!(f.pow(&a, f.order()), a);
        }

        #[test]
        fn quadratic_character_is_multiplicative(p in prop::sample::select(vec![3u64, 7, 13, 8191]),
                                                 k in 1usize..=3, xs in prop::array::uniform6(1u64..1_000_000)) {
            let f = make_ext_field(p, k).unwrap();
            let a = f.from_coords(&xs[0..3]);
            let b = f.from_coords(&xs[3..6]);
            prop_assume!(!a.is_zero() && !b.is_zero());
            prop_assert_eq!(
                f.quadratic_character(&f.mul(&a, &b)),
                f.quadratic_character(&a) * f.quadratic_character(&b)
            );
        }
    }
}
