//! Imaginary quadratic fields `M = Q(sqrt(-d))` and their rings of integers.
//!
//! Elements of `O_M` are written `x + y w` with `w = sqrt(-d)` when
//! `-d = 2, 3 mod 4` and `w = (1 + sqrt(-d)) / 2` when `-d = 1 mod 4`.
//! The complex embedding sends `sqrt(-d)` to `+i sqrt(d)`.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::{Integer, Roots};
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::ff::{is_prime, PrimeField};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuadError {
    #[error("d = {0} is not a positive squarefree integer")]
    NotSquarefree(u64),
    #[error("{0} is not a negative discriminant (need D < 0, D = 0 or 1 mod 4)")]
    InvalidDiscriminant(i64),
    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OmegaKind {
    /// `w = sqrt(-d)`
    Root,
    /// `w = (1 + sqrt(-d)) / 2`
    HalfInteger,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadInt {
    pub x: BigInt,
    pub y: BigInt,
}

impl QuadInt {
    pub fn new(x: impl Into<BigInt>, y: impl Into<BigInt>) -> Self {
        QuadInt {
            x: x.into(),
            y: y.into(),
        }
    }

    pub fn from_int(x: impl Into<BigInt>) -> Self {
        QuadInt::new(x, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SplitType {
    /// `p = pi * conj(pi)`; the generator is present when the class number is 1.
    Split {
        pi: Option<QuadInt>,
    },
    Inert,
    Ramified,
}

impl SplitType {
    pub fn label(&self) -> &'static str {
        match self {
            SplitType::Split { .. } => "split",
            SplitType::Inert => "inert",
            SplitType::Ramified => "ramified",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassNumberResult {
    pub disc: i64,
    pub h: usize,
    /// Reduced forms `(a, b, c)`.
    pub forms: Vec<(i64, i64, i64)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImagQuadField {
    d: u64,
    disc: i64,
    omega: OmegaKind,
    class_number: usize,
}

pub fn is_squarefree(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut k = 2u64;
    while k * k <= n {
        if n.is_multiple_of(k * k) {
            return false;
        }
        k += 1;
    }
    true
}

pub fn is_fundamental(disc: i64) -> bool {
    if disc >= 0 {
        return false;
    }
    let m = disc.unsigned_abs();
    match disc.rem_euclid(4) {
        1 => is_squarefree(m),
        0 => {
            let q = disc / 4;
            matches!(q.rem_euclid(4), 2 | 3) && is_squarefree(q.unsigned_abs())
        }
        _ => false,
    }
}

impl ImagQuadField {
    pub fn new(d: u64) -> Result<Self, QuadError> {
        if !is_squarefree(d) || d > i64::MAX as u64 / 4 {
            return Err(QuadError::NotSquarefree(d));
        }
        let (disc, omega) = if (d as i64).wrapping_neg().rem_euclid(4) == 1 {
            (-(d as i64), OmegaKind::HalfInteger)
        } else {
            (-4 * d as i64, OmegaKind::Root)
        };
        let class_number = class_number(disc).expect("field discriminant is valid").h;
        Ok(ImagQuadField {
            d,
            disc,
            omega,
            class_number,
        })
    }

    pub fn from_discriminant(disc: i64) -> Result<Self, QuadError> {
        if !is_fundamental(disc) {
            return Err(QuadError::NotFundamental(disc));
        }
        let d = if disc % 4 == 0 { -disc / 4 } else { -disc };
        Self::new(d as u64)
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn discriminant(&self) -> i64 {
        self.disc
    }

    pub fn omega_kind(&self) -> OmegaKind {
        self.omega
    }

    pub fn class_number(&self) -> usize {
        self.class_number
    }

    /// `(Tr w, Nm w)`, so that `w^2 = Tr(w) w - Nm(w)`.
    fn omega_trace_norm(&self) -> (BigInt, BigInt) {
        match self.omega {
            OmegaKind::Root => (BigInt::zero(), BigInt::from(self.d)),
            OmegaKind::HalfInteger => (BigInt::from(1), BigInt::from((self.d + 1) / 4)),
        }
    }

    pub fn add(&self, a: &QuadInt, b: &QuadInt) -> QuadInt {
        QuadInt::new(&a.x + &b.x, &a.y + &b.y)
    }

    pub fn sub(&self, a: &QuadInt, b: &QuadInt) -> QuadInt {
        QuadInt::new(&a.x - &b.x, &a.y - &b.y)
    }

    pub fn neg(&self, a: &QuadInt) -> QuadInt {
        QuadInt::new(-&a.x, -&a.y)
    }

    pub fn mul(&self, a: &QuadInt, b: &QuadInt) -> QuadInt {
        let (t, n) = self.omega_trace_norm();
        let yy = &a.y * &b.y;
        QuadInt::new(&a.x * &b.x - &n * &yy, &a.x * &b.y + &a.y * &b.x + t * yy)
    }

    pub fn scale(&self, a: &QuadInt, k: &BigInt) -> QuadInt {
        QuadInt::new(&a.x * k, &a.y * k)
    }

    pub fn conj(&self, a: &QuadInt) -> QuadInt {
        let (t, _) = self.omega_trace_norm();
        QuadInt::new(&a.x + t * &a.y, -&a.y)
    }

    pub fn norm(&self, a: &QuadInt) -> BigInt {
        let (t, n) = self.omega_trace_norm();
        &a.x * &a.x + t * &a.x * &a.y + n * &a.y * &a.y
    }

    pub fn trace(&self, a: &QuadInt) -> BigInt {
        let (t, _) = self.omega_trace_norm();
        BigInt::from(2) * &a.x + t * &a.y
    }

    /// `a / b` when it lies in `O_M`.
    pub fn div_exact(&self, a: &QuadInt, b: &QuadInt) -> Option<QuadInt> {
        let n = self.norm(b);
        if n.is_zero() {
            return None;
        }
        let num = self.mul(a, &self.conj(b));
        let (qx, rx) = num.x.div_rem(&n);
        let (qy, ry) = num.y.div_rem(&n);
        (rx.is_zero() && ry.is_zero()).then(|| QuadInt::new(qx, qy))
    }

    /// Whether `k` divides both coordinates.
    pub fn divisible_by(&self, a: &QuadInt, k: &BigInt) -> bool {
        (&a.x % k).is_zero() && (&a.y % k).is_zero()
    }

    pub fn omega_complex(&self) -> Complex64 {
        let s = (self.d as f64).sqrt();
        match self.omega {
            OmegaKind::Root => Complex64::new(0.0, s),
            OmegaKind::HalfInteger => Complex64::new(0.5, s / 2.0),
        }
    }

    pub fn to_complex(&self, a: &QuadInt) -> Complex64 {
        let w = self.omega_complex();
        let x = a.x.to_f64().unwrap_or(f64::NAN);
        let y = a.y.to_f64().unwrap_or(f64::NAN);
        Complex64::new(x, 0.0) + w * y
    }

    /// The lattice point of `O_M` nearest in coordinates to `z`.
    pub fn round(&self, z: Complex64) -> QuadInt {
        let w = self.omega_complex();
        let y = (z.im / w.im).round();
        let x = (z.re - y * w.re).round();
        QuadInt::new(BigInt::from(x as i128), BigInt::from(y as i128))
    }

    pub fn units(&self) -> Vec<QuadInt> {
        match self.disc {
            -4 => vec![
                QuadInt::new(1, 0),
                QuadInt::new(-1, 0),
                QuadInt::new(0, 1),
                QuadInt::new(0, -1),
            ],
            // w = (1 + sqrt(-3)) / 2 is a primitive sixth root of unity
            -3 => vec![
                QuadInt::new(1, 0),
                QuadInt::new(-1, 0),
                QuadInt::new(0, 1),
                QuadInt::new(0, -1),
                QuadInt::new(-1, 1),
                QuadInt::new(1, -1),
            ],
            _ => vec![QuadInt::new(1, 0), QuadInt::new(-1, 0)],
        }
    }

    pub fn is_unit(&self, a: &QuadInt) -> bool {
        self.norm(a) == BigInt::from(1)
    }

    pub fn split_type(&self, p: u64) -> SplitType {
        debug_assert!(is_prime(p));
        let disc = self.disc;
        if disc.rem_euclid(p as i64) == 0 {
            return SplitType::Ramified;
        }
        let split = if p == 2 {
            disc.rem_euclid(8) == 1
        } else {
            let field = PrimeField::new(p).expect("odd prime");
            field.legendre(field.from_i64(disc)) == 1
        };
        if !split {
            return SplitType::Inert;
        }
        let pi = if self.class_number == 1 {
            let pi = self.solve_norm(p);
            assert!(pi.as_ref().is_some_and(|g| self.norm(g) == BigInt::from(p)));
            pi
        } else {
            None
        };
        SplitType::Split { pi }
    }

    /// Some `x + y w` of norm `n`, by scanning `|y| <= sqrt(4 n / |D|)`.
    pub fn solve_norm(&self, n: u64) -> Option<QuadInt> {
        let (t, nw) = self.omega_trace_norm();
        let t = t.to_i128().unwrap();
        let nw = nw.to_i128().unwrap();
        let n = i128::from(n);
        let y_max = (4 * n / i128::from(self.disc.abs())).sqrt();
        for y in 0..=y_max {
            // x^2 + t y x + (nw y^2 - n) = 0
            let disc = t * t * y * y - 4 * (nw * y * y - n);
            if disc < 0 {
                continue;
            }
            let r = disc.sqrt();
            if r * r != disc {
                continue;
            }
            for num in [-t * y + r, -t * y - r] {
                if num % 2 == 0 {
                    let x = num / 2;
                    return Some(QuadInt::new(BigInt::from(x), BigInt::from(y)));
                }
            }
        }
        None
    }
}

/// Reduced forms of discriminant `disc` and their count.
pub fn class_number(disc: i64) -> Result<ClassNumberResult, QuadError> {
    if disc >= 0 || !matches!(disc.rem_euclid(4), 0 | 1) {
        return Err(QuadError::InvalidDiscriminant(disc));
    }
    let abs = disc.unsigned_abs() as i64;
    let mut forms = Vec::new();
    let mut b = abs % 2;
    while 3 * b * b <= abs {
        let ac = (b * b - disc) / 4;
        let mut a = b.max(1);
        while a * a <= ac {
            if ac % a == 0 {
                let c = ac / a;
                forms.push((a, b, c));
                if b != 0 && b != a && a != c {
                    forms.push((a, -b, c));
                }
            }
            a += 1;
        }
        b += 2;
    }
    forms.sort_unstable();
    Ok(ClassNumberResult {
        disc,
        h: forms.len(),
        forms,
    })
}

/// Fundamental discriminants `D` with `|D| <= bound` and class number 1.
pub fn enumerate_class_number_one(bound: u64) -> Vec<i64> {
    (3..=bound as i64)
        .map(|m| -m)
        .filter(|&disc| is_fundamental(disc))
        .filter(|&disc| class_number(disc).map(|r| r.h == 1).unwrap_or(false))
        .collect()
}
