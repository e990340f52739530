//! Action of diagonal monomial automorphisms on regular differentials.

use std::fmt;

use num_integer::Integer;
use num_traits::Zero;
use thiserror::Error;

use crate::curves::{CurveKind, CurveModel, QUARTIC_MONOMIALS};

pub const MAX_CYCLOTOMIC_ORDER: u32 = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SigError {
    #[error("invalid root of unity {num}/{order}")]
    InvalidRoot { num: i64, order: u32 },
    #[error("common order {0} exceeds {MAX_CYCLOTOMIC_ORDER}")]
    OrderTooLarge(u32),
    #[error("automorphism does not preserve the equation: {0}")]
    NotAnAutomorphism(String),
    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),
    #[error("basis must have 3 elements, got {0}")]
    BadBasis(usize),
    #[error("theorem violation: {0}")]
    TheoremViolation(String),
}

/// `exp(2 pi i num / order)`, always stored reduced with `0 <= num < order`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootOfUnity {
    num: u32,
    order: u32,
}

impl RootOfUnity {
    pub const ONE: RootOfUnity = RootOfUnity { num: 0, order: 1 };

    pub fn new(num: i64, order: u32) -> Result<Self, SigError> {
        if order == 0 {
            return Err(SigError::InvalidRoot { num, order });
        }
        let n = num.rem_euclid(i64::from(order)) as u32;
        let g = n.gcd(&order);
        Ok(RootOfUnity {
            num: n / g,
            order: order / g,
        })
    }

    pub fn num(&self) -> u32 {
        self.num
    }

    /// Multiplicative order.
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn mul(&self, other: &Self) -> Self {
        let l = self.order.lcm(&other.order);
        let n = self.num * (l / self.order) + other.num * (l / other.order);
        Self::new(i64::from(n), l).expect("nonzero order")
    }

    pub fn pow(&self, e: i64) -> Self {
        Self::new(i64::from(self.num) * e, self.order).expect("nonzero order")
    }

    pub fn conj(&self) -> Self {
        self.pow(-1)
    }

    pub fn is_rational(&self) -> bool {
        self.order <= 2
    }

    /// In the upper half plane under the standard embedding.
    fn is_upper(&self) -> bool {
        2 * self.num < self.order
    }
}

impl fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.num, self.order) {
            (0, 1) => write!(f, "1"),
            (1, 2) => write!(f, "-1"),
            (1, 4) => write!(f, "i"),
            (3, 4) => write!(f, "-i"),
            (1, o) => write!(f, "zeta_{o}"),
            (n, o) => write!(f, "zeta_{o}^{n}"),
        }
    }
}

/// `(x, y) -> (zeta_x x, zeta_y y)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MonomialAutomorphism {
    pub zeta_x: RootOfUnity,
    pub zeta_y: RootOfUnity,
}

impl MonomialAutomorphism {
    pub fn new(zeta_x: RootOfUnity, zeta_y: RootOfUnity) -> Result<Self, SigError> {
        let n = zeta_x.order.lcm(&zeta_y.order);
        if n > MAX_CYCLOTOMIC_ORDER {
            return Err(SigError::OrderTooLarge(n));
        }
        Ok(MonomialAutomorphism { zeta_x, zeta_y })
    }

    pub fn identity() -> Self {
        MonomialAutomorphism {
            zeta_x: RootOfUnity::ONE,
            zeta_y: RootOfUnity::ONE,
        }
    }

    /// Checks that every monomial of the equation picks up the same scalar.
    pub fn preserves(&self, c: &CurveModel) -> Result<(), SigError> {
        let (zx, zy) = (self.zeta_x, self.zeta_y);
        let mut factors: Vec<(String, RootOfUnity)> = Vec::new();
        match c.kind() {
            CurveKind::Hyperelliptic { f } | CurveKind::Superelliptic { f, .. } => {
                let m = match c.kind() {
                    CurveKind::Superelliptic { m, .. } => i64::from(*m),
                    _ => 2,
                };
                factors.push((format!("y^{m}"), zy.pow(m)));
                for (k, coeff) in f.iter().enumerate() {
                    if !coeff.is_zero() {
                        factors.push((format!("x^{k}"), zx.pow(k as i64)));
                    }
                }
            }
            CurveKind::PlaneQuartic { coeffs } => {
                for (&(a, b, cz), coeff) in QUARTIC_MONOMIALS.iter().zip(coeffs) {
                    if !coeff.is_zero() {
                        let z = zx.pow(i64::from(a)).mul(&zy.pow(i64::from(b)));
                        factors.push((format!("X^{a}Y^{b}Z^{cz}"), z));
                    }
                }
            }
        }
        let (first_name, first) = &factors[0];
        for (name, z) in &factors[1..] {
            if z != first {
                return Err(SigError::NotAnAutomorphism(format!(
                    "{first_name} scales by {first}, {name} by {z}"
                )));
            }
        }
        Ok(())
    }
}

/// `x^i dx / y^j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Differential {
    pub i: u32,
    pub j: u32,
}

impl fmt::Display for Differential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.i {
            0 => write!(f, "dx/y^{}", self.j),
            1 => write!(f, "x dx/y^{}", self.j),
            i => write!(f, "x^{i} dx/y^{}", self.j),
        }
    }
}

pub fn differential_basis(c: &CurveModel) -> Result<Vec<Differential>, SigError> {
    let d = |i, j| Differential { i, j };
    match c.kind() {
        CurveKind::Hyperelliptic { f } if matches!(f.len(), 8 | 9) => Ok(vec![d(0, 1), d(1, 1), d(2, 1)]),
        CurveKind::Superelliptic { m: 4, f } if f.len() == 4 => Ok(vec![d(0, 3), d(0, 2), d(1, 3)]),
        CurveKind::Superelliptic { m: 3, f } if f.len() == 5 => Ok(vec![d(0, 1), d(0, 2), d(1, 2)]),
        CurveKind::PlaneQuartic { .. } => Err(SigError::UnsupportedFamily("plane quartic".into())),
        _ => Err(SigError::UnsupportedFamily(c.name().to_string())),
    }
}

pub fn validate_basis(basis: &[Differential]) -> Result<(), SigError> {
    if basis.len() != 3 {
        return Err(SigError::BadBasis(basis.len()));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeneratedAlgebra {
    /// Automorphism acts by a rational scalar.
    Rational,
    /// `Q(zeta_n)` with `n` in {3, 4, 6}.
    ImaginaryQuadratic { order: u32 },
    /// Several distinct factors, or a factor of degree above 2.
    Product { orders: Vec<u32> },
}

impl fmt::Display for GeneratedAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratedAlgebra::Rational => write!(f, "Q"),
            GeneratedAlgebra::ImaginaryQuadratic { order: 4 } => write!(f, "Q(i)"),
            GeneratedAlgebra::ImaginaryQuadratic { .. } => write!(f, "Q(sqrt(-3))"),
            GeneratedAlgebra::Product { orders } => {
                let parts: Vec<String> = orders
                    .iter()
                    .map(|o| match o {
                        1 | 2 => "Q".to_string(),
                        4 => "Q(i)".to_string(),
                        3 | 6 => "Q(sqrt(-3))".to_string(),
                        o => format!("Q(zeta_{o})"),
                    })
                    .collect();
                write!(f, "{}", parts.join(" x "))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignatureReport {
    pub eigenvalues: Vec<RootOfUnity>,
    pub signature: Option<(u32, u32)>,
    pub unital: bool,
    pub generated_algebra: GeneratedAlgebra,
}

impl SignatureReport {
    pub fn verdict(&self) -> String {
        match (&self.generated_algebra, self.unital) {
            (GeneratedAlgebra::Rational, _) => "no imaginary multiplication detected".into(),
            (_, true) => "unital".into(),
            (_, false) => "not unital".into(),
        }
    }
}

pub fn act(a: &MonomialAutomorphism, c: &CurveModel, basis: &[Differential]) -> Result<SignatureReport, SigError> {
    validate_basis(basis)?;
    a.preserves(c)?;
    let eigenvalues: Vec<RootOfUnity> = basis
        .iter()
        .map(|w| a.zeta_x.pow(i64::from(w.i) + 1).mul(&a.zeta_y.pow(-i64::from(w.j))))
        .collect();

    let mut orders: Vec<u32> = eigenvalues.iter().map(|z| z.order).collect();
    orders.sort_unstable();
    orders.dedup();
    let any_rational = eigenvalues.iter().any(RootOfUnity::is_rational);
    let all_rational = eigenvalues.iter().all(RootOfUnity::is_rational);
    // 3 and 6 are both Q(sqrt(-3)) but as factors of Q[T] they differ.
    let generated_algebra = if all_rational && orders.len() == 1 {
        GeneratedAlgebra::Rational
    } else if orders.len() == 1 && matches!(orders[0], 3 | 4 | 6) {
        GeneratedAlgebra::ImaginaryQuadratic { order: orders[0] }
    } else {
        GeneratedAlgebra::Product { orders }
    };
    let unital = !any_rational || generated_algebra == GeneratedAlgebra::Rational;

    let signature = match generated_algebra {
        GeneratedAlgebra::ImaginaryQuadratic { .. } => {
            let up = eigenvalues.iter().filter(|z| z.is_upper()).count() as u32;
            let down = eigenvalues.len() as u32 - up;
            Some((up.max(down), up.min(down)))
        }
        _ => None,
    };
    if unital {
        if let Some(sig) = signature {
            if sig != (2, 1) {
                return Err(SigError::TheoremViolation(format!(
                    "unital action with signature {sig:?}"
                )));
            }
        }
    }
    Ok(SignatureReport {
        eigenvalues,
        signature,
        unital,
        generated_algebra,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn root(n: i64, o: u32) -> RootOfUnity {
        RootOfUnity::new(n, o).unwrap()
    }

    fn ex29() -> CurveModel {
        CurveModel::hyperelliptic("x7-5x", ints(&[0, -5, 0, 0, 0, 0, 0, 1]), vec![2, 3, 5]).unwrap()
    }

    fn ex24() -> CurveModel {
        CurveModel::hyperelliptic("x8+11x4+3", ints(&[3, 0, 0, 0, 11, 0, 0, 0, 1]), vec![2, 3, 109]).unwrap()
    }

    fn ex25() -> CurveModel {
        CurveModel::superelliptic("y4", 4, ints(&[1, -1, 0, 1]), vec![2, 23]).unwrap()
    }

    #[test]
    fn roots_reduce() {
        assert_eq!(root(2, 8), root(1, 4));
        assert_eq!(root(-1, 4), root(3, 4));
        assert_eq!(root(1, 4).mul(&root(1, 4)), root(1, 2));
        assert_eq!(root(1, 3).mul(&root(1, 2)), root(5, 6));
        assert_eq!(root(1, 4).to_string(), "i");
        assert!(MonomialAutomorphism::new(root(1, 5), root(1, 4)).is_err());
    }

    #[test]
    fn unital_example() {
        let c = ex29();
        let a = MonomialAutomorphism::new(root(1, 2), root(1, 4)).unwrap();
        let r = act(&a, &c, &differential_basis(&c).unwrap()).unwrap();
        assert_eq!(r.eigenvalues, vec![root(1, 4), root(3, 4), root(1, 4)]);
        assert_eq!(r.signature, Some((2, 1)));
        assert!(r.unital);
        assert_eq!(r.generated_algebra.to_string(), "Q(i)");
    }

    #[test]
    fn non_unital_examples() {
        let c = ex24();
        let a = MonomialAutomorphism::new(root(1, 4), RootOfUnity::ONE).unwrap();
        let r = act(&a, &c, &differential_basis(&c).unwrap()).unwrap();
        assert_eq!(r.eigenvalues, vec![root(1, 4), root(1, 2), root(3, 4)]);
        assert!(!r.unital);

        let c = ex25();
        let basis = differential_basis(&c).unwrap();
        assert_eq!(basis[0], Differential { i: 0, j: 3 });
        let a = MonomialAutomorphism::new(RootOfUnity::ONE, root(1, 4)).unwrap();
        let r = act(&a, &c, &basis).unwrap();
        assert_eq!(r.eigenvalues, vec![root(1, 4), root(1, 2), root(1, 4)]);
        assert!(!r.unital);
        assert_eq!(r.verdict(), "not unital");
    }

    #[test]
    fn identity_detects_nothing() {
        let c = ex29();
        let r = act(&MonomialAutomorphism::identity(), &c, &differential_basis(&c).unwrap()).unwrap();
        assert_eq!(r.eigenvalues, vec![RootOfUnity::ONE; 3]);
        assert_eq!(r.verdict(), "no imaginary multiplication detected");
        assert_eq!(r.signature, None);
    }

    #[test]
    fn rejects_non_automorphisms() {
        let c = ex29();
        let a = MonomialAutomorphism::new(root(1, 4), RootOfUnity::ONE).unwrap();
        assert!(matches!(
            act(&a, &c, &differential_basis(&c).unwrap()),
            Err(SigError::NotAnAutomorphism(_))
        ));
    }

    #[test]
    fn superelliptic_cubic_order_three() {
        // y^3 = x^4 - x + 1 with y -> zeta_3 y
        let c = CurveModel::superelliptic("d3", 3, ints(&[1, -1, 0, 0, 1]), vec![2, 3, 229]).unwrap();
        let a = MonomialAutomorphism::new(RootOfUnity::ONE, root(1, 3)).unwrap();
        let r = act(&a, &c, &differential_basis(&c).unwrap()).unwrap();
        assert_eq!(r.eigenvalues, vec![root(2, 3), root(1, 3), root(1, 3)]);
        assert_eq!(r.signature, Some((2, 1)));
        assert!(r.unital);
    }

    #[test]
    fn plane_quartic_unsupported() {
        let coeffs = [1, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0, -1];
        let c = CurveModel::plane_quartic("fermat", ints(&coeffs), vec![2]).unwrap();
        assert!(matches!(differential_basis(&c), Err(SigError::UnsupportedFamily(_))));
        assert_eq!(validate_basis(&[]), Err(SigError::BadBasis(0)));
    }
}
