//! Degree-6 L-polynomials of genus-3 Jacobians, assembled from point counts.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::curves::PointCounts;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LpolyError {
    #[error("p = {p}: power sum s{k} = {s} violates the Weil bound")]
    WeilBound { p: u64, k: usize, s: i128 },
    #[error("p = {p}: Newton identities give a non-integral a{index}")]
    NonIntegralCoefficient { p: u64, index: usize },
    #[error("p = {p}: coefficient a{index} = {value} is out of range")]
    CoefficientOutOfRange { p: u64, index: usize, value: i128 },
    #[error("p = {p}: s1 = {s1} but an inert prime forces s1 = 0")]
    S1NonZero { p: u64, s1: i128 },
    #[error("root finder did not converge")]
    NonConvergence,
}

/// `s_k = p^k + 1 - N_k` for `k = 1, 2, 3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PowerSums {
    pub p: u64,
    pub s: [i128; 3],
}

impl PowerSums {
    pub fn from_counts(pc: &PointCounts) -> Result<Self, LpolyError> {
        let p = i128::from(pc.p);
        let mut s = [0i128; 3];
        for k in 0..3 {
            s[k] = p.pow(k as u32 + 1) + 1 - i128::from(pc.n[k]);
        }
        let sums = PowerSums { p: pc.p, s };
        sums.check_weil()?;
        Ok(sums)
    }

    fn check_weil(&self) -> Result<(), LpolyError> {
        let p = i128::from(self.p);
        for (k, &s) in self.s.iter().enumerate() {
            // |s_k| <= 6 p^(k/2)
            if s.checked_mul(s).is_none_or(|sq| sq > 36 * p.pow(k as u32 + 1)) {
                return Err(LpolyError::WeilBound { p: self.p, k: k + 1, s });
            }
        }
        Ok(())
    }
}

/// `L(T) = 1 + a1 T + a2 T^2 + a3 T^3 + p a2 T^4 + p^2 a1 T^5 + p^3 T^6`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LPolynomial {
    pub p: u64,
    pub a1: i64,
    pub a2: i64,
    pub a3: i64,
}

fn exact_div(n: i128, d: i128, p: u64, index: usize) -> Result<i128, LpolyError> {
    if n % d != 0 {
        return Err(LpolyError::NonIntegralCoefficient { p, index });
    }
    Ok(n / d)
}

impl LPolynomial {
    /// Validates the coefficient ranges `|a1| <= 6 sqrt(p)`, `|a2| <= 15 p`,
    /// `|a3| <= 20 p^(3/2)`.
    pub fn new(p: u64, a1: i128, a2: i128, a3: i128) -> Result<Self, LpolyError> {
        let pp = i128::from(p);
        let out_of_range = |index, value| LpolyError::CoefficientOutOfRange { p, index, value };
        if a1 * a1 > 36 * pp {
            return Err(out_of_range(1, a1));
        }
        if a2.abs() > 15 * pp {
            return Err(out_of_range(2, a2));
        }
        if a3 * a3 > 400 * pp * pp * pp {
            return Err(out_of_range(3, a3));
        }
        Ok(LPolynomial {
            p,
            a1: a1 as i64,
            a2: a2 as i64,
            a3: a3 as i64,
        })
    }

    pub fn from_power_sums(ps: &PowerSums) -> Result<Self, LpolyError> {
        ps.check_weil()?;
        let [s1, s2, s3] = ps.s;
        let a1 = -s1;
        let a2 = exact_div(s1 * s1 - s2, 2, ps.p, 2)?;
        let a3 = -exact_div(s1 * s1 * s1 - 3 * s1 * s2 + 2 * s3, 6, ps.p, 3)?;
        Self::new(ps.p, a1, a2, a3)
    }

    pub fn from_counts(pc: &PointCounts) -> Result<Self, LpolyError> {
        Self::from_power_sums(&PowerSums::from_counts(pc)?)
    }

    /// Full coefficient vector `(1, a1, a2, a3, p a2, p^2 a1, p^3)`.
    pub fn coefficients(&self) -> [i128; 7] {
        let p = i128::from(self.p);
        let (a1, a2, a3) = (i128::from(self.a1), i128::from(self.a2), i128::from(self.a3));
        [1, a1, a2, a3, p * a2, p * p * a1, p * p * p]
    }

    /// The six reciprocal roots, as conjugate pairs `(z0, z0', z1, z1', z2, z2')`
    /// with `Im z_i >= 0`.
    pub fn evaluate_roots(&self) -> Result<[Complex64; 6], LpolyError> {
        let p = self.p as f64;
        let r = p.sqrt();
        // reciprocal roots are the roots of T^6 L(1/T); repeated roots are
        // split off exactly first so the iteration only sees simple roots
        let c = self.coefficients();
        let reversed: QPoly = c
            .iter()
            .rev()
            .map(|&v| BigRational::from_integer(BigInt::from(v)))
            .collect();
        let mut scaled: Vec<Complex64> = Vec::with_capacity(6);
        for (factor, multiplicity) in squarefree_decomposition(reversed) {
            let n = factor.len() - 1;
            // alpha = sqrt(p) z puts the roots on the unit circle
            let descending: Vec<f64> = (0..=n)
                .rev()
                .map(|j| factor[j].to_f64().expect("finite") * p.powf((j as f64 - n as f64) / 2.0))
                .collect();
            for z in aberth(&descending)? {
                for _ in 0..multiplicity {
                    scaled.push(z * r);
                }
            }
        }
        scaled.sort_by(|x, y| y.im.total_cmp(&x.im));
        let mut lower: Vec<Complex64> = scaled.split_off(3);
        let mut out = [Complex64::default(); 6];
        for (i, z) in scaled.iter().enumerate() {
            let (j, _) = lower
                .iter()
                .enumerate()
                .min_by(|(_, x), (_, y)| (*x - z.conj()).norm().total_cmp(&(*y - z.conj()).norm()))
                .expect("three lower roots");
            out[2 * i] = *z;
            out[2 * i + 1] = lower.swap_remove(j);
        }
        Ok(out)
    }

    /// `max | |alpha|^2 - p | / p` over the reciprocal roots.
    pub fn root_magnitude_deviation(&self) -> Result<f64, LpolyError> {
        let p = self.p as f64;
        Ok(self
            .evaluate_roots()?
            .iter()
            .map(|z| (z.norm_sqr() - p).abs() / p)
            .fold(0.0, f64::max))
    }
}

/// The inert shape from `N_1, N_2` alone: `a1 = a3 = 0`, `a2 = -s2 / 2`.
pub fn shortcut_inert(n: [u64; 2], p: u64) -> Result<LPolynomial, LpolyError> {
    let pp = i128::from(p);
    let s1 = pp + 1 - i128::from(n[0]);
    let s2 = pp * pp + 1 - i128::from(n[1]);
    if s1 != 0 {
        return Err(LpolyError::S1NonZero { p, s1 });
    }
    if s2.checked_mul(s2).is_none_or(|sq| sq > 36 * pp * pp) {
        return Err(LpolyError::WeilBound { p, k: 2, s: s2 });
    }
    let a2 = exact_div(-s2, 2, p, 2)?;
    LPolynomial::new(p, 0, a2, 0)
}

/// Rational polynomial, coefficients ascending, no trailing zeros.
type QPoly = Vec<BigRational>;

fn q_trim(mut f: QPoly) -> QPoly {
    while f.last().is_some_and(|c| c.is_zero()) {
        f.pop();
    }
    f
}

fn q_monic(f: QPoly) -> QPoly {
    let lead = f.last().expect("nonzero polynomial").clone();
    f.into_iter().map(|c| c / &lead).collect()
}

fn q_derivative(f: &QPoly) -> QPoly {
    q_trim(
        f.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
            .collect(),
    )
}

fn q_sub(a: &QPoly, b: &QPoly) -> QPoly {
    let n = a.len().max(b.len());
    let zero = BigRational::zero();
    q_trim(
        (0..n)
            .map(|i| a.get(i).unwrap_or(&zero) - b.get(i).unwrap_or(&zero))
            .collect(),
    )
}

fn q_divrem(a: &QPoly, b: &QPoly) -> (QPoly, QPoly) {
    let mut r = a.clone();
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let lead = b.last().expect("nonzero divisor");
    let mut q = vec![BigRational::zero(); r.len() - b.len() + 1];
    for top in (b.len() - 1..r.len()).rev() {
        let coef = &r[top] / lead;
        let shift = top + 1 - b.len();
        for (j, d) in b.iter().enumerate() {
            r[shift + j] = &r[shift + j] - &coef * d;
        }
        q[shift] = coef;
    }
    r.truncate(b.len() - 1);
    (q_trim(q), q_trim(r))
}

fn q_gcd(mut a: QPoly, mut b: QPoly) -> QPoly {
    while !b.is_empty() {
        let (_, r) = q_divrem(&a, &b);
        a = b;
        b = r;
    }
    q_monic(a)
}

/// Yun's algorithm: monic squarefree factors paired with their multiplicity.
fn squarefree_decomposition(f: QPoly) -> Vec<(QPoly, usize)> {
    let f = q_monic(q_trim(f));
    let df = q_derivative(&f);
    let a0 = q_gcd(f.clone(), df.clone());
    let mut b = q_divrem(&f, &a0).0;
    let mut d = q_sub(&q_divrem(&df, &a0).0, &q_derivative(&b));
    let mut out = Vec::new();
    let mut multiplicity = 1;
    while b.len() > 1 {
        let a = q_gcd(b.clone(), d.clone());
        let next_b = q_divrem(&b, &a).0;
        let c = q_divrem(&d, &a).0;
        d = q_sub(&c, &q_derivative(&next_b));
        if a.len() > 1 {
            out.push((a, multiplicity));
        }
        b = next_b;
        multiplicity += 1;
    }
    out
}

/// Simultaneous Aberth-Ehrlich iteration for a monic polynomial given with
/// descending coefficients `[1, c1, ..., cn]`.
fn aberth(coeffs: &[f64]) -> Result<Vec<Complex64>, LpolyError> {
    let n = coeffs.len() - 1;
    let bound = 1.0 + coeffs[1..].iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let radius = bound.clamp(0.5, 2.0);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / n as f64))
        .collect();
    let eval = |x: Complex64| {
        let mut v = Complex64::new(0.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        for &c in coeffs {
            d = d * x + v;
            v = v * x + c;
        }
        (v, d)
    };
    for _ in 0..500 {
        let mut max_step = 0.0f64;
        for i in 0..n {
            let (v, d) = eval(z[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / d;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let diff = z[i] - z[j];
                    if diff.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        diff.inv()
                    }
                })
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm());
            }
        }
        if max_step < 1e-15 {
            return Ok(z);
        }
    }
    if z.iter().all(|&x| eval(x).0.norm() < 1e-12) {
        Ok(z)
    } else {
        Err(LpolyError::NonConvergence)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(p: u64, s: [i128; 3]) -> PointCounts {
        let pp = i128::from(p);
        PointCounts {
            p,
            n: [0, 1, 2].map(|k| (pp.pow(k + 1) + 1 - s[k as usize]) as u64),
        }
    }

    #[test]
    fn zero_power_sums() {
        let l = LPolynomial::from_counts(&counts(7, [0, 0, 0])).unwrap();
        assert_eq!((l.a1, l.a2, l.a3), (0, 0, 0));
        assert_eq!(l.coefficients(), [1, 0, 0, 0, 0, 0, 343]);
        for z in l.evaluate_roots().unwrap() {
            assert!((z.powi(6) + Complex64::new(343.0, 0.0)).norm() < 1e-8);
            assert!((z.norm_sqr() - 7.0).abs() < 1e-9);
        }
    }

    #[test]
    fn inert_shape_from_sums() {
        let b = 4;
        let l = LPolynomial::from_counts(&counts(11, [0, -2 * b, 0])).unwrap();
        assert_eq!((l.a1, l.a2, l.a3), (0, 4, 0));
        let s = shortcut_inert([12, 121 + 1 + 8], 11).unwrap();
        assert_eq!(s, l);
    }

    #[test]
    fn shortcut_rejects_nonzero_s1() {
        assert_eq!(
            shortcut_inert([13, 122], 11),
            Err(LpolyError::S1NonZero { p: 11, s1: -1 })
        );
        assert!(matches!(
            shortcut_inert([12, 121], 11),
            Err(LpolyError::NonIntegralCoefficient { index: 2, .. })
        ));
    }

    #[test]
    fn non_integral_and_weil_errors() {
        assert!(matches!(
            LPolynomial::from_counts(&counts(11, [1, 0, 0])),
            Err(LpolyError::NonIntegralCoefficient { index: 2, .. })
        ));
        assert!(matches!(
            LPolynomial::from_counts(&counts(11, [0, 0, 2])),
            Err(LpolyError::NonIntegralCoefficient { index: 3, .. })
        ));
        assert!(matches!(
            PowerSums::from_counts(&counts(11, [20, 0, 0])),
            Err(LpolyError::WeilBound { k: 1, .. })
        ));
    }

    #[test]
    fn inert_roots_contain_plus_minus_i_sqrt_p() {
        // (1 + pT^2)(1 - tT^2 + p^2 T^4) with p = 13, t = 5: b = p - t = 8
        let l = LPolynomial::new(13, 0, 8, 0).unwrap();
        let roots = l.evaluate_roots().unwrap();
        let target = Complex64::new(0.0, 13f64.sqrt());
        assert!(roots.iter().any(|z| (z - target).norm() < 1e-8));
        assert!(roots.iter().any(|z| (z + target).norm() < 1e-8));
        assert!(l.root_magnitude_deviation().unwrap() < 1e-9);
    }

    #[test]
    fn roots_come_in_conjugate_pairs() {
        let l = LPolynomial::new(101, 3, 40, -150).unwrap();
        let roots = l.evaluate_roots().unwrap();
        for pair in roots.chunks(2) {
            assert!(pair[0].im >= 0.0);
            assert!((pair[0].conj() - pair[1]).norm() < 1e-8);
        }
    }

    fn product_of_quadratics(p: u64, t: [i128; 3]) -> LPolynomial {
        // prod (1 - t_i T + p T^2)
        let pp = i128::from(p);
        let e1: i128 = t.iter().sum();
        let e2 = t[0] * t[1] + t[0] * t[2] + t[1] * t[2];
        let e3 = t[0] * t[1] * t[2];
        LPolynomial::new(p, -e1, e2 + 3 * pp, -(e3 + 2 * pp * e1)).unwrap()
    }

    proptest::proptest! {
        #[test]
        fn weil_products_round_trip(
            p in proptest::sample::select(vec![3u64, 5, 101, 293, 7919, 65537]),
            raw in proptest::array::uniform3(-1.0f64..1.0),
        ) {
            let bound = (2.0 * (p as f64).sqrt()).floor();
            let t = raw.map(|x| (x * bound).round() as i128);
            let l = product_of_quadratics(p, t);
            let roots = l.evaluate_roots().unwrap();
            proptest::prop_assert!(l.root_magnitude_deviation().unwrap() <= 1e-6);
            // power sums of the roots recover the Newton data
            let ps = |k: i32| roots.iter().map(|z| z.powi(k)).sum::<Complex64>();
            let s1 = -l.a1 as f64;
            let s2 = s1 * s1 - 2.0 * l.a2 as f64;
            let s3 = s1 * s1 * s1 - 3.0 * s1 * l.a2 as f64 - 3.0 * l.a3 as f64;
            for (k, s) in [(1, s1), (2, s2), (3, s3)] {
                let scale = (p as f64).powf(k as f64 / 2.0) * 6.0;
                proptest::prop_assert!((ps(k).re - s).abs() <= 1e-6 * scale);
                proptest::prop_assert!(ps(k).im.abs() <= 1e-6 * scale);
            }
            let n = [1u32, 2, 3].map(|k| {
                let s = [s1, s2, s3][k as usize - 1].round() as i128;
                i128::from(p).pow(k) + 1 - s
            });
            proptest::prop_assume!(n.iter().all(|&c| c >= 0));
            let n = n.map(|c| c as u64);
            proptest::prop_assert_eq!(LPolynomial::from_counts(&PointCounts { p, n }).unwrap(), l);
        }
    }
}
