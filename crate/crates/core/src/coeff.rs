//! Exact monomial coefficients: a rational scale times a root of unity.
//!
//! A [`Coefficient`] stores `scale * exp(2*pi*i * phase_num/phase_den)`
//! with the scale a reduced `i64` rational and the phase a reduced
//! fraction in `[0, 1)`. Products and complex conjugates stay exact;
//! sums are exact only in the cases [`Coefficient::try_add`] covers and
//! are otherwise evaluated numerically via [`MonomialSum`].

use num_complex::Complex;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Exact coefficient `scale * w^phase_num` where `w = exp(2*pi*i/phase_den)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Coefficient {
    scale: Rational64,
    phase_num: i64,
    phase_den: i64,
}

impl Coefficient {
    /// Builds `num/den * exp(2*pi*i * phase_num/phase_den)` in canonical form.
    pub fn new(num: i64, den: i64, phase_num: i64, phase_den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidCoefficient(
                "scale denominator is zero".into(),
            ));
        }
        if phase_den == 0 {
            return Err(Error::InvalidCoefficient(
                "phase denominator is zero".into(),
            ));
        }
        Ok(Self::canonical(
            Rational64::new(num, den),
            phase_num,
            phase_den,
        ))
    }

    fn canonical(scale: Rational64, phase_num: i64, phase_den: i64) -> Self {
        let (phase_num, phase_den) = if phase_den < 0 {
            (-phase_num, -phase_den)
        } else {
            (phase_num, phase_den)
        };
        if scale.is_zero() {
            return Self {
                scale: Rational64::zero(),
                phase_num: 0,
                phase_den: 1,
            };
        }
        let mut t = phase_num.rem_euclid(phase_den);
        let mut p = phase_den;
        let g = t.gcd(&p);
        if g > 1 {
            t /= g;
            p /= g;
        }
        if t == 0 {
            p = 1;
        }
        Self {
            scale,
            phase_num: t,
            phase_den: p,
        }
    }

    pub fn zero() -> Self {
        Self::canonical(Rational64::zero(), 0, 1)
    }

    pub fn one() -> Self {
        Self::integer(1)
    }

    pub fn integer(n: i64) -> Self {
        Self::canonical(Rational64::from_integer(n), 0, 1)
    }

    pub fn rational(num: i64, den: i64) -> Result<Self> {
        Self::new(num, den, 0, 1)
    }

    /// `w_p^t`, the `t`-th power of the primitive `p`-th root of unity.
    pub fn root_of_unity(t: i64, p: i64) -> Result<Self> {
        Self::new(1, 1, t, p)
    }

    pub fn scale(&self) -> Rational64 {
        self.scale
    }

    pub fn phase_num(&self) -> i64 {
        self.phase_num
    }

    pub fn phase_den(&self) -> i64 {
        self.phase_den
    }

    pub fn is_zero(&self) -> bool {
        self.scale.is_zero()
    }

    /// Exact product of two monomials.
    pub fn mul(&self, other: &Self) -> Self {
        let scale = self.scale * other.scale;
        // a/b + c/d mod 1
        let num = self.phase_num * other.phase_den + other.phase_num * self.phase_den;
        let den = self.phase_den * other.phase_den;
        Self::canonical(scale, num, den)
    }

    /// Exact complex conjugate (phase negated mod 1, scale unchanged).
    pub fn conj(&self) -> Self {
        Self::canonical(self.scale, -self.phase_num, self.phase_den)
    }

    pub fn neg(&self) -> Self {
        Self::canonical(-self.scale, self.phase_num, self.phase_den)
    }

    /// Exact quotient; `None` when `other` is zero.
    pub fn div(&self, other: &Self) -> Option<Self> {
        if other.is_zero() {
            return None;
        }
        let scale = self.scale / other.scale;
        let num = self.phase_num * other.phase_den - other.phase_num * self.phase_den;
        let den = self.phase_den * other.phase_den;
        Some(Self::canonical(scale, num, den))
    }

    /// Exact sum when it is again a monomial: equal phases add scales,
    /// phases half a turn apart subtract them. Returns `None` otherwise.
    pub fn try_add(&self, other: &Self) -> Option<Self> {
        if self.is_zero() {
            return Some(*other);
        }
        if other.is_zero() {
            return Some(*self);
        }
        if self.phase_num == other.phase_num && self.phase_den == other.phase_den {
            return Some(Self::canonical(
                self.scale + other.scale,
                self.phase_num,
                self.phase_den,
            ));
        }
        // phase difference of exactly 1/2: b points opposite to a
        let diff_num = self.phase_num * other.phase_den - other.phase_num * self.phase_den;
        let diff_den = self.phase_den * other.phase_den;
        if (2 * diff_num - diff_den).rem_euclid(2 * diff_den) == 0 {
            return Some(Self::canonical(
                self.scale - other.scale,
                self.phase_num,
                self.phase_den,
            ));
        }
        None
    }

    /// Numeric value in double (or other float) precision. Quarter-turn
    /// phases are mapped exactly onto the axes.
    pub fn value<T: Real>(&self) -> Complex<T> {
        let s = T::of(*self.scale.numer() as f64) / T::of(*self.scale.denom() as f64);
        match (self.phase_num, self.phase_den) {
            (0, _) => Complex::new(s, T::zero()),
            (1, 2) => Complex::new(-s, T::zero()),
            (1, 4) => Complex::new(T::zero(), s),
            (3, 4) => Complex::new(T::zero(), -s),
            (t, p) => {
                let theta = T::two_pi() * T::of(t as f64) / T::of(p as f64);
                Complex::new(s * theta.cos(), s * theta.sin())
            }
        }
    }

    /// |scale|, exact.
    pub fn abs_scale(&self) -> Rational64 {
        self.scale.abs()
    }
}

impl std::fmt::Display for Coefficient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let root = if self.phase_num == 0 {
            String::new()
        } else if self.phase_num == 1 {
            format!("w_{}", self.phase_den)
        } else {
            format!("w_{}^{}", self.phase_den, self.phase_num)
        };
        let scale_one = self.scale == Rational64::from_integer(1);
        let scale_minus_one = self.scale == Rational64::from_integer(-1);
        match (root.is_empty(), scale_one, scale_minus_one) {
            (true, _, _) => write!(f, "{}", self.scale),
            (false, true, _) => write!(f, "{root}"),
            (false, _, true) => write!(f, "-{root}"),
            (false, false, false) => write!(f, "({})*{root}", self.scale),
        }
    }
}

/// A sum of monomials kept as a list, merged exactly where possible.
///
/// Constraint-row entries are sums of coefficient products; most collapse
/// to a single monomial, which is what the proof engine wants. The zero
/// test is numeric, per the crate-wide tolerance convention.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MonomialSum {
    terms: Vec<Coefficient>,
}

impl MonomialSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, c: Coefficient) {
        if c.is_zero() {
            return;
        }
        for (i, t) in self.terms.iter().enumerate() {
            if let Some(merged) = t.try_add(&c) {
                if merged.is_zero() {
                    self.terms.remove(i);
                } else {
                    self.terms[i] = merged;
                }
                return;
            }
        }
        self.terms.push(c);
    }

    pub fn terms(&self) -> &[Coefficient] {
        &self.terms
    }

    /// Exactly zero after merging (sufficient, not necessary; use
    /// [`MonomialSum::is_zero_within`] for the authoritative test).
    pub fn is_exactly_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The single remaining monomial, if the sum collapsed to one.
    pub fn as_single(&self) -> Option<&Coefficient> {
        match self.terms.as_slice() {
            [c] => Some(c),
            _ => None,
        }
    }

    pub fn value<T: Real>(&self) -> Complex<T> {
        self.terms
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |acc, c| {
                acc + c.value::<T>()
            })
    }

    pub fn is_zero_within(&self, tol: f64) -> bool {
        self.is_exactly_zero() || self.value::<f64>().norm() <= tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_phase_value() {
        let c = Coefficient::one();
        assert_eq!(c.value::<f64>(), Complex::new(1.0, 0.0));
    }

    #[test]
    fn third_root_value() {
        // independent evaluation of cos/sin at 2*pi/3
        let theta = 2.0 * std::f64::consts::PI / 3.0;
        let expect = Complex::new(theta.cos(), theta.sin());
        let c = Coefficient::root_of_unity(1, 3).unwrap();
        let got = c.value::<f64>();
        assert!((got - expect).norm() < 1e-15);
        assert!((got.re - (-0.5)).abs() < 1e-15);
        assert!((got.im - 0.8660254037844386).abs() < 1e-15);
    }

    #[test]
    fn negative_scale_value() {
        let c = Coefficient::integer(-1);
        assert_eq!(c.value::<f64>(), Complex::new(-1.0, 0.0));
    }

    #[test]
    fn canonical_phase_is_reduced_and_wrapped() {
        let c = Coefficient::new(2, 4, 10, 8).unwrap();
        assert_eq!(c.scale(), Rational64::new(1, 2));
        assert_eq!((c.phase_num(), c.phase_den()), (1, 4));
        let d = Coefficient::new(1, 1, -1, 3).unwrap();
        assert_eq!((d.phase_num(), d.phase_den()), (2, 3));
        let z = Coefficient::new(0, 5, 3, 7).unwrap();
        assert_eq!(z, Coefficient::zero());
    }

    #[test]
    fn zero_denominators_rejected() {
        assert!(Coefficient::new(1, 0, 0, 1).is_err());
        assert!(Coefficient::new(1, 1, 1, 0).is_err());
    }

    #[test]
    fn product_and_conjugate_are_exact() {
        let a = Coefficient::root_of_unity(1, 3).unwrap();
        let b = Coefficient::root_of_unity(2, 3).unwrap();
        assert_eq!(a.mul(&b), Coefficient::one());
        assert_eq!(a.conj(), b);
        let c = Coefficient::new(3, 2, 1, 4).unwrap();
        assert_eq!(c.mul(&c.conj()), Coefficient::rational(9, 4).unwrap());
    }

    #[test]
    fn try_add_covers_equal_and_opposite_phases() {
        let a = Coefficient::root_of_unity(1, 3).unwrap();
        assert_eq!(a.try_add(&a), Some(Coefficient::new(2, 1, 1, 3).unwrap()));
        // w_3 and w_3^{1/3 + 1/2 = 5/6}: opposite directions
        let b = Coefficient::new(1, 1, 5, 6).unwrap();
        assert_eq!(a.try_add(&b), Some(Coefficient::zero()));
        // 1 + w_3 is not a monomial
        let one = Coefficient::one();
        assert_eq!(one.try_add(&a), None);
        // -1 + 1 = 0 via the equal-phase rule (the sign lives in the scale)
        let m = Coefficient::integer(-1);
        assert_eq!(m.try_add(&one), Some(Coefficient::zero()));
        // 1 + w_2 = 0 via the half-turn rule
        let half = Coefficient::root_of_unity(1, 2).unwrap();
        assert_eq!(one.try_add(&half), Some(Coefficient::zero()));
    }

    #[test]
    fn div_is_exact() {
        let a = Coefficient::root_of_unity(1, 3).unwrap();
        let b = Coefficient::root_of_unity(2, 3).unwrap();
        let q = b.div(&a).unwrap();
        assert_eq!(q, a);
        assert!(a.div(&Coefficient::zero()).is_none());
    }

    #[test]
    fn monomial_sum_merges_roots() {
        let mut s = MonomialSum::new();
        s.push(Coefficient::one());
        s.push(Coefficient::root_of_unity(1, 3).unwrap());
        s.push(Coefficient::root_of_unity(2, 3).unwrap());
        // 1 + w_3 + w_3^2 = 0, but only numerically detectable here
        assert_eq!(s.terms().len(), 3);
        assert!(!s.is_exactly_zero());
        assert!(s.is_zero_within(1e-12));

        let mut t = MonomialSum::new();
        t.push(Coefficient::one());
        t.push(Coefficient::integer(-1));
        assert!(t.is_exactly_zero());
    }

    #[test]
    fn display_forms() {
        assert_eq!(Coefficient::one().to_string(), "1");
        assert_eq!(Coefficient::integer(-1).to_string(), "-1");
        assert_eq!(Coefficient::rational(2, 3).unwrap().to_string(), "2/3");
        assert_eq!(
            Coefficient::root_of_unity(2, 3).unwrap().to_string(),
            "w_3^2"
        );
        assert_eq!(Coefficient::new(-1, 1, 1, 4).unwrap().to_string(), "-w_4");
    }
}
