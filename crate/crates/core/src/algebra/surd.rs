//! Exact scalars of the form `coeff * sqrt(radicand)`.

use super::{extract_square, rational_str, rational_to_f64, Rational};
use crate::{Error, Result};
use num_traits::{One, Signed, Zero};

/// The value `coeff * sqrt(radicand)` with `radicand >= 0`.
///
/// Normal form: square factors of the radicand's numerator and denominator
/// are pulled into the coefficient, so both are square-free. The zero value
/// is canonically `(0, 1)`, which makes exact equality a plain structural
/// comparison. Every even moment of the elliptic GinOE with rational `tau`
/// lives in this form with one radicand shared across the whole table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurdValue {
    coeff: Rational,
    radicand: Rational,
}

impl SurdValue {
    pub fn new(coeff: Rational, radicand: Rational) -> Result<Self> {
        if radicand.is_negative() {
            return Err(Error::InvalidParam(format!("negative radicand {radicand}")));
        }
        Ok(Self { coeff, radicand }.normalize())
    }

    pub fn zero() -> Self {
        Self { coeff: Rational::zero(), radicand: Rational::one() }
    }

    pub fn from_rational(q: Rational) -> Self {
        Self { coeff: q, radicand: Rational::one() }
    }

    pub fn coeff(&self) -> &Rational {
        &self.coeff
    }

    pub fn radicand(&self) -> &Rational {
        &self.radicand
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    fn normalize(self) -> Self {
        if self.coeff.is_zero() || self.radicand.is_zero() {
            return Self::zero();
        }
        let (sn, fn_) = extract_square(self.radicand.numer());
        let (sd, fd) = extract_square(self.radicand.denom());
        Self {
            coeff: self.coeff * Rational::new(sn, sd),
            radicand: Rational::new(fn_, fd),
        }
    }

    /// Addition, defined only when both operands carry the same radicand
    /// (zero is compatible with anything).
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.radicand != other.radicand {
            return Err(Error::RadicandMismatch(
                rational_str(&self.radicand),
                rational_str(&other.radicand),
            ));
        }
        Ok(Self { coeff: &self.coeff + &other.coeff, radicand: self.radicand.clone() }.normalize())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self { coeff: -&self.coeff, radicand: self.radicand.clone() }
    }

    /// Exact product; radicands merge and re-normalize.
    pub fn mul(&self, other: &Self) -> Self {
        Self {
            coeff: &self.coeff * &other.coeff,
            radicand: &self.radicand * &other.radicand,
        }
        .normalize()
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Self { coeff: &self.coeff * q, radicand: self.radicand.clone() }.normalize()
    }

    pub fn div_rational(&self, q: &Rational) -> Result<Self> {
        if q.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self { coeff: &self.coeff / q, radicand: self.radicand.clone() }.normalize())
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.coeff) * rational_to_f64(&self.radicand).sqrt()
    }
}

impl std::fmt::Display for SurdValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.radicand.is_one() {
            write!(f, "{}", self.coeff)
        } else {
            write!(f, "{}*sqrt({})", self.coeff, self.radicand)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, rat_pq};

    #[test]
    fn normalization_extracts_squares() {
        // 2*sqrt(3/4) = sqrt(3)
        let v = SurdValue::new(rat(2), rat_pq(3, 4)).unwrap();
        assert_eq!(v.coeff(), &rat(1));
        assert_eq!(v.radicand(), &rat(3));
        // sqrt(72/25) = (6/5) sqrt(2)
        let v = SurdValue::new(rat(1), rat_pq(72, 25)).unwrap();
        assert_eq!(v.coeff(), &rat_pq(6, 5));
        assert_eq!(v.radicand(), &rat(2));
        // radicand 1/2 is already square-free on both sides
        let v = SurdValue::new(rat(3), rat_pq(1, 2)).unwrap();
        assert_eq!(v.radicand(), &rat_pq(1, 2));
    }

    #[test]
    fn zero_is_canonical_and_compatible() {
        let z = SurdValue::new(rat(0), rat(7)).unwrap();
        assert_eq!(z, SurdValue::zero());
        let v = SurdValue::new(rat(2), rat(3)).unwrap();
        assert_eq!(z.add(&v).unwrap(), v);
        assert_eq!(v.sub(&v).unwrap(), SurdValue::zero());
    }

    #[test]
    fn mismatched_radicands_rejected() {
        let a = SurdValue::new(rat(1), rat(2)).unwrap();
        let b = SurdValue::new(rat(1), rat(3)).unwrap();
        assert!(a.add(&b).is_err());
    }

    #[test]
    fn product_merges_radicands() {
        let a = SurdValue::new(rat(2), rat(2)).unwrap();
        let b = SurdValue::new(rat(3), rat(8)).unwrap();
        // 2 sqrt2 * 3 sqrt8 = 6 sqrt16 = 24
        let p = a.mul(&b);
        assert_eq!(p, SurdValue::from_rational(rat(24)));
    }

    #[test]
    fn float_value_matches() {
        let v = SurdValue::new(rat_pq(9, 4), rat(3)).unwrap();
        assert!((v.to_f64() - 2.25 * 3f64.sqrt()).abs() < 1e-14);
    }
}
