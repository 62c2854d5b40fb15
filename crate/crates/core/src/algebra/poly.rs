//! Dense univariate polynomials with exact rational coefficients.

use super::{rational_to_f64, Rational, SurdValue};
use crate::{Error, Result};
use num_traits::{One, Zero};

/// Variable tag; polynomials over different variables do not mix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    /// MGF argument.
    T,
    /// Spectral variable (Hermite polynomials).
    X,
    /// Symbolic matrix size (GUE/GOE moment polynomials).
    N,
}

impl std::fmt::Display for Var {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Var::T => "t",
            Var::X => "x",
            Var::N => "N",
        })
    }
}

/// Polynomial stored densely by degree; trailing zeros stripped, so the zero
/// polynomial has an empty coefficient vector and `degree()` is `None`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<Rational>,
    var: Var,
}

impl Poly {
    pub fn new(var: Var, coeffs: Vec<Rational>) -> Self {
        let mut p = Self { coeffs, var };
        p.trim();
        p
    }

    pub fn zero(var: Var) -> Self {
        Self { coeffs: Vec::new(), var }
    }

    pub fn constant(var: Var, c: Rational) -> Self {
        Self::new(var, vec![c])
    }

    pub fn one(var: Var) -> Self {
        Self::constant(var, Rational::one())
    }

    /// `c * v^k`.
    pub fn monomial(var: Var, c: Rational, k: usize) -> Self {
        if c.is_zero() {
            return Self::zero(var);
        }
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = c;
        Self { coeffs, var }
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Lowest degree with a nonzero coefficient, `None` for zero.
    pub fn min_degree(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Coefficient of `v^k` (zero beyond the stored degree).
    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    fn assert_var(&self, other: &Self) {
        assert_eq!(self.var, other.var, "mixed polynomial variables");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_var(other);
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + other.coeff(k)).collect();
        Self::new(self.var, coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| -c).collect(), var: self.var }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.assert_var(other);
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.var);
        }
        let mut coeffs = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self::new(self.var, coeffs)
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Self::new(self.var, self.coeffs.iter().map(|c| c * q).collect())
    }

    /// Multiply by `v^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![Rational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs, var: self.var }
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * Rational::from_integer(k.into()))
            .collect();
        Self::new(self.var, coeffs)
    }

    /// Exact division by `v^k`; errors unless the low-order `k` coefficients
    /// vanish identically.
    pub fn div_monomial(&self, k: usize) -> Result<Self> {
        if self.is_zero() {
            return Ok(self.clone());
        }
        if self.coeffs.len() < k || self.coeffs[..k].iter().any(|c| !c.is_zero()) {
            return Err(Error::InexactDivision { power: k });
        }
        Ok(Self::new(self.var, self.coeffs[k..].to_vec()))
    }

    pub fn eval(&self, v: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * v + c;
        }
        acc
    }

    pub fn eval_f64(&self, v: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * v + rational_to_f64(c);
        }
        acc
    }

    /// Exact evaluation at a surd point: even and odd parts split so each
    /// accumulates over a single radicand.
    pub fn eval_surd(&self, v: &SurdValue) -> Result<SurdValue> {
        // v^2 is rational; v^(2k+1) = (v^2)^k * v.
        let v2 = v.mul(v);
        debug_assert!(v2.radicand().is_one());
        let v2 = v2.coeff().clone();
        let mut even = Rational::zero();
        let mut odd = Rational::zero();
        let mut pow = Rational::one();
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 && k % 2 == 0 {
                pow *= &v2;
            }
            if k % 2 == 0 {
                even += c * &pow;
            } else {
                odd += c * &pow;
            }
        }
        SurdValue::from_rational(even).add(&v.scale(&odd))
    }

    /// True when every nonzero coefficient sits at a degree of the given
    /// parity (`0` even, `1` odd). The zero polynomial passes either.
    pub fn has_parity(&self, parity: usize) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(k, c)| c.is_zero() || k % 2 == parity % 2)
    }
}

impl std::fmt::Display for Poly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*{}", self.var)?,
                _ => write!(f, "({c})*{}^{k}", self.var)?,
            }
        }
        Ok(())
    }
}
