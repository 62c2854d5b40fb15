//! Exact arithmetic foundation: arbitrary-precision rationals, surd-valued
//! scalars, univariate polynomials and small combinatorial primitives.

mod poly;
mod surd;

pub use poly::{Poly, Var};
pub use surd::SurdValue;

use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational, always in lowest terms with positive
/// denominator (guaranteed by the backing implementation).
pub type Rational = num_rational::BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat_pq(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().expect("rational out of f64 range")
}

/// Serialize as a `p/q` string (denominator always printed).
pub fn rational_str(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parse `p/q`, a bare integer, or a plain decimal such as `0.25` into the
/// exact rational it denotes.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = |m: &str| Error::InvalidParam(format!("cannot parse rational {s:?}: {m}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad("bad numerator"))?;
        let q: BigInt = q.trim().parse().map_err(|_| bad("bad denominator"))?;
        if q.is_zero() {
            return Err(Error::DivisionByZero);
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let int_part: BigInt = if int.is_empty() || int == "-" {
            BigInt::zero()
        } else {
            int.parse().map_err(|_| bad("bad integer part"))?
        };
        if !frac.chars().all(|c| c.is_ascii_digit()) || frac.is_empty() {
            return Err(bad("bad fractional part"));
        }
        let digits: BigInt = frac.parse().map_err(|_| bad("bad fractional part"))?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac_rat = Rational::new(digits, scale);
        let sign = if s.starts_with('-') { -Rational::one() } else { Rational::one() };
        return Ok(Rational::from_integer(int_part) + sign * frac_rat);
    }
    let p: BigInt = s.parse().map_err(|_| bad("not an integer"))?;
    Ok(Rational::from_integer(p))
}

/// Double factorial with the empty-product convention `(-1)!! = 1`.
pub fn double_factorial(n: i64) -> Result<BigInt> {
    if n < -1 {
        return Err(Error::InvalidParam(format!("double factorial needs n >= -1, got {n}")));
    }
    let mut acc = BigInt::one();
    let mut k = n;
    while k > 0 {
        acc *= k;
        k -= 2;
    }
    Ok(acc)
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * (n - j) / (j + 1);
    }
    acc
}

/// Pochhammer symbol `(a)_n = a (a+1) ... (a+n-1)`, with `(a)_0 = 1`.
pub fn pochhammer(a: &Rational, n: usize) -> Rational {
    let mut acc = Rational::one();
    let mut term = a.clone();
    for _ in 0..n {
        acc *= &term;
        term += Rational::one();
    }
    acc
}

/// Signed-integer Pochhammer, convenient for recurrence coefficients.
pub fn pochhammer_int(a: i64, n: usize) -> BigInt {
    let mut acc = BigInt::one();
    for j in 0..n {
        acc *= a + j as i64;
    }
    acc
}

/// `p`-th Catalan number `binom(2p, p) / (p + 1)`.
pub fn catalan(p: usize) -> BigInt {
    binomial(2 * p, p) / (p as i64 + 1)
}

/// Split `n >= 0` as `s^2 * f` with `f` square-free; returns `(s, f)`.
pub(crate) fn extract_square(n: &BigInt) -> (BigInt, BigInt) {
    debug_assert!(!n.is_negative());
    if n.is_zero() {
        return (BigInt::one(), BigInt::zero());
    }
    let mut rem = n.clone();
    let mut side = BigInt::one();
    let mut free = BigInt::one();
    let mut d = BigInt::from(2u32);
    while &d * &d <= rem {
        let mut mult = 0usize;
        while (&rem % &d).is_zero() {
            rem /= &d;
            mult += 1;
        }
        if mult > 0 {
            for _ in 0..mult / 2 {
                side *= &d;
            }
            if mult % 2 == 1 {
                free *= &d;
            }
        }
        d += 1u32;
    }
    free *= rem;
    (side, free)
}
