//! Closed-form expected real-eigenvalue counts and large-N limit formulas,
//! together with the special functions they need (erf, modified Bessel I0/I1,
//! Gauss 2F1).

use crate::algebra::{catalan, factorial, pochhammer, rat, rat_pq, rational_to_f64, Rational};
use crate::{Error, ModelParams, Result};
use num_traits::{ToPrimitive, Zero};
use std::f64::consts::PI;

const MAX_SERIES_TERMS: usize = 500;

/// Error function, accurate to ~1e-15 relative.
///
/// Taylor series up to |x| <= 2, Lentz continued fraction for the
/// complementary function beyond.
pub fn erf(x: f64) -> f64 {
    if x < 0.0 {
        return -erf(-x);
    }
    if x <= 2.0 {
        // 2/sqrt(pi) * sum (-1)^n x^(2n+1) / (n! (2n+1))
        let mut term = x;
        let mut sum = x;
        let x2 = x * x;
        let mut n = 0usize;
        while term.abs() > 1e-18 * sum.abs().max(1.0) && n < 200 {
            n += 1;
            term *= -x2 / n as f64;
            sum += term / (2 * n + 1) as f64;
        }
        2.0 / PI.sqrt() * sum
    } else {
        1.0 - erfc_cf(x)
    }
}

pub fn erfc(x: f64) -> f64 {
    if x > 2.0 {
        erfc_cf(x)
    } else {
        1.0 - erf(x)
    }
}

/// Continued fraction erfc(x) = e^{-x^2}/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
fn erfc_cf(x: f64) -> f64 {
    let tiny = 1e-300;
    let mut f = x;
    let mut c = f;
    let mut d = 0.0;
    for k in 1..200 {
        let a = k as f64 / 2.0;
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-17 {
            break;
        }
    }
    (-x * x).exp() / PI.sqrt() / f
}

/// Modified Bessel function of the first kind, order 0 or 1.
///
/// Power series (all-positive terms, no cancellation) up to z = 20, scaled
/// asymptotic expansion above; the crossover keeps the asymptotic remainder
/// `~e^{-2z}` below 1e-12 relative everywhere.
pub fn bessel_i(nu: usize, z: f64) -> f64 {
    assert!(nu <= 1, "only orders 0 and 1 are implemented");
    assert!(z >= 0.0, "bessel_i needs z >= 0");
    if z <= 20.0 {
        let half = z / 2.0;
        let mut term = if nu == 0 { 1.0 } else { half };
        let mut sum = term;
        for k in 1..MAX_SERIES_TERMS {
            term *= half * half / (k as f64 * (k + nu) as f64);
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        sum
    } else {
        // I_nu(z) ~ e^z / sqrt(2 pi z) * sum_k (-1)^k a_k(nu) / z^k
        let mu = 4.0 * (nu * nu) as f64;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut prev = f64::INFINITY;
        for k in 1..30 {
            let f = mu - (2.0 * k as f64 - 1.0).powi(2);
            term *= -f / (8.0 * k as f64 * z);
            if term.abs() > prev {
                break;
            }
            prev = term.abs();
            sum += term;
        }
        z.exp() / (2.0 * PI * z).sqrt() * sum
    }
}

/// Gauss hypergeometric 2F1(a, b; c; z) for z <= 0.
///
/// Direct series for |z| < 1/2, Pfaff transformation
/// `(1-z)^{-a} 2F1(a, c-b; c; z/(z-1))` otherwise.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if z > 0.0 {
        return Err(Error::InvalidParam(format!("hyp2f1 implemented for z <= 0 only, got {z}")));
    }
    if c <= 0.0 && c == c.floor() {
        return Err(Error::InvalidParam(format!("hyp2f1 pole: c = {c} is a nonpositive integer")));
    }
    if z > -0.5 {
        gauss_series(a, b, c, z)
    } else {
        let w = z / (z - 1.0);
        Ok((1.0 - z).powf(-a) * gauss_series(a, c - b, c, w)?)
    }
}

fn gauss_series(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    for s in 0..MAX_SERIES_TERMS {
        let sf = s as f64;
        term *= (a + sf) * (b + sf) / (c + sf) * z / (sf + 1.0);
        sum += term;
        if term == 0.0 || term.abs() < 1e-17 * sum.abs() {
            return Ok(sum);
        }
    }
    Err(Error::SeriesNoConvergence { terms: MAX_SERIES_TERMS, tol: 1e-12 })
}

/// Expected number of real eigenvalues `M_0` through the 2F1 sum
/// `sqrt(2(1+tau)/(pi(1-tau))) * sum_k Gamma(2k+1/2)/(2k)! * 2F1(...)`.
///
/// `Gamma(2k+1/2) / Gamma(1/2) = (1/2)_{2k}` stays exact rational until the
/// final conversion, and the `sqrt(pi)` from `Gamma(1/2)` cancels the one in
/// the prefactor.
pub fn expected_real_count(params: &ModelParams) -> Result<f64> {
    if params.is_goe() {
        return Ok(params.n() as f64);
    }
    let tau = params.tau_f64();
    let z = -tau / (1.0 - tau);
    let mut sum = 0.0;
    for k in 0..params.n() / 2 {
        let prefac = pochhammer(&rat_pq(1, 2), 2 * k) / Rational::from_integer(factorial(2 * k));
        let f = hyp2f1(0.5, 0.5, 0.5 - 2.0 * k as f64, z)?;
        sum += rational_to_f64(&prefac) * f;
    }
    Ok((2.0 * (1.0 + tau) / (1.0 - tau)).sqrt() * sum)
}

/// Edelman-Kostlan-Shub sum `sqrt(2) sum_k (4k-1)!!/(4k)!!`, the tau = 0
/// closed form of the expected count.
pub fn expected_real_count_ginoe(n: usize) -> f64 {
    let mut sum = Rational::zero();
    for k in 0..n / 2 {
        let num = crate::algebra::double_factorial(4 * k as i64 - 1).unwrap();
        let den = crate::algebra::double_factorial(4 * k as i64).unwrap();
        sum += Rational::new(num, den);
    }
    2f64.sqrt() * rational_to_f64(&sum)
}

/// Leading strong-non-Hermiticity moment
/// `M_{2p}^s = (1/sqrt(2 pi (1-tau^2))) * 2/(2p+1) * (1+tau)^{2p+1}`.
pub fn strong_moment(tau: f64, p: usize) -> f64 {
    assert!((0.0..1.0).contains(&tau), "strong regime needs tau in [0,1)");
    1.0 / (2.0 * PI * (1.0 - tau * tau)).sqrt() * 2.0 / (2 * p + 1) as f64
        * (1.0 + tau).powi(2 * p as i32 + 1)
}

/// Weak non-Hermiticity scale: `tau = 1 - alpha^2 / N` for fixed `alpha > 0`.
#[derive(Debug, Clone, Copy)]
pub struct WeakRegimeParams {
    alpha: f64,
}

/// Below this scale the direct series loses all significance; the exact
/// Hermitian limit (Catalan numbers) is returned instead.
pub const WEAK_ALPHA_CATALAN_CUTOFF: f64 = 1e-4;

impl WeakRegimeParams {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParam(format!("alpha must be finite positive, got {alpha}")));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn tau_for(&self, n: usize) -> f64 {
        1.0 - self.alpha * self.alpha / n as f64
    }
}

/// Limiting weak-regime density profile `erf(alpha sqrt(4-x^2)/2) / (2 alpha sqrt(pi))`
/// on (-2, 2); the sqrt(N) scale factor is excluded.
pub fn weak_density(alpha: f64, x: f64) -> f64 {
    assert!(alpha > 0.0);
    if x.abs() >= 2.0 {
        return 0.0;
    }
    erf(alpha / 2.0 * (4.0 - x * x).sqrt()) / (2.0 * alpha * PI.sqrt())
}

/// Density of the semicircle law `sqrt(4-x^2)/(2 pi)` on (-2, 2), the
/// alpha -> 0 limit of [`weak_density`].
pub fn semicircle_density(x: f64) -> f64 {
    if x.abs() >= 2.0 {
        0.0
    } else {
        (4.0 - x * x).sqrt() / (2.0 * PI)
    }
}

/// Weak-regime moment
/// `M_{2p}^w = sum_n 2^{p-n} (2n-1)!! (2p-1)!! / (n! (n+p+1)!) (-alpha^2)^n`,
/// summed with compensated (Kahan) accumulation and an alternating-series
/// truncation bound.
pub fn weak_moment_series(alpha: f64, p: usize, tol: f64) -> Result<f64> {
    if tol <= 0.0 {
        return Err(Error::InvalidParam(format!("tolerance must be positive, got {tol}")));
    }
    if alpha < WEAK_ALPHA_CATALAN_CUTOFF {
        return Ok(catalan(p).to_f64().unwrap());
    }
    if alpha > 6.0 && p <= 2 {
        return weak_moment_bessel(alpha, p);
    }
    let a2 = alpha * alpha;
    let mut term = 2f64.powi(p as i32)
        * rational_to_f64(
            &(Rational::from_integer(crate::algebra::double_factorial(2 * p as i64 - 1).unwrap())
                / Rational::from_integer(factorial(p + 1))),
        );
    let mut sum = term;
    let mut comp = 0.0;
    let mut max_mag = term.abs();
    for n in 1..MAX_SERIES_TERMS {
        let nf = n as f64;
        term *= -(2.0 * nf - 1.0) * a2 / (2.0 * nf * (nf + p as f64 + 1.0));
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        max_mag = max_mag.max(term.abs());
        // once the terms decrease, the alternating remainder is bounded by
        // the first omitted term
        let decreasing = (2.0 * nf + 1.0) * a2 < 2.0 * (nf + 1.0) * (nf + p as f64 + 2.0);
        if decreasing && term.abs() < tol / 2.0 {
            let cancel_err = max_mag * 2e-16;
            if cancel_err > tol {
                return Err(Error::SeriesNoConvergence { terms: n, tol });
            }
            return Ok(sum);
        }
    }
    Err(Error::SeriesNoConvergence { terms: MAX_SERIES_TERMS, tol })
}

/// Closed Bessel form `[r_0 I_0(alpha^2/2) + r_1 I_1(alpha^2/2)] e^{-alpha^2/2}`
/// of the weak-regime moments for `p` in 0..=2.
pub fn weak_moment_bessel(alpha: f64, p: usize) -> Result<f64> {
    let a2 = alpha * alpha;
    let a4 = a2 * a2;
    let (r0, r1) = match p {
        0 => (1.0, 1.0),
        1 => (4.0 / 3.0, 4.0 * (a2 - 1.0) / (3.0 * a2)),
        2 => (8.0 * (2.0 * a4 - a2) / (5.0 * a4), 8.0 * (2.0 * a4 - 3.0 * a2 + 4.0) / (5.0 * a4)),
        _ => {
            return Err(Error::InvalidParam(format!(
                "Bessel closed form tabulated for p in 0..=2 only, got {p}"
            )))
        }
    };
    let z = a2 / 2.0;
    Ok((r0 * bessel_i(0, z) + r1 * bessel_i(1, z)) * (-z).exp())
}
