//! Physicists' Hermite polynomials, the scaled monic family `C_k`, the
//! skew-orthogonal polynomials `p_k` built from them, and the integrated
//! functions `Phi_k`.

use crate::algebra::{factorial, rat, rational_to_f64, Poly, Rational, Var};
use crate::asymptotics::erf;
use crate::{Error, ModelParams, Result};
use num_traits::{One, ToPrimitive, Zero};

/// Physicists' Hermite polynomial `H_k` via `H_{k+1} = 2x H_k - 2k H_{k-1}`.
pub fn hermite(k: usize) -> Poly {
    let x = Poly::monomial(Var::X, rat(1), 1);
    let mut prev = Poly::one(Var::X);
    if k == 0 {
        return prev;
    }
    let mut cur = x.scale(&rat(2));
    for m in 1..k {
        let next = x.mul(&cur).scale(&rat(2)).sub(&prev.scale(&rat(2 * m as i64)));
        prev = cur;
        cur = next;
    }
    cur
}

/// Scaled monic Hermite `C_k(x) = (tau/2)^{k/2} H_k(x / sqrt(2 tau))`,
/// built through the equivalent recurrence `C_{k+1} = x C_k - k tau C_{k-1}`.
/// At `tau = 0` this degenerates to the monomial `x^k`.
pub fn scaled_hermite(k: usize, tau: &Rational) -> Poly {
    let x = Poly::monomial(Var::X, rat(1), 1);
    let mut prev = Poly::one(Var::X);
    if k == 0 {
        return prev;
    }
    let mut cur = x.clone();
    for m in 1..k {
        let next = x.mul(&cur).sub(&prev.scale(&(tau * rat(m as i64))));
        prev = cur;
        cur = next;
    }
    cur
}

/// Skew-orthogonal polynomials: `p_{2k} = C_{2k}`,
/// `p_{2k+1} = C_{2k+1} - 2k C_{2k-1}`.
pub fn skew_poly(k: usize, tau: &Rational) -> Poly {
    if k % 2 == 0 {
        scaled_hermite(k, tau)
    } else {
        let half = (k - 1) / 2;
        let lead = scaled_hermite(k, tau);
        if half == 0 {
            lead
        } else {
            lead.sub(&scaled_hermite(k - 2, tau).scale(&rat(2 * half as i64)))
        }
    }
}

/// `C_0..C_k` for one parameter set, built once and shared read-only.
#[derive(Debug, Clone)]
pub struct HermiteCache {
    params: ModelParams,
    table: Vec<Poly>,
}

impl HermiteCache {
    pub fn new(params: ModelParams, k_max: usize) -> Self {
        let tau = params.tau().clone();
        let x = Poly::monomial(Var::X, rat(1), 1);
        let mut table = Vec::with_capacity(k_max + 1);
        table.push(Poly::one(Var::X));
        if k_max >= 1 {
            table.push(x.clone());
        }
        for m in 1..k_max {
            let next = x.mul(&table[m]).sub(&table[m - 1].scale(&(&tau * rat(m as i64))));
            table.push(next);
        }
        Self { params, table }
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn get(&self, k: usize) -> &Poly {
        &self.table[k]
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

/// `C_k(0)` in closed form: zero for odd `k`, `(-tau)^m (2m-1)!!` for `k = 2m`.
pub fn scaled_hermite_at_zero(k: usize, tau: &Rational) -> Rational {
    if k % 2 == 1 {
        return Rational::zero();
    }
    let m = k / 2;
    let mut acc = Rational::one();
    for j in 0..m {
        acc *= -tau * rat(2 * j as i64 + 1);
    }
    acc
}

/// Overflow-safe weighted iterates
/// `w_k = C_k(x) e^{-x^2 / (2(1+tau))} / sqrt(k!)` for `k = 0..=k_max`.
///
/// The exponential rides inside the three-term recurrence
/// `w_{k+1} = (x w_k - tau sqrt(k) w_{k-1}) / sqrt(k+1)`, so individual
/// iterates stay bounded even for matrix sizes in the hundreds.
pub fn weighted_scaled(params: &ModelParams, k_max: usize, x: f64) -> Vec<f64> {
    let tau = params.tau_f64();
    let s = 1.0 + tau;
    let mut out = Vec::with_capacity(k_max + 1);
    let w0 = (-x * x / (2.0 * s)).exp();
    out.push(w0);
    if k_max == 0 {
        return out;
    }
    out.push(x * w0);
    for k in 1..k_max {
        let next = (x * out[k] - tau * (k as f64).sqrt() * out[k - 1]) / ((k + 1) as f64).sqrt();
        out.push(next);
    }
    out
}

/// Antiderivative helper `int_0^x u^m e^{-u^2/(2s)} du` for `m = 0..=m_max`.
///
/// `I_0` reduces to an erf evaluation, `I_1` is elementary, and higher
/// indices follow from `I_m = -s x^{m-1} e^{-x^2/(2s)} + s (m-1) I_{m-2}`.
pub(crate) fn gaussian_antiderivatives(m_max: usize, s: f64, x: f64) -> Vec<f64> {
    let e = (-x * x / (2.0 * s)).exp();
    let mut out = Vec::with_capacity(m_max + 1);
    out.push((std::f64::consts::PI * s / 2.0).sqrt() * erf(x / (2.0 * s).sqrt()));
    if m_max >= 1 {
        out.push(s * (1.0 - e));
    }
    for m in 2..=m_max {
        let v = -s * x.powi(m as i32 - 1) * e + s * (m as f64 - 1.0) * out[m - 2];
        out.push(v);
    }
    out
}

/// `Phi_k(x) = int sgn(x - y) p_k(y) e^{-y^2/(2(1+tau))} dy`, reduced to a
/// single erf plus Gaussian-weighted polynomial terms.
pub fn phi(k: usize, params: &ModelParams, x: f64, tol: f64) -> Result<f64> {
    if tol <= 0.0 {
        return Err(Error::InvalidParam(format!("phi tolerance must be positive, got {tol}")));
    }
    let s = 1.0 + params.tau_f64();
    let pk = skew_poly(k, params.tau());
    let deg = pk.degree().unwrap_or(0);
    let anti = gaussian_antiderivatives(deg, s, x);
    let coeffs: Vec<f64> = pk.coeffs().iter().map(rational_to_f64).collect();
    let f: f64 = coeffs.iter().zip(&anti).map(|(c, i)| c * i).sum();
    // sgn-weighted total mass: zero for even k by parity, a plain Gaussian
    // half-line moment otherwise.
    let mut sgn_mass = 0.0;
    if k % 2 == 1 {
        for (m, c) in coeffs.iter().enumerate() {
            if m % 2 == 1 && *c != 0.0 {
                let j = (m - 1) / 2;
                let half_moment = s * (2.0 * s).powi(j as i32) * factorial(j).to_f64().unwrap();
                sgn_mass += 2.0 * c * half_moment;
            }
        }
    }
    Ok(2.0 * f - sgn_mass)
}
