//! Pointwise evaluation of the finite-N real-eigenvalue density
//! `R_N = R_N^{(1)} + R_N^{(2)}`, the Pfaffian-sum cross-representation, and
//! the tau = 0 / tau = 1 closed forms used as test oracles.

use crate::algebra::{factorial, rat, rational_to_f64, Poly, Rational};
use crate::asymptotics::erf;
use crate::hermite::{phi, scaled_hermite_at_zero, skew_poly, weighted_scaled};
use crate::ModelParams;
use num_traits::ToPrimitive;
use std::f64::consts::PI;

/// Evaluator for one parameter set; immutable after construction.
#[derive(Debug, Clone)]
pub struct DensityInstance {
    params: ModelParams,
    /// `C_k(0) / sqrt(k!)` for `k = 0..=N-2`, feeding the inner-integral
    /// recurrence of the correction term.
    c0_normalized: Vec<f64>,
    /// Skew-orthogonal polynomials `p_0..p_{N-1}` for the Pfaffian sum.
    skew: Vec<Poly>,
}

impl DensityInstance {
    pub fn new(params: ModelParams) -> Self {
        let n = params.n();
        let c0_normalized = (0..=n - 2)
            .map(|k| {
                rational_to_f64(&scaled_hermite_at_zero(k, params.tau()))
                    / factorial(k).to_f64().unwrap().sqrt()
            })
            .collect();
        let skew = (0..n).map(|k| skew_poly(k, params.tau())).collect();
        Self { params, c0_normalized, skew }
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Elliptic-GinUE component
    /// `R_N^{(1)}(x) = e^{-x^2/(1+tau)}/sqrt(2 pi) sum_{k<=N-2} C_k(x)^2/k!`,
    /// evaluated through the overflow-safe weighted recurrence.
    pub fn r1(&self, x: f64) -> f64 {
        let w = weighted_scaled(&self.params, self.params.n() - 2, x);
        w.iter().map(|wk| wk * wk).sum::<f64>() / (2.0 * PI).sqrt()
    }

    /// Correction component
    /// `R_N^{(2)}(x) = [1/((1+tau)(N-2)!)] e^{-x^2/(2s)}/sqrt(2 pi)
    ///  C_{N-1}(x) E(x)` with `E(x) = int_0^x e^{-u^2/(2s)} C_{N-2}(u) du`.
    ///
    /// The inner integral never sees a quadrature: with `s - tau = 1` the
    /// identity `E_{k+1} = s [C_k(0) - C_k(x) e^{-x^2/(2s)}] + k E_{k-1}`
    /// reduces it to the `E_0` erf term, and carrying `1/sqrt(k!)` through
    /// both ladders keeps every iterate bounded for large N.
    pub fn r2(&self, x: f64) -> f64 {
        let n = self.params.n();
        let s = 1.0 + self.params.tau_f64();
        let w = weighted_scaled(&self.params, n - 1, x);
        // normalized inner integrals ehat_k = E_k(x) / sqrt(k!)
        let e0 = (PI * s / 2.0).sqrt() * erf(x / (2.0 * s).sqrt());
        let mut ehat_prev = e0;
        if n == 2 {
            return (n as f64 - 1.0).sqrt() / (s * (2.0 * PI).sqrt()) * w[n - 1] * ehat_prev;
        }
        let mut ehat_cur = s * (1.0 - (-x * x / (2.0 * s)).exp()); // E_1
        for k in 1..n - 2 {
            let kf = k as f64;
            let next = s * (self.c0_normalized[k] - w[k]) / (kf + 1.0).sqrt()
                + (kf / (kf + 1.0)).sqrt() * ehat_prev;
            ehat_prev = ehat_cur;
            ehat_cur = next;
        }
        (n as f64 - 1.0).sqrt() / (s * (2.0 * PI).sqrt()) * w[n - 1] * ehat_cur
    }

    pub fn total(&self, x: f64) -> f64 {
        self.r1(x) + self.r2(x)
    }

    /// Pfaffian-sum representation
    /// `e^{-x^2/(2s)} / (2 sqrt(2 pi) s) sum_{k<N/2}
    ///  [Phi_{2k} p_{2k+1} - Phi_{2k+1} p_{2k}] / (2k)!`.
    pub fn pfaffian(&self, x: f64) -> f64 {
        let s = 1.0 + self.params.tau_f64();
        let mut sum = 0.0;
        for k in 0..self.params.n() / 2 {
            let phi_even = phi(2 * k, &self.params, x, 1e-14).expect("positive tol");
            let phi_odd = phi(2 * k + 1, &self.params, x, 1e-14).expect("positive tol");
            let p_even = self.skew[2 * k].eval_f64(x);
            let p_odd = self.skew[2 * k + 1].eval_f64(x);
            sum += (phi_even * p_odd - phi_odd * p_even) / factorial(2 * k).to_f64().unwrap();
        }
        (-x * x / (2.0 * s)).exp() / (2.0 * (2.0 * PI).sqrt() * s) * sum
    }
}

// ---------------------------------------------------------------------------
// Incomplete gamma functions (series / continued fraction split) and the
// closed-form reference densities built on them.
// ---------------------------------------------------------------------------

/// `ln Gamma(x)` for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        // reflection
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = COEF[0];
    let t = x + 7.5;
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Regularized lower incomplete gamma `P(a, z)`; series for `z < a + 1`,
/// continued fraction for the complement above.
pub fn gamma_p(a: f64, z: f64) -> f64 {
    assert!(a > 0.0 && z >= 0.0);
    if z == 0.0 {
        return 0.0;
    }
    if z < a + 1.0 {
        lower_series(a, z)
    } else {
        1.0 - upper_cf(a, z)
    }
}

/// Regularized upper incomplete gamma `Q(a, z) = 1 - P(a, z)`.
pub fn gamma_q(a: f64, z: f64) -> f64 {
    assert!(a > 0.0 && z >= 0.0);
    if z == 0.0 {
        return 1.0;
    }
    if z < a + 1.0 {
        1.0 - lower_series(a, z)
    } else {
        upper_cf(a, z)
    }
}

fn lower_series(a: f64, z: f64) -> f64 {
    let mut term = 1.0 / a;
    let mut sum = term;
    for k in 1..500 {
        term *= z / (a + k as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum * (a * z.ln() - z - ln_gamma(a)).exp()
}

fn upper_cf(a: f64, z: f64) -> f64 {
    // Lentz on Q(a,z) = e^{-z} z^a / Gamma(a) * 1/(z+1-a- 1(1-a)/(z+3-a- ...))
    let tiny = 1e-300;
    let mut b = z + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (a * z.ln() - z - ln_gamma(a)).exp() * h
}

/// Reference `R_N^{(1)}` at `tau = 0`: `Q(N-1, x^2) / sqrt(2 pi)` via the
/// regularized upper incomplete gamma.
pub fn ref_r1_ginoe(n: usize, x: f64) -> f64 {
    gamma_q(n as f64 - 1.0, x * x) / (2.0 * PI).sqrt()
}

/// Reference `R_N^{(2)}` at `tau = 0`:
/// `2^{(N-3)/2}/(N-2)! e^{-x^2/2}/sqrt(2 pi) |x|^{N-1} gamma((N-1)/2, x^2/2)`.
pub fn ref_r2_ginoe(n: usize, x: f64) -> f64 {
    let a = (n as f64 - 1.0) / 2.0;
    let lower = gamma_p(a, x * x / 2.0) * ln_gamma(a).exp();
    2f64.powf((n as f64 - 3.0) / 2.0) / factorial(n - 2).to_f64().unwrap()
        * (-x * x / 2.0).exp()
        / (2.0 * PI).sqrt()
        * x.abs().powi(n as i32 - 1)
        * lower
}

/// Reference GOE density at `tau = 1`, evaluated through the raw Hermite
/// formula (independent of the weighted recurrences in the main path).
pub fn ref_goe_density(n: usize, x: f64) -> f64 {
    let y = x / 2f64.sqrt();
    let mut sum = 0.0;
    let mut h_prev = 1.0;
    let mut h_cur = 2.0 * y;
    let mut pow2_fact = 1.0; // 2^k k!
    for k in 0..=n - 2 {
        let hk = if k == 0 { h_prev } else { h_cur };
        sum += hk * hk / pow2_fact;
        pow2_fact *= 2.0 * (k as f64 + 1.0);
        if k >= 1 {
            let next = 2.0 * y * h_cur - 2.0 * k as f64 * h_prev;
            h_prev = h_cur;
            h_cur = next;
        }
    }
    let first = (-x * x / 2.0).exp() / (2.0 * PI).sqrt() * sum;
    // correction term via the antiderivative ladder on H_{N-2}(u/sqrt2)
    let hn1 = hermite_f64(n - 1, y);
    let hn2_poly: Vec<f64> = {
        let p = crate::hermite::hermite(n - 2);
        (0..=n - 2)
            .map(|j| rational_to_f64(&p.coeff(j)) / 2f64.powf(j as f64 / 2.0))
            .collect()
    };
    let anti = crate::hermite::gaussian_antiderivatives(n - 2, 2.0, x);
    let inner: f64 = hn2_poly.iter().zip(&anti).map(|(c, i)| c * i).sum();
    let second = 1.0 / 2f64.powf(n as f64 - 0.5) / factorial(n - 2).to_f64().unwrap()
        * (-x * x / 4.0).exp()
        / (2.0 * PI).sqrt()
        * hn1
        * inner;
    first + second
}

fn hermite_f64(k: usize, y: f64) -> f64 {
    let mut prev = 1.0;
    if k == 0 {
        return prev;
    }
    let mut cur = 2.0 * y;
    for m in 1..k {
        let next = 2.0 * y * cur - 2.0 * m as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Exact rescaled tau = 0 density `R_N(sqrt(N) x)` closed form.
pub fn ref_rescaled_ginoe(n: usize, x: f64) -> f64 {
    let sx = (n as f64).sqrt() * x;
    ref_r1_ginoe(n, sx) + ref_r2_ginoe(n, sx)
}

/// Pointwise check grid for the representation equality; spans
/// `[-3 sqrt(N(1+tau)), 3 sqrt(N(1+tau))]` with 41 points.
pub fn density_grid(params: &ModelParams) -> Vec<f64> {
    let l = 3.0 * (params.n() as f64 * (1.0 + params.tau_f64())).sqrt();
    (0..41).map(|i| -l + 2.0 * l * i as f64 / 40.0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat_pq;
    use crate::quad::adaptive_integrate;

    #[test]
    fn r1_basic_values() {
        // N = 2: only the k = 0 term survives, so R^{(1)}(0) = 1/sqrt(2 pi)
        for tau in [rat(0), rat_pq(1, 2), rat(1)] {
            let inst = DensityInstance::new(ModelParams::new(2, tau).unwrap());
            assert!((inst.r1(0.0) - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-15);
        }
        // evenness
        let inst = DensityInstance::new(ModelParams::new(6, rat_pq(1, 4)).unwrap());
        for &x in &[0.3, 1.7, 2.9] {
            assert!((inst.r1(x) - inst.r1(-x)).abs() < 1e-15);
            assert!((inst.r2(x) - inst.r2(-x)).abs() < 1e-14);
        }
    }

    #[test]
    fn r2_vanishes_at_origin() {
        for (n, tau) in [(2usize, rat(0)), (4, rat_pq(1, 2)), (6, rat(1))] {
            let inst = DensityInstance::new(ModelParams::new(n, tau).unwrap());
            assert_eq!(inst.r2(0.0), 0.0);
        }
    }

    #[test]
    fn ginoe_closed_forms_match_general_path() {
        for n in [2usize, 4, 6] {
            let inst = DensityInstance::new(ModelParams::new(n, rat(0)).unwrap());
            for &x in &[0.0, 0.5, 1.0, 1.9, -2.4] {
                let r1 = inst.r1(x);
                let r2 = inst.r2(x);
                assert!((r1 - ref_r1_ginoe(n, x)).abs() < 1e-12, "r1 N={n} x={x}");
                assert!((r2 - ref_r2_ginoe(n, x)).abs() < 1e-12, "r2 N={n} x={x}");
            }
        }
    }

    #[test]
    fn r2_tau0_n2_quadrature_oracle() {
        // tau=0, N=2, x=1: (1/sqrt(2pi)) e^{-1/2} int_0^1 e^{-u^2/2} du
        let inst = DensityInstance::new(ModelParams::new(2, rat(0)).unwrap());
        let inner = adaptive_integrate(&|u: f64| (-u * u / 2.0).exp(), 0.0, 1.0, 1e-13).unwrap();
        let want = (1.0 / (2.0 * PI).sqrt()) * (-0.5f64).exp() * inner;
        assert!((inst.r2(1.0) - want).abs() < 1e-13);
    }

    #[test]
    fn goe_closed_form_matches_general_path() {
        for n in [2usize, 4, 6] {
            let inst = DensityInstance::new(ModelParams::new(n, rat(1)).unwrap());
            for &x in &[0.0, 0.7, 1.5, -2.2] {
                let got = inst.total(x);
                let want = ref_goe_density(n, x);
                assert!((got - want).abs() < 1e-12, "N={n} x={x}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn rescaled_ginoe_closed_form() {
        let n = 6;
        let inst = DensityInstance::new(ModelParams::new(n, rat(0)).unwrap());
        for &x in &[0.2, 0.8, 1.1] {
            let sx = (n as f64).sqrt() * x;
            assert!((inst.total(sx) - ref_rescaled_ginoe(n, x)).abs() < 1e-12);
        }
    }

    #[test]
    fn density_nonnegative_on_grid() {
        for (n, tau) in [(4usize, rat_pq(3, 4)), (8, rat_pq(1, 4))] {
            let params = ModelParams::new(n, tau).unwrap();
            let inst = DensityInstance::new(params.clone());
            for x in density_grid(&params) {
                assert!(inst.total(x) >= -1e-13, "N={n} x={x}");
            }
        }
    }

    #[test]
    fn pfaffian_matches_lemma_representation() {
        for (n, tau) in [
            (2usize, rat(0)),
            (2, rat_pq(1, 2)),
            (4, rat_pq(1, 2)),
            (4, rat(1)),
            (6, rat(0)),
            (6, rat_pq(1, 2)),
            (6, rat(1)),
        ] {
            let inst = DensityInstance::new(ModelParams::new(n, tau.clone()).unwrap());
            for &x in &[0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0] {
                let a = inst.pfaffian(x);
                let b = inst.total(x);
                assert!(
                    (a - b).abs() <= 1e-10 * (1.0 + b.abs()),
                    "N={n} tau={tau} x={x}: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn pfaffian_n2_hand_assembled() {
        // N = 2 single summand: [Phi_0 p_1 - Phi_1 p_0] / 0!
        let params = ModelParams::new(2, rat_pq(1, 2)).unwrap();
        let inst = DensityInstance::new(params.clone());
        let x = 0.8;
        let s = 1.5;
        let term = phi(0, &params, x, 1e-13).unwrap() * x - phi(1, &params, x, 1e-13).unwrap();
        let want = (-x * x / (2.0 * s)).exp() / (2.0 * (2.0 * PI).sqrt() * s) * term;
        assert!((inst.pfaffian(x) - want).abs() < 1e-14);
    }

    #[test]
    fn incomplete_gamma_reference_values() {
        // P(1, z) = 1 - e^{-z}
        for &z in &[0.1, 1.0, 3.0, 10.0] {
            assert!((gamma_p(1.0, z) - (1.0 - (-z).exp())).abs() < 1e-14);
        }
        // P(1/2, z) = erf(sqrt z)
        for &z in &[0.2, 1.0, 4.0] {
            assert!((gamma_p(0.5, z) - erf(z.sqrt())).abs() < 1e-13);
        }
        // Q(3, 1) = e^{-1}(1 + 1 + 1/2) relates to the tau=0 r1 closed form
        let q = gamma_q(3.0, 1.0);
        let want = (-1f64).exp() * (1.0 + 1.0 + 0.5);
        assert!((q - want).abs() < 1e-14);
    }

    #[test]
    fn ln_gamma_reference() {
        assert!((ln_gamma(1.0)).abs() < 1e-13);
        assert!((ln_gamma(0.5) - (PI.sqrt()).ln()).abs() < 1e-13);
        assert!((ln_gamma(10.0) - factorial(9).to_f64().unwrap().ln()).abs() < 1e-12);
    }
}
