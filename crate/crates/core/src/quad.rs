//! Adaptive Gauss-Legendre quadrature with an a-posteriori error estimate.

use crate::{Error, Result};

/// Fixed-degree Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes and weights by Newton iteration on the Legendre recurrence.
    pub fn new(degree: usize) -> Self {
        assert!(degree >= 2);
        let n = degree;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

const PANEL_DEGREE: usize = 15;
const MAX_DEPTH: usize = 30;

/// Adaptive bisection: a panel is accepted when its one-panel value and its
/// two-half value agree within the local error budget; the difference serves
/// as the error estimate.
pub fn adaptive_integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let rule = GaussLegendre::new(PANEL_DEGREE);
    let whole = rule.integrate(a, b, f);
    let mut total_err = 0.0;
    let value = adapt(f, &rule, a, b, whole, tol, MAX_DEPTH, &mut total_err);
    if total_err > tol {
        return Err(Error::QuadratureNoConvergence { tol, achieved: total_err });
    }
    Ok(value)
}

fn adapt<F: Fn(f64) -> f64>(
    f: &F,
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: usize,
    err_out: &mut f64,
) -> f64 {
    let mid = 0.5 * (a + b);
    let left = rule.integrate(a, mid, f);
    let right = rule.integrate(mid, b, f);
    let refined = left + right;
    let err = (refined - whole).abs();
    if err <= tol || depth == 0 {
        *err_out += err;
        return refined;
    }
    adapt(f, rule, a, mid, left, tol / 2.0, depth - 1, err_out)
        + adapt(f, rule, mid, b, right, tol / 2.0, depth - 1, err_out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exactness() {
        // degree-15 rule integrates degree <= 29 exactly
        let rule = GaussLegendre::new(15);
        let val = rule.integrate(0.0, 1.0, |x| x.powi(29));
        assert!((val - 1.0 / 30.0).abs() < 1e-15);
    }

    #[test]
    fn gaussian_integral() {
        let v = adaptive_integrate(&|x: f64| (-x * x).exp(), -12.0, 12.0, 1e-12).unwrap();
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_integral() {
        let v = adaptive_integrate(&|x: f64| (20.0 * x).cos(), 0.0, 1.0, 1e-11).unwrap();
        assert!((v - 20f64.sin() / 20.0).abs() < 1e-11);
    }
}
