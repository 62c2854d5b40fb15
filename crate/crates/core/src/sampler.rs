//! Monte Carlo sampling of elliptic GinOE matrices, real-eigenvalue
//! extraction through an in-crate dense real Schur decomposition, and
//! empirical statistics for cross-checking the analytic formulas.

use crate::{Error, Result};
use rayon::prelude::*;

// ---------------------------------------------------------------------------
// Counter-based RNG: bitwise-reproducible regardless of worker count
// ---------------------------------------------------------------------------

/// Stateless counter generator keyed by `(seed, sample, entry)`. Three
/// rounds of splitmix-style avalanche over the combined words.
#[derive(Debug, Clone, Copy)]
pub struct CounterRng {
    seed: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    fn mix(mut z: u64) -> u64 {
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn raw(&self, sample: u64, entry: u64) -> u64 {
        let mut h = self.seed ^ 0x9e3779b97f4a7c15;
        h = Self::mix(h.wrapping_add(sample.wrapping_mul(0xd1342543de82ef95)));
        h = Self::mix(h ^ entry.wrapping_mul(0x2545f4914f6cdd1d));
        Self::mix(h.wrapping_add(0x6a09e667f3bcc909))
    }

    /// Uniform variate in the open interval (0, 1).
    pub fn uniform(&self, sample: u64, entry: u64) -> f64 {
        ((self.raw(sample, entry) >> 11) as f64 + 0.5) * (1.0 / 9007199254740992.0)
    }

    /// Standard Gaussian by inverse CDF.
    pub fn gaussian(&self, sample: u64, entry: u64) -> f64 {
        inverse_normal_cdf(self.uniform(sample, entry))
    }
}

/// Inverse standard-normal CDF (Acklam's rational approximation refined by
/// one Halley step, giving ~1e-15 absolute accuracy).
pub fn inverse_normal_cdf(p: f64) -> f64 {
    debug_assert!(p > 0.0 && p < 1.0);
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    let p_low = 0.02425;
    let x = if p < p_low {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - p_low {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    // one Halley refinement against erfc
    let e = 0.5 * crate::asymptotics::erfc(-x / std::f64::consts::SQRT_2) - p;
    let u = e * (2.0 * std::f64::consts::PI).sqrt() * (x * x / 2.0).exp();
    x - u / (1.0 + x * u / 2.0)
}

// ---------------------------------------------------------------------------
// Dense matrices
// ---------------------------------------------------------------------------

/// Row-major dense square matrix of f64.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// Columnwise orthogonality defect `max_j | ||q_j||^2 - 1 | + max off-diag dot`.
    pub fn orthogonality_defect(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for k in j..n {
                let dot: f64 = (0..n).map(|i| self[(i, j)] * self[(i, k)]).sum();
                let target = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// Entry-variance convention for the Gaussian base matrix `G`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    /// Entries N(0, 1): matches the finite-N density `R_N` directly.
    Unit,
    /// Entries N(0, 1/N): the normalization of the matrix definition.
    OverN,
}

impl std::str::FromStr for Convention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit" => Ok(Convention::Unit),
            "overN" | "overn" | "over-n" => Ok(Convention::OverN),
            _ => Err(Error::InvalidParam(format!("unknown convention {s:?}"))),
        }
    }
}

/// Draws one elliptic GinOE matrix
/// `X = sqrt((1+tau)/2) S_+ + sqrt((1-tau)/2) S_-`, `S_± = (G ± G^T)/sqrt(2)`.
/// The endpoints take the exact branches so that `tau = 0` reproduces `G`
/// bitwise and `tau = 1` is symmetric to the bit.
pub fn sample_matrix(
    n: usize,
    tau: f64,
    seed: u64,
    sample_index: u64,
    convention: Convention,
) -> DenseMatrix {
    let rng = CounterRng::new(seed);
    let sigma = match convention {
        Convention::Unit => 1.0,
        Convention::OverN => 1.0 / (n as f64).sqrt(),
    };
    let mut g = DenseMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = sigma * rng.gaussian(sample_index, (i * n + j) as u64);
        }
    }
    if tau == 0.0 {
        return g;
    }
    let mut x = DenseMatrix::zeros(n);
    if tau == 1.0 {
        // X = S_+ = (G + G^T)/sqrt(2), exactly symmetric
        for i in 0..n {
            for j in 0..n {
                x[(i, j)] = (g[(i, j)] + g[(j, i)]) / std::f64::consts::SQRT_2;
            }
        }
        return x;
    }
    let cp = ((1.0 + tau) / 2.0).sqrt() / std::f64::consts::SQRT_2;
    let cm = ((1.0 - tau) / 2.0).sqrt() / std::f64::consts::SQRT_2;
    for i in 0..n {
        for j in 0..n {
            x[(i, j)] = cp * (g[(i, j)] + g[(j, i)]) + cm * (g[(i, j)] - g[(j, i)]);
        }
    }
    x
}

// ---------------------------------------------------------------------------
// Real Schur decomposition (Hessenberg + Francis double-shift QR)
// ---------------------------------------------------------------------------

/// Result of a real Schur decomposition `X = Q T Q^T`.
#[derive(Debug, Clone)]
pub struct SchurResult {
    pub q: DenseMatrix,
    pub t: DenseMatrix,
    /// Eigenvalues of 1x1 diagonal blocks — the real spectrum, classified
    /// structurally with no imaginary-part tolerance.
    pub real_eigenvalues: Vec<f64>,
    /// `(re, im)` with `im > 0` for each 2x2 block.
    pub complex_pairs: Vec<(f64, f64)>,
}

impl SchurResult {
    /// `||Q T Q^T - X||_F / ||X||_F`.
    pub fn backward_error(&self, x: &DenseMatrix) -> f64 {
        let recon = self.q.matmul(&self.t).matmul(&self.q.transpose());
        recon.sub(x).frobenius_norm() / x.frobenius_norm()
    }
}

const MAX_SWEEPS_PER_EIGENVALUE: usize = 30;

/// Householder reduction to upper Hessenberg form, accumulating Q.
fn hessenberg(a: &mut DenseMatrix, q: &mut DenseMatrix) {
    let n = a.order();
    for k in 0..n.saturating_sub(2) {
        let mut norm = 0.0;
        for i in k + 1..n {
            norm += a[(i, k)] * a[(i, k)];
        }
        norm = norm.sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if a[(k + 1, k)] >= 0.0 { -norm } else { norm };
        let mut v = vec![0.0; n];
        v[k + 1] = a[(k + 1, k)] - alpha;
        for i in k + 2..n {
            v[i] = a[(i, k)];
        }
        let vtv: f64 = v.iter().map(|x| x * x).sum();
        if vtv == 0.0 {
            continue;
        }
        let beta = 2.0 / vtv;
        // A <- (I - beta v v^T) A
        for j in 0..n {
            let dot: f64 = (k + 1..n).map(|i| v[i] * a[(i, j)]).sum();
            let scaled = beta * dot;
            for i in k + 1..n {
                a[(i, j)] -= scaled * v[i];
            }
        }
        // A <- A (I - beta v v^T)
        for i in 0..n {
            let dot: f64 = (k + 1..n).map(|j| v[j] * a[(i, j)]).sum();
            let scaled = beta * dot;
            for j in k + 1..n {
                a[(i, j)] -= scaled * v[j];
            }
        }
        // Q <- Q (I - beta v v^T)
        for i in 0..n {
            let dot: f64 = (k + 1..n).map(|j| v[j] * q[(i, j)]).sum();
            let scaled = beta * dot;
            for j in k + 1..n {
                q[(i, j)] -= scaled * v[j];
            }
        }
    }
    // clean below the subdiagonal
    for i in 2..n {
        for j in 0..i - 1 {
            a[(i, j)] = 0.0;
        }
    }
}

/// In-place real Schur form of `x`.
pub fn real_schur(x: &DenseMatrix) -> Result<SchurResult> {
    let n = x.order();
    let mut t = x.clone();
    let mut q = DenseMatrix::identity(n);
    if n > 2 {
        hessenberg(&mut t, &mut q);
    }
    francis_qr(&mut t, &mut q)?;
    standardize_blocks(&mut t, &mut q);
    let mut real_eigenvalues = Vec::new();
    let mut complex_pairs = Vec::new();
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)] != 0.0 {
            let (a, b, c, d) = (t[(i, i)], t[(i, i + 1)], t[(i + 1, i)], t[(i + 1, i + 1)]);
            let disc = (a - d) * (a - d) + 4.0 * b * c;
            debug_assert!(disc < 0.0, "unstandardized real 2x2 block");
            complex_pairs.push(((a + d) / 2.0, (-disc).sqrt() / 2.0));
            i += 2;
        } else {
            real_eigenvalues.push(t[(i, i)]);
            i += 1;
        }
    }
    Ok(SchurResult { q, t, real_eigenvalues, complex_pairs })
}

fn francis_qr(h: &mut DenseMatrix, q: &mut DenseMatrix) -> Result<()> {
    let n = h.order();
    if n <= 1 {
        return Ok(());
    }
    let eps = f64::EPSILON;
    let mut p = n;
    let mut iter_since_deflation = 0usize;
    let mut total_budget = MAX_SWEEPS_PER_EIGENVALUE * n.max(1) * 2;
    while p > 1 {
        // deflate negligible subdiagonals
        let tol = |a: f64, b: f64| eps * (a.abs() + b.abs()).max(f64::MIN_POSITIVE);
        if h[(p - 1, p - 2)].abs() <= tol(h[(p - 2, p - 2)], h[(p - 1, p - 1)]) {
            h[(p - 1, p - 2)] = 0.0;
            p -= 1;
            iter_since_deflation = 0;
            continue;
        }
        if p == 2 {
            // terminal 2x2 block: leave for standardization
            break;
        }
        if h[(p - 2, p - 3)].abs() <= tol(h[(p - 3, p - 3)], h[(p - 2, p - 2)]) {
            h[(p - 2, p - 3)] = 0.0;
            p -= 2;
            iter_since_deflation = 0;
            continue;
        }
        iter_since_deflation += 1;
        if iter_since_deflation > MAX_SWEEPS_PER_EIGENVALUE {
            return Err(Error::IterationBudget { order: n });
        }
        if total_budget == 0 {
            return Err(Error::IterationBudget { order: n });
        }
        total_budget -= 1;

        // active block start
        let mut lo = p - 1;
        while lo > 0 {
            if h[(lo, lo - 1)].abs() <= tol(h[(lo - 1, lo - 1)], h[(lo, lo)]) {
                h[(lo, lo - 1)] = 0.0;
                break;
            }
            lo -= 1;
        }

        // double shift from the trailing 2x2 (exceptional every 10 sweeps)
        let (s, t2) = if iter_since_deflation % 10 == 0 {
            let w = h[(p - 1, p - 2)].abs() + h[(p - 2, p - 3)].abs();
            (1.5 * w, w * w)
        } else {
            let a11 = h[(p - 2, p - 2)];
            let a12 = h[(p - 2, p - 1)];
            let a21 = h[(p - 1, p - 2)];
            let a22 = h[(p - 1, p - 1)];
            (a11 + a22, a11 * a22 - a12 * a21)
        };

        // first column of (H - s1)(H - s2)
        let h00 = h[(lo, lo)];
        let h10 = h[(lo + 1, lo)];
        let h01 = h[(lo, lo + 1)];
        let h11 = h[(lo + 1, lo + 1)];
        let mut bx = h00 * h00 + h01 * h10 - s * h00 + t2;
        let mut by = h10 * (h00 + h11 - s);
        let mut bz = if lo + 2 < p { h10 * h[(lo + 2, lo + 1)] } else { 0.0 };

        for k in lo..p - 1 {
            let use3 = k + 2 < p;
            let (v1, v2, beta) = householder_small(bx, by, if use3 { bz } else { 0.0 });
            let col_start = k.saturating_sub(1).max(lo);
            // left
            for j in col_start..n {
                let mut dot = h[(k, j)] + v1 * h[(k + 1, j)];
                if use3 {
                    dot += v2 * h[(k + 2, j)];
                }
                dot *= beta;
                h[(k, j)] -= dot;
                h[(k + 1, j)] -= dot * v1;
                if use3 {
                    h[(k + 2, j)] -= dot * v2;
                }
            }
            // right
            let row_end = if use3 { (k + 4).min(p) } else { p };
            for i in 0..row_end {
                let mut dot = h[(i, k)] + v1 * h[(i, k + 1)];
                if use3 {
                    dot += v2 * h[(i, k + 2)];
                }
                dot *= beta;
                h[(i, k)] -= dot;
                h[(i, k + 1)] -= dot * v1;
                if use3 {
                    h[(i, k + 2)] -= dot * v2;
                }
            }
            // accumulate Q
            for i in 0..n {
                let mut dot = q[(i, k)] + v1 * q[(i, k + 1)];
                if use3 {
                    dot += v2 * q[(i, k + 2)];
                }
                dot *= beta;
                q[(i, k)] -= dot;
                q[(i, k + 1)] -= dot * v1;
                if use3 {
                    q[(i, k + 2)] -= dot * v2;
                }
            }
            if k + 2 < p - 1 {
                bx = h[(k + 1, k)];
                by = h[(k + 2, k)];
                bz = h[(k + 3, k)];
            } else if k + 1 < p - 1 {
                bx = h[(k + 1, k)];
                by = h[(k + 2, k)];
                bz = 0.0;
            }
        }
        // restore exact Hessenberg zeros below the bulge path
        for i in lo + 2..p {
            for j in lo..i - 1 {
                h[(i, j)] = 0.0;
            }
        }
    }
    Ok(())
}

/// Householder reflector `P = I - beta v v^T`, `v = (1, v1, v2)`, mapping
/// `(x, y, z)` onto a multiple of `e1`; returns `(v1, v2, beta)`.
fn householder_small(x: f64, y: f64, z: f64) -> (f64, f64, f64) {
    let norm = (x * x + y * y + z * z).sqrt();
    if norm == 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let alpha = if x >= 0.0 { -norm } else { norm };
    let u0 = x - alpha;
    if u0 == 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let v1 = y / u0;
    let v2 = z / u0;
    let beta = 2.0 / (1.0 + v1 * v1 + v2 * v2);
    (v1, v2, beta)
}

/// Rotates every 2x2 diagonal block with real eigenvalues into two 1x1
/// blocks, so real eigenvalues are exactly the 1x1 blocks afterwards.
fn standardize_blocks(t: &mut DenseMatrix, q: &mut DenseMatrix) {
    let n = t.order();
    let mut i = 0;
    while i + 1 < n {
        if t[(i + 1, i)] == 0.0 {
            i += 1;
            continue;
        }
        let (a, b, c, d) = (t[(i, i)], t[(i, i + 1)], t[(i + 1, i)], t[(i + 1, i + 1)]);
        let half_tr = (a - d) / 2.0;
        let disc = half_tr * half_tr + b * c;
        if disc >= 0.0 {
            // real eigenvalues: (z, c) is an eigenvector, rotate it onto e1
            let z = half_tr + half_tr.signum() * disc.sqrt();
            let r = (z * z + c * c).sqrt();
            let (cs, sn) = (z / r, c / r);
            apply_givens(t, q, i, cs, sn);
            t[(i + 1, i)] = 0.0;
            i += 1;
        } else {
            i += 2;
        }
    }
}

/// Similarity by the Givens rotation G = [[cs, sn], [-sn, cs]] acting on
/// rows/columns (i, i+1).
fn apply_givens(t: &mut DenseMatrix, q: &mut DenseMatrix, i: usize, cs: f64, sn: f64) {
    let n = t.order();
    for j in 0..n {
        let x = t[(i, j)];
        let y = t[(i + 1, j)];
        t[(i, j)] = cs * x + sn * y;
        t[(i + 1, j)] = -sn * x + cs * y;
    }
    for r in 0..n {
        let x = t[(r, i)];
        let y = t[(r, i + 1)];
        t[(r, i)] = cs * x + sn * y;
        t[(r, i + 1)] = -sn * x + cs * y;
    }
    for r in 0..n {
        let x = q[(r, i)];
        let y = q[(r, i + 1)];
        q[(r, i)] = cs * x + sn * y;
        q[(r, i + 1)] = -sn * x + cs * y;
    }
}

// ---------------------------------------------------------------------------
// Empirical statistics
// ---------------------------------------------------------------------------

/// Per-run aggregate of real-eigenvalue counts and power sums.
#[derive(Debug, Clone)]
pub struct EmpiricalReport {
    pub samples: usize,
    pub count_mean: f64,
    pub count_stderr: f64,
    /// `(p, mean of sum lambda^p, standard error)` per requested power.
    pub power_sums: Vec<(usize, f64, f64)>,
    pub max_backward_error: f64,
    pub parity_even_all: bool,
}

/// Runs `samples` independent draws in parallel (deterministically keyed by
/// sample index) and aggregates counts and power sums of real eigenvalues.
pub fn empirical_stats(
    n: usize,
    tau: f64,
    samples: usize,
    seed: u64,
    p_list: &[usize],
    convention: Convention,
) -> Result<EmpiricalReport> {
    if samples == 0 {
        return Err(Error::InvalidParam("need at least one sample".into()));
    }
    let per_sample: Result<Vec<(usize, Vec<f64>, f64)>> = (0..samples as u64)
        .into_par_iter()
        .map(|s| {
            let x = sample_matrix(n, tau, seed, s, convention);
            let schur = real_schur(&x)?;
            let count = schur.real_eigenvalues.len();
            let sums: Vec<f64> = p_list
                .iter()
                .map(|&p| schur.real_eigenvalues.iter().map(|l| l.powi(p as i32)).sum())
                .collect();
            Ok((count, sums, schur.backward_error(&x)))
        })
        .collect();
    let per_sample = per_sample?;
    let m = samples as f64;
    let count_mean = per_sample.iter().map(|(c, _, _)| *c as f64).sum::<f64>() / m;
    let count_var = per_sample
        .iter()
        .map(|(c, _, _)| (*c as f64 - count_mean).powi(2))
        .sum::<f64>()
        / (m - 1.0).max(1.0);
    let mut power_sums = Vec::new();
    for (idx, &p) in p_list.iter().enumerate() {
        let mean = per_sample.iter().map(|(_, s, _)| s[idx]).sum::<f64>() / m;
        let var = per_sample.iter().map(|(_, s, _)| (s[idx] - mean).powi(2)).sum::<f64>()
            / (m - 1.0).max(1.0);
        power_sums.push((p, mean, (var / m).sqrt()));
    }
    Ok(EmpiricalReport {
        samples,
        count_mean,
        count_stderr: (count_var / m).sqrt(),
        power_sums,
        max_backward_error: per_sample.iter().map(|(_, _, e)| *e).fold(0.0, f64::max),
        parity_even_all: per_sample.iter().all(|(c, _, _)| c % 2 == 0),
    })
}

/// All eigenvalues of one sample as `(re, im)` pairs (real ones have im = 0),
/// for scatter-style dumps.
pub fn sample_eigenvalues(
    n: usize,
    tau: f64,
    seed: u64,
    sample_index: u64,
    convention: Convention,
) -> Result<Vec<(f64, f64)>> {
    let x = sample_matrix(n, tau, seed, sample_index, convention);
    let schur = real_schur(&x)?;
    let mut out: Vec<(f64, f64)> =
        schur.real_eigenvalues.iter().map(|&l| (l, 0.0)).collect();
    for &(re, im) in &schur.complex_pairs {
        out.push((re, im));
        out.push((re, -im));
    }
    Ok(out)
}
