//! Exact and numerical spectral statistics of real eigenvalues of the
//! elliptic Ginibre orthogonal ensemble (elliptic GinOE).
//!
//! The ensemble interpolates between the real Ginibre ensemble (`tau = 0`)
//! and the GOE (`tau = 1`) through a non-Hermiticity parameter `tau`. For a
//! rational `tau` every even spectral moment of the real eigenvalues is an
//! exact surd (rational multiple of a square root of a rational), and this
//! crate computes them exactly, builds the polynomial coefficient stack of
//! the moment-generating-function ODE, and verifies the induced recurrence
//! relations and differential identities in exact arithmetic. Floating-point
//! oracles (adaptive quadrature, special functions, Monte Carlo sampling with
//! an in-crate real Schur solver) cross-check the exact results.

pub mod algebra;
pub mod asymptotics;
pub mod coeffs;
pub mod density;
pub mod hermite;
pub mod moments;
pub mod quad;
pub mod recursion;
pub mod sampler;

use algebra::Rational;
use num_traits::{One, Signed, Zero};

/// Crate-wide error type.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("surd addition with mismatched radicands: {0} vs {1}")]
    RadicandMismatch(String, String),
    #[error("polynomial division by t^{power} has nonzero remainder")]
    InexactDivision { power: usize },
    #[error("moment table too short: need orders through {needed}, have {have}")]
    TableTooShort { needed: usize, have: usize },
    #[error("quadrature did not reach tol={tol:e}; achieved error estimate {achieved:e}")]
    QuadratureNoConvergence { tol: f64, achieved: f64 },
    #[error("series did not converge within {terms} terms (tol={tol:e})")]
    SeriesNoConvergence { terms: usize, tol: f64 },
    #[error("QR iteration budget exceeded at matrix order {order}")]
    IterationBudget { order: usize },
    #[error("imaginary residual {residual:e} exceeds threshold in real-valued evaluation")]
    ImaginaryResidual { residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

/// One ensemble instance: even matrix size `n >= 2` and rational
/// non-Hermiticity parameter `tau` in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelParams {
    n: usize,
    tau: Rational,
}

impl ModelParams {
    pub fn new(n: usize, tau: Rational) -> Result<Self> {
        if n < 2 || n % 2 != 0 {
            return Err(Error::InvalidParam(format!(
                "matrix size must be even and >= 2, got {n}"
            )));
        }
        if tau.is_negative() || tau > Rational::one() {
            return Err(Error::InvalidParam(format!("tau must lie in [0, 1], got {tau}")));
        }
        Ok(Self { n, tau })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tau(&self) -> &Rational {
        &self.tau
    }

    pub fn tau_f64(&self) -> f64 {
        algebra::rational_to_f64(&self.tau)
    }

    pub fn is_ginoe(&self) -> bool {
        self.tau.is_zero()
    }

    pub fn is_goe(&self) -> bool {
        self.tau.is_one()
    }

    /// Gaussian scale `s = 1 + tau` shared by both density components.
    pub fn s(&self) -> Rational {
        &self.tau + Rational::one()
    }
}

impl std::fmt::Display for ModelParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "N={} tau={}", self.n, self.tau)
    }
}
