//! Complex special functions on and around the critical strip.
//!
//! * [`log_gamma`]: principal-branch log Γ by upward recurrence shift and the
//!   Stirling series, with the classical sector remainder bound.
//! * [`zeta`]: Euler–Maclaurin summation with explicit truncation bound.
//! * [`zeta_ratio`]: `|ζ(1/2−ε+iτ)/ζ(1/2+ε+iτ)|` as the modulus of the
//!   functional-equation factor, which never divides two ζ values.
//! * [`inv_zeta_partial`]: the Dirichlet polynomial `Σ_{a≤n} μ(a) a^{-s}`.
//!
//! Every evaluation returns a [`SpecialValue`] carrying a truncation bound and
//! a separate floating-point rounding estimate.

mod bernoulli;
mod chi;
mod gamma;
mod zeta;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::arith::MoebiusTable;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sum::ComplexNeumaier;

pub use chi::{log_chi_factor, zeta_ratio};
pub use gamma::log_gamma;
pub use zeta::{zeta, ZetaEngine, DEFAULT_MAX_TERMS};

#[cfg(test)]
pub(crate) use bernoulli::{BERNOULLI_EVEN, BERNOULLI_EVEN_OVER_FACTORIAL};

/// A point `s = σ + iτ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexPoint<T> {
    pub sigma: T,
    pub tau: T,
}

impl<T: Real> ComplexPoint<T> {
    pub fn new(sigma: T, tau: T) -> Result<Self> {
        if !sigma.is_finite() || !tau.is_finite() {
            return Err(Error::rejected("complex point coordinates must be finite"));
        }
        Ok(Self { sigma, tau })
    }

    pub fn real(sigma: T) -> Self {
        Self {
            sigma,
            tau: T::zero(),
        }
    }

    pub fn to_complex(self) -> Complex<T> {
        Complex::new(self.sigma, self.tau)
    }

    pub(crate) fn check_finite(self) -> Result<()> {
        Self::new(self.sigma, self.tau).map(|_| ())
    }
}

impl<T: Real> From<Complex<T>> for ComplexPoint<T> {
    fn from(z: Complex<T>) -> Self {
        Self {
            sigma: z.re,
            tau: z.im,
        }
    }
}

/// A special-function value together with its error accounting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpecialValue<T> {
    pub value: Complex<T>,
    /// Bound on the truncation error of the series or asymptotic expansion.
    pub abs_error_bound: T,
    /// Worst-case estimate of accumulated floating-point rounding.
    pub rounding_estimate: T,
}

impl<T: Real> SpecialValue<T> {
    /// Truncation bound plus rounding estimate.
    pub fn total_error(&self) -> T {
        self.abs_error_bound + self.rounding_estimate
    }
}

/// `Σ_{a=1}^{n} μ(a) a^{-s}`, summed in ascending `a` with compensation.
pub fn inv_zeta_partial<T: Real>(
    s: ComplexPoint<T>,
    n: usize,
    table: &MoebiusTable,
) -> Result<Complex<T>> {
    s.check_finite()?;
    if n == 0 {
        return Err(Error::rejected("partial sum order n must be at least 1"));
    }
    table.require(n, "inv_zeta_partial")?;
    let mut acc = ComplexNeumaier::new();
    for a in 1..=n {
        let m = table.mu(a);
        if m == 0 {
            continue;
        }
        let term = power_neg(a as u64, s);
        acc.add(if m > 0 { term } else { -term });
    }
    Ok(acc.value())
}

/// `a^{-s} = exp(-s log a)` with the real logarithm of the integer base.
#[inline]
pub(crate) fn power_neg<T: Real>(a: u64, s: ComplexPoint<T>) -> Complex<T> {
    let la = T::from_count(a).ln();
    let r = (-s.sigma * la).exp();
    let (sin, cos) = (s.tau * la).sin_cos();
    Complex::new(r * cos, -r * sin)
}
