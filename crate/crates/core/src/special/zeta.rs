use num_complex::Complex;

use super::bernoulli::BERNOULLI_EVEN_OVER_FACTORIAL;
use super::{power_neg, ComplexPoint, SpecialValue};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sum::ComplexNeumaier;

/// Smallest accepted `target_error`.
pub const MIN_TARGET_ERROR: f64 = 1e-14;
/// Default ceiling on the Euler–Maclaurin summation length.
pub const DEFAULT_MAX_TERMS: u64 = 1 << 24;

/// ζ evaluator with a fixed truncation target, shared by the modules that
/// need ζ values (`f_ε`, Mellin closed forms, lemma harnesses).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaEngine<T> {
    target_error: T,
    max_terms: u64,
}

impl<T: Real> ZetaEngine<T> {
    pub fn new(target_error: T) -> Result<Self> {
        check_target(target_error)?;
        Ok(Self {
            target_error,
            max_terms: DEFAULT_MAX_TERMS,
        })
    }

    pub fn with_max_terms(mut self, max_terms: u64) -> Self {
        self.max_terms = max_terms.max(10);
        self
    }

    pub fn target_error(&self) -> T {
        self.target_error
    }

    pub fn zeta(&self, s: ComplexPoint<T>) -> Result<SpecialValue<T>> {
        zeta_impl(s, self.target_error, self.max_terms)
    }

    pub fn zeta_at(&self, s: Complex<T>) -> Result<SpecialValue<T>> {
        self.zeta(s.into())
    }
}

impl Default for ZetaEngine<f64> {
    fn default() -> Self {
        Self::new(1e-12).expect("valid default target")
    }
}

fn check_target<T: Real>(target_error: T) -> Result<()> {
    if !(target_error >= T::lit(MIN_TARGET_ERROR)) || !target_error.is_finite() {
        return Err(Error::rejected(format!(
            "target_error must be finite and at least {MIN_TARGET_ERROR:e}"
        )));
    }
    Ok(())
}

/// ζ(s) for `σ > −1`, `s ≠ 1`, by Euler–Maclaurin summation
///
/// `ζ(s) = Σ_{n<N} n^{-s} + N^{1-s}/(s-1) + N^{-s}/2 + Σ_{k≤M} B_{2k}/(2k)! (s)_{2k-1} N^{-s-2k+1} + R`
///
/// with `|R| ≤ |s+2M+1|/(σ+2M+1) · |T_{M+1}|`. `N` starts at `max(|τ|, 10)`
/// and doubles until some `M ≤ 29` meets the target.
pub fn zeta<T: Real>(s: ComplexPoint<T>, target_error: T) -> Result<SpecialValue<T>> {
    check_target(target_error)?;
    zeta_impl(s, target_error, DEFAULT_MAX_TERMS)
}

fn zeta_impl<T: Real>(s: ComplexPoint<T>, target: T, max_terms: u64) -> Result<SpecialValue<T>> {
    s.check_finite()?;
    if s.sigma <= -T::one() {
        return Err(Error::rejected(format!(
            "zeta is implemented for sigma > -1 (got {})",
            s.sigma
        )));
    }
    if s.sigma == T::one() && s.tau == T::zero() {
        return Err(Error::Domain("zeta has a pole at s = 1".into()));
    }

    let sc = s.to_complex();
    let one = T::one();
    let mut n_terms = s.tau.abs().ceil().to_u64().unwrap_or(u64::MAX).max(10);
    let mut best = T::infinity();
    let plan = loop {
        if n_terms > max_terms {
            return Err(Error::capability(
                format!(
                    "zeta at s = {}{:+}i: target error {:e} not reachable within {} terms",
                    s.sigma, s.tau, target, max_terms
                ),
                best.to_f64(),
            ));
        }
        if let Some(p) = plan_tail(s, n_terms, target, &mut best) {
            break p;
        }
        n_terms = n_terms.saturating_mul(2);
    };

    let mut acc = ComplexNeumaier::new();
    let mut mag = T::zero();
    let s_abs = sc.norm();
    for n in 1..plan.n {
        let t = power_neg(n, s);
        acc.add(t);
        let ln = T::from_count(n).ln();
        mag += t.norm() * (T::lit(2.0) + s_abs * ln);
    }
    let nf = T::from_count(plan.n);
    let n_pow = power_neg(plan.n, s);
    let head = n_pow * nf / (sc - one) + n_pow * T::lit(0.5);
    acc.add(head);
    for t in &plan.terms {
        acc.add(*t);
    }
    mag += head.norm() * (T::lit(2.0) + s_abs * nf.ln());
    let tail_mag: T = plan.terms.iter().map(|t| t.norm()).sum();
    mag += tail_mag * (T::lit(2.0) + s_abs * nf.ln() + T::from_count(2 * plan.terms.len() as u64));

    Ok(SpecialValue {
        value: acc.value(),
        abs_error_bound: plan.bound,
        rounding_estimate: T::epsilon() * T::lit(2.0) * mag,
    })
}

struct TailPlan<T> {
    n: u64,
    terms: Vec<Complex<T>>,
    bound: T,
}

fn plan_tail<T: Real>(s: ComplexPoint<T>, n: u64, target: T, best: &mut T) -> Option<TailPlan<T>> {
    let sc = s.to_complex();
    let nf = T::from_count(n);
    let inv_n2 = T::one() / (nf * nf);
    // q_k = (s)_{2k-1} N^{-s-2k+1}
    let mut q = sc * power_neg(n, s) / nf;
    let mut terms = Vec::new();
    let depth = BERNOULLI_EVEN_OVER_FACTORIAL.len();
    for k in 1..depth {
        terms.push(q * T::lit(BERNOULLI_EVEN_OVER_FACTORIAL[k - 1]));
        let kk = T::from_count(2 * k as u64);
        q = q * (sc + kk - T::one()) * (sc + kk) * inv_n2;
        let next = q * T::lit(BERNOULLI_EVEN_OVER_FACTORIAL[k]);
        let m2 = T::from_count(2 * k as u64 + 1);
        let bound = (sc + m2).norm() / (s.sigma + m2) * next.norm();
        if bound < *best {
            *best = bound;
        }
        if bound.is_finite() && bound <= target {
            return Some(TailPlan { n, terms, bound });
        }
    }
    None
}
