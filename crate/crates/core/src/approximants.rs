//! Pointwise evaluation of the Möbius-weighted Beurling approximants
//!
//! * `F_n   = Σ_{a≤n} μ(a) ρ_a`                       (natural)
//! * `S_n   = Σ_{a≤n} μ(a) (1 − log a / log n) ρ_a`   (Selberg)
//! * `f_ε,n = Σ_{a≤n} μ(a) a^{-ε} ρ_a`                (regularized)
//! * `f_ε   = lim_n f_ε,n`                            (regularized limit)
//!
//! with `ρ_a(x) = {1/(ax)}`. Every one of them has the form
//! `c₁/x − Σ_a c_a ⌊1/(ax)⌋` on `(0, 1]` and `c₁/x` on `(1, ∞)`, which is
//! what [`PanelExpansion`] stores and what the quadrature engine consumes.

use serde::{Deserialize, Serialize};

use crate::arith::MoebiusTable;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::special::{ComplexPoint, ZetaEngine};
use crate::sum::Neumaier;

/// Default cap on the number of breakpoints an expansion may produce.
pub const DEFAULT_MAX_BREAKPOINTS: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApproximantKind {
    Natural,
    Selberg,
    Regularized,
    RegularizedLimit,
}

impl ApproximantKind {
    pub fn name(self) -> &'static str {
        match self {
            ApproximantKind::Natural => "natural",
            ApproximantKind::Selberg => "selberg",
            ApproximantKind::Regularized => "regularized",
            ApproximantKind::RegularizedLimit => "regularized_limit",
        }
    }
}

impl std::str::FromStr for ApproximantKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "natural" => Ok(Self::Natural),
            "selberg" => Ok(Self::Selberg),
            "regularized" => Ok(Self::Regularized),
            "regularized_limit" | "regularized-limit" | "limit" => Ok(Self::RegularizedLimit),
            other => Err(Error::rejected(format!("unknown approximant kind '{other}'"))),
        }
    }
}

/// Which approximant, at which truncation order and regularization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApproximantSpec<T> {
    pub kind: ApproximantKind,
    /// Truncation order; ignored (and reported as 0) for the limit form.
    pub n: usize,
    pub eps: T,
}

impl<T: Real> ApproximantSpec<T> {
    pub fn natural(n: usize) -> Self {
        Self {
            kind: ApproximantKind::Natural,
            n,
            eps: T::zero(),
        }
    }

    pub fn selberg(n: usize) -> Self {
        Self {
            kind: ApproximantKind::Selberg,
            n,
            eps: T::zero(),
        }
    }

    pub fn regularized(eps: T, n: usize) -> Self {
        Self {
            kind: ApproximantKind::Regularized,
            n,
            eps,
        }
    }

    pub fn regularized_limit(eps: T) -> Self {
        Self {
            kind: ApproximantKind::RegularizedLimit,
            n: 0,
            eps,
        }
    }

    /// Builds and validates a spec from parts (used by front ends).
    pub fn from_parts(kind: ApproximantKind, n: usize, eps: T) -> Result<Self> {
        let spec = match kind {
            ApproximantKind::Natural => Self::natural(n),
            ApproximantKind::Selberg => Self::selberg(n),
            ApproximantKind::Regularized => Self::regularized(eps, n),
            ApproximantKind::RegularizedLimit => Self::regularized_limit(eps),
        };
        if matches!(kind, ApproximantKind::Natural | ApproximantKind::Selberg) && eps != T::zero() {
            return Err(Error::rejected(format!("{} approximant takes eps = 0", kind.name())));
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            ApproximantKind::Natural | ApproximantKind::Regularized if self.n == 0 => {
                Err(Error::rejected("approximant order n must be at least 1"))
            }
            ApproximantKind::Selberg if self.n < 2 => {
                Err(Error::rejected("Selberg approximation needs n >= 2"))
            }
            ApproximantKind::Natural | ApproximantKind::Selberg if self.eps != T::zero() => {
                Err(Error::rejected("natural and Selberg approximants take eps = 0"))
            }
            ApproximantKind::Regularized | ApproximantKind::RegularizedLimit
                if !(self.eps > T::zero() && self.eps.is_finite()) =>
            {
                Err(Error::rejected("regularized approximants need a finite eps > 0"))
            }
            _ => Ok(()),
        }
    }

    pub fn is_finite_sum(&self) -> bool {
        self.kind != ApproximantKind::RegularizedLimit
    }

    /// Coefficient of `ρ_a` in a finite spec.
    pub fn coefficient(&self, a: usize, table: &MoebiusTable) -> T {
        let mu = T::from_i8(table.mu(a)).unwrap();
        if mu == T::zero() {
            return mu;
        }
        match self.kind {
            ApproximantKind::Natural => mu,
            ApproximantKind::Selberg => {
                if a == self.n {
                    T::zero()
                } else {
                    let af = T::from_count(a as u64);
                    let nf = T::from_count(self.n as u64);
                    mu * (T::one() - af.ln() / nf.ln())
                }
            }
            ApproximantKind::Regularized | ApproximantKind::RegularizedLimit => {
                mu * T::from_count(a as u64).powf(-self.eps)
            }
        }
    }

    /// Panel-constant form valid on `[x_min, ∞)`.
    ///
    /// For the limit form the floor part needs every `a ≤ 1/x_min`, and the
    /// `1/x` coefficient is `1/ζ(1+ε)`.
    pub fn expansion(
        &self,
        x_min: T,
        table: &MoebiusTable,
        zeta: &ZetaEngine<T>,
    ) -> Result<PanelExpansion<T>> {
        self.validate()?;
        check_x_min(x_min)?;
        match self.kind {
            ApproximantKind::RegularizedLimit => {
                let m = reciprocal_limit(x_min) as usize;
                table.require(m, "the regularized limit on this window")?;
                let slope = inv_zeta_one_plus(self.eps, zeta)?;
                let terms = (1..=m)
                    .filter(|&a| table.mu(a) != 0)
                    .map(|a| (a as u64, self.coefficient(a, table)))
                    .collect();
                Ok(PanelExpansion {
                    slope,
                    terms,
                    complete: false,
                })
            }
            _ => {
                table.require(self.n, "this approximant")?;
                let terms: Vec<(u64, T)> = (1..=self.n)
                    .map(|a| (a as u64, self.coefficient(a, table)))
                    .filter(|&(_, c)| c != T::zero())
                    .collect();
                Ok(PanelExpansion::from_terms(terms))
            }
        }
    }
}

fn check_x_min<T: Real>(x_min: T) -> Result<()> {
    if !(x_min > T::zero() && x_min <= T::one()) {
        return Err(Error::rejected(format!("x_min must lie in (0, 1] (got {x_min})")));
    }
    Ok(())
}

fn check_x<T: Real>(x: T) -> Result<()> {
    if !(x > T::zero() && x.is_finite()) {
        return Err(Error::rejected(format!("x must be positive and finite (got {x})")));
    }
    Ok(())
}

fn inv_zeta_one_plus<T: Real>(eps: T, zeta: &ZetaEngine<T>) -> Result<T> {
    let z = zeta.zeta(ComplexPoint::real(T::one() + eps))?;
    Ok(T::one() / z.value.re)
}

/// `f(x) = slope/x − Σ c_a ⌊1/(ax)⌋` on `(0, 1]`, `slope/x` beyond.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelExpansion<T> {
    pub slope: T,
    /// Active `(a, c_a)`, ascending in `a`, no zero coefficients.
    pub terms: Vec<(u64, T)>,
    /// True when `slope = Σ c_a / a`, i.e. the expansion is exactly the
    /// finite sum `Σ c_a ρ_a` on all of `(0, ∞)`.
    pub complete: bool,
}

impl<T: Real> PanelExpansion<T> {
    /// The finite sum `Σ c_a ρ_a`.
    pub fn from_terms(mut terms: Vec<(u64, T)>) -> Self {
        terms.retain(|&(_, c)| c != T::zero());
        terms.sort_by_key(|&(a, _)| a);
        let slope = terms
            .iter()
            .map(|&(a, c)| c / T::from_count(a))
            .collect::<Neumaier<T>>()
            .value();
        Self {
            slope,
            terms,
            complete: true,
        }
    }

    /// `ρ_a` alone.
    pub fn single(a: u64) -> Self {
        Self::from_terms(vec![(a, T::one())])
    }

    /// Term-wise difference `self − other`.
    pub fn minus(&self, other: &Self) -> Self {
        let mut merged: Vec<(u64, T)> = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            let left = self.terms.get(i);
            let right = other.terms.get(j);
            match (left, right) {
                (Some(&(a, c)), Some(&(b, d))) if a == b => {
                    merged.push((a, c - d));
                    i += 1;
                    j += 1;
                }
                (Some(&(a, c)), Some(&(b, _))) if a < b => {
                    merged.push((a, c));
                    i += 1;
                }
                (Some(&(a, c)), None) => {
                    merged.push((a, c));
                    i += 1;
                }
                (_, Some(&(b, d))) => {
                    merged.push((b, -d));
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        merged.retain(|&(_, c)| c != T::zero());
        Self {
            slope: self.slope - other.slope,
            terms: merged,
            complete: self.complete && other.complete,
        }
    }

    /// `Σ |c_a|`.
    pub fn coefficient_l1(&self) -> T {
        self.terms.iter().map(|&(_, c)| c.abs()).sum()
    }

    pub fn max_index(&self) -> u64 {
        self.terms.last().map_or(0, |&(a, _)| a)
    }

    /// Split-form evaluation: only `a ≤ 1/x` contribute floors.
    pub fn eval(&self, x: T) -> T {
        let mut acc = Neumaier::new();
        acc.add(self.slope / x);
        if x <= T::one() {
            for &(a, c) in &self.terms {
                let k = floor_recip(a, x);
                if k == 0 {
                    break;
                }
                acc.add(-c * T::from_count(k));
            }
        }
        acc.value()
    }
}

/// Fractional part `x − ⌊x⌋`.
#[inline]
pub fn rho<T: Real>(x: T) -> T {
    x - x.floor()
}

/// Indicator of `(0, 1]`.
#[inline]
pub fn chi<T: Real>(x: T) -> T {
    if x > T::zero() && x <= T::one() {
        T::one()
    } else {
        T::zero()
    }
}

/// `⌊1/(a x)⌋` for integer `a ≥ 1`, `x > 0`.
///
/// The floating-point estimate is corrected with the sign of `1 − k·a·x`,
/// which a fused multiply-add delivers exactly whenever `k·a` is
/// representable.
pub fn floor_recip<T: Real>(a: u64, x: T) -> u64 {
    let af = T::from_count(a);
    let est = (T::one() / (af * x)).floor();
    let mut k = est.to_u64().unwrap_or(u64::MAX / 2);
    let residual = |k: u64| (-(T::from_count(k) * af)).mul_add(x, T::one());
    while k > 0 && residual(k) < T::zero() {
        k -= 1;
    }
    while residual(k + 1) >= T::zero() {
        k += 1;
    }
    k
}

/// Largest `m` whose rounded reciprocal `fl(1/m)` is still `≥ x_min`.
///
/// This is `⌊1/x_min⌋`, except that `x_min = fl(1/m)` counts `m` itself
/// even when the rounding put `x_min` a hair above `1/m`.
pub fn reciprocal_limit<T: Real>(x_min: T) -> u64 {
    let m = floor_recip(1, x_min);
    if T::one() / T::from_count(m + 1) >= x_min {
        m + 1
    } else {
        m
    }
}

/// `ρ_a(x) = {1/(ax)}` for integer `a ≥ 1`, in `[0, 1)`.
pub fn rho_int<T: Real>(a: u64, x: T) -> T {
    let k = floor_recip(a, x);
    let af = T::from_count(a);
    let r = (-(T::from_count(k) * af)).mul_add(x, T::one()) / (af * x);
    clamp_unit(r)
}

/// `ρ_a(x) = ρ(1/(ax))` for real `a ≥ 1` and `x > 0`.
///
/// Integer `a` takes the exact-floor path of [`rho_int`].
pub fn rho_a<T: Real>(a: T, x: T) -> Result<T> {
    if !(a >= T::one() && a.is_finite()) {
        return Err(Error::rejected(format!("rho_a needs a >= 1 (got {a})")));
    }
    check_x(x)?;
    if a == a.floor() {
        if let Some(ai) = a.to_u64() {
            return Ok(rho_int(ai, x));
        }
    }
    let q = T::one() / (a * x);
    let k = q.floor();
    let r = (-(k * a)).mul_add(x, T::one()) / (a * x);
    Ok(clamp_unit(r))
}

fn clamp_unit<T: Real>(r: T) -> T {
    if r < T::zero() {
        T::zero()
    } else if r >= T::one() {
        T::one() - T::epsilon() * T::lit(0.5)
    } else {
        r
    }
}

fn check_order(n: usize, table: &MoebiusTable) -> Result<()> {
    if n == 0 {
        return Err(Error::rejected("approximant order n must be at least 1"));
    }
    table.require(n, "this approximant")
}

/// `F_n(x) = Σ_{a≤n} μ(a) ρ_a(x)`, term by term in ascending `a`.
pub fn natural_f<T: Real>(n: usize, x: T, table: &MoebiusTable) -> Result<T> {
    check_order(n, table)?;
    check_x(x)?;
    let mut acc = Neumaier::new();
    for a in 1..=n {
        match table.mu(a) {
            0 => {}
            1 => acc.add(rho_int(a as u64, x)),
            _ => acc.add(-rho_int(a as u64, x)),
        }
    }
    Ok(acc.value())
}

/// `S_n(x) = Σ_{a≤n} μ(a)(1 − log a / log n) ρ_a(x)` for `n ≥ 2`.
pub fn selberg_s<T: Real>(n: usize, x: T, table: &MoebiusTable) -> Result<T> {
    if n < 2 {
        return Err(Error::rejected("Selberg approximation needs n >= 2"));
    }
    check_order(n, table)?;
    check_x(x)?;
    let spec = ApproximantSpec::<T>::selberg(n);
    let mut acc = Neumaier::new();
    for a in 1..n {
        let c = spec.coefficient(a, table);
        if c != T::zero() {
            acc.add(c * rho_int(a as u64, x));
        }
    }
    Ok(acc.value())
}

/// `f_ε,n(x) = (1/x) Σ_{a≤n} μ(a) a^{-1-ε} − Σ_{a≤min(n,1/x)} μ(a) a^{-ε} ⌊1/(ax)⌋`.
pub fn f_eps_n<T: Real>(eps: T, n: usize, x: T, table: &MoebiusTable) -> Result<T> {
    check_order(n, table)?;
    check_x(x)?;
    if !(eps.is_finite() && eps >= T::zero()) {
        return Err(Error::rejected("eps must be finite and nonnegative"));
    }
    let mut slope = Neumaier::new();
    for a in 1..=n {
        let m = table.mu(a);
        if m != 0 {
            let af = T::from_count(a as u64);
            let w = af.powf(-T::one() - eps);
            slope.add(if m > 0 { w } else { -w });
        }
    }
    let mut acc = Neumaier::new();
    acc.add(slope.value() / x);
    if x <= T::one() {
        subtract_floor_sum(&mut acc, eps, n, x, table);
    }
    Ok(acc.value())
}

/// `f_ε(x) = 1/(x ζ(1+ε)) − Σ_{a≤1/x} μ(a) a^{-ε} ⌊1/(ax)⌋`.
pub fn f_eps<T: Real>(eps: T, x: T, table: &MoebiusTable, zeta: &ZetaEngine<T>) -> Result<T> {
    check_x(x)?;
    if !(eps > T::zero() && eps.is_finite()) {
        return Err(Error::rejected("f_eps needs a finite eps > 0"));
    }
    let mut acc = Neumaier::new();
    acc.add(inv_zeta_one_plus(eps, zeta)? / x);
    if x <= T::one() {
        let m = floor_recip(1, x) as usize;
        table.require(m, "f_eps at this x")?;
        subtract_floor_sum(&mut acc, eps, m, x, table);
    }
    Ok(acc.value())
}

fn subtract_floor_sum<T: Real>(acc: &mut Neumaier<T>, eps: T, n: usize, x: T, table: &MoebiusTable) {
    for a in 1..=n {
        let k = floor_recip(a as u64, x);
        if k == 0 {
            break;
        }
        let m = table.mu(a);
        if m != 0 {
            let w = T::from_count(a as u64).powf(-eps) * T::from_count(k);
            acc.add(if m > 0 { -w } else { w });
        }
    }
}

/// Dispatches a spec to its pointwise evaluator.
pub fn evaluate<T: Real>(
    spec: &ApproximantSpec<T>,
    x: T,
    table: &MoebiusTable,
    zeta: &ZetaEngine<T>,
) -> Result<T> {
    spec.validate()?;
    match spec.kind {
        ApproximantKind::Natural => natural_f(spec.n, x, table),
        ApproximantKind::Selberg => selberg_s(spec.n, x, table),
        ApproximantKind::Regularized => f_eps_n(spec.eps, spec.n, x, table),
        ApproximantKind::RegularizedLimit => f_eps(spec.eps, x, table, zeta),
    }
}

/// Discontinuities `1/(a k)` of an approximant inside `[x_min, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Breakpoints<T> {
    pub x_min: T,
    /// Ascending in `x`.
    pub points: Vec<T>,
    /// Integer `m` with `points[i] = 1/m`, descending.
    pub denominators: Vec<u64>,
}

/// All `1/(a k) ∈ [x_min, 1]` over the active terms of `spec`.
pub fn breakpoints<T: Real>(
    spec: &ApproximantSpec<T>,
    x_min: T,
    table: &MoebiusTable,
    max_count: usize,
) -> Result<Breakpoints<T>> {
    spec.validate()?;
    check_x_min(x_min)?;
    let m_max = reciprocal_limit(x_min);
    let active: Vec<u64> = match spec.kind {
        ApproximantKind::RegularizedLimit => {
            table.require(m_max as usize, "breakpoints of the regularized limit")?;
            (1..=m_max as usize).filter(|&a| table.mu(a) != 0).map(|a| a as u64).collect()
        }
        _ => {
            table.require(spec.n, "breakpoints of this approximant")?;
            (1..=spec.n)
                .filter(|&a| spec.coefficient(a, table) != T::zero())
                .map(|a| a as u64)
                .collect()
        }
    };
    let mut denominators = multiples_up_to(&active, m_max, max_count)?;
    denominators.reverse();
    let points = denominators.iter().map(|&m| T::one() / T::from_count(m)).collect();
    Ok(Breakpoints {
        x_min,
        points,
        denominators,
    })
}

/// Sorted, deduplicated `{a k ≤ limit}` over the given `a`.
pub(crate) fn multiples_up_to(active: &[u64], limit: u64, max_count: usize) -> Result<Vec<u64>> {
    let active: Vec<u64> = active.iter().copied().filter(|&a| a >= 1 && a <= limit).collect();
    if active.is_empty() {
        return Ok(Vec::new());
    }
    let over = |count: u64| {
        Error::capability(
            format!("{count} breakpoints exceed the configured cap of {max_count}"),
            Some(count as f64),
        )
    };
    if active[0] == 1 {
        if limit > max_count as u64 {
            return Err(over(limit));
        }
        return Ok((1..=limit).collect());
    }
    let pairs: u64 = active.iter().map(|&a| limit / a).sum();
    if pairs <= limit / 4 {
        let mut out: Vec<u64> = Vec::with_capacity(pairs as usize);
        for &a in &active {
            out.extend((1..=limit / a).map(|k| a * k));
        }
        out.sort_unstable();
        out.dedup();
        if out.len() > max_count {
            return Err(over(out.len() as u64));
        }
        return Ok(out);
    }
    if limit > (max_count as u64).saturating_mul(4) {
        return Err(over(pairs.min(limit)));
    }
    let mut mark = vec![false; limit as usize + 1];
    for &a in &active {
        let mut m = a;
        while m <= limit {
            mark[m as usize] = true;
            m += a;
        }
    }
    let out: Vec<u64> = (1..=limit).filter(|&m| mark[m as usize]).collect();
    if out.len() > max_count {
        return Err(over(out.len() as u64));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, ToPrimitive};
    use proptest::prelude::*;

    fn table() -> MoebiusTable {
        MoebiusTable::sieve(20_000).unwrap()
    }

    #[test]
    fn rho_a_examples() {
        assert_eq!(rho_a(2.0f64, 0.25).unwrap(), 0.0);
        assert!((rho_a(1.0f64, 2.0 / 3.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((rho_a(3.0f64, 1.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((rho_a(1.5f64, 0.5).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(rho_a(0.5f64, 1.0).is_err());
        assert!(rho_a(1.0f64, 0.0).is_err());
    }

    #[test]
    fn floor_is_exact_next_to_integers() {
        // 1/(a x) lands within an ulp of an integer for x = 1/m rounded
        for m in 1..5000u64 {
            let x = 1.0 / m as f64;
            let k = floor_recip(1, x);
            // exact: floor(1/x_fl) is m or m-1 depending on the rounding of x
            let exact = BigRational::from_integer(BigInt::one())
                / BigRational::from_float(x).unwrap();
            assert_eq!(k, exact.floor().to_integer().to_u64().unwrap(), "m = {m}");
            let r = rho_int(1, x);
            assert!((0.0..1.0).contains(&r));
        }
    }

    #[test]
    fn natural_examples() {
        let t = table();
        for x in [0.013f64, 0.4, 0.77, 1.0, 3.5] {
            assert_eq!(natural_f(1, x, &t).unwrap(), rho_int(1, x));
        }
        assert!((natural_f(2, 0.4f64, &t).unwrap() - 0.25).abs() < 1e-15);
        assert!(natural_f(20_001, 0.4, &t).is_err());
    }

    #[test]
    fn natural_matches_exact_rational_oracle() {
        let t = table();
        let x = 0.013f64;
        let xq = BigRational::from_float(x).unwrap();
        let mut exact = BigRational::from_integer(BigInt::from(0));
        for a in 1..=50usize {
            let q = BigRational::from_integer(BigInt::one()) / (BigRational::from_integer(BigInt::from(a)) * &xq);
            let frac = &q - q.floor();
            exact += BigRational::from_integer(BigInt::from(t.mu(a))) * frac;
        }
        let got = natural_f(50, x, &t).unwrap();
        assert!((got - exact.to_f64().unwrap()).abs() < 1e-12);
    }

    #[test]
    fn selberg_examples() {
        let t = table();
        for x in [0.05f64, 0.3, 0.9, 2.0] {
            assert_eq!(selberg_s(2, x, &t).unwrap(), rho_int(1, x));
        }
        assert!(selberg_s(3, 0.5f64, &t).unwrap().abs() < 1e-15);
        assert!(selberg_s(1, 0.5, &t).is_err());
    }

    #[test]
    fn selberg_matches_direct_summation() {
        let t = table();
        let x = 0.37f64;
        // direct summation with the naive fractional part in f64; every
        // 1/(a x) here is far from an integer
        let ln_n = 100f64.ln();
        let mut direct = 0.0;
        for a in 1..=100usize {
            let q = 1.0 / (a as f64 * x);
            direct += t.mu(a) as f64 * (1.0 - (a as f64).ln() / ln_n) * (q - q.floor());
        }
        assert!((selberg_s(100, x, &t).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn f_eps_n_examples() {
        let t = table();
        for x in [0.1f64, 0.6, 4.0] {
            assert!((f_eps_n(0.3, 1, x, &t).unwrap() - rho_int(1, x)).abs() < 1e-14);
        }
        assert!((f_eps_n(1.0f64, 2, 3.0, &t).unwrap() - 0.25).abs() < 1e-15);
    }

    fn naive_f_eps_n(eps: f64, n: usize, x: f64, t: &MoebiusTable) -> f64 {
        let mut acc = Neumaier::new();
        for a in 1..=n {
            let m = t.mu(a);
            if m != 0 {
                acc.add(m as f64 * (a as f64).powf(-eps) * rho_int(a as u64, x));
            }
        }
        acc.value()
    }

    #[test]
    fn split_form_matches_definition() {
        let t = table();
        let got = f_eps_n(0.25, 1000, 0.2, &t).unwrap();
        assert!((got - naive_f_eps_n(0.25, 1000, 0.2, &t)).abs() < 1e-10);
    }

    #[test]
    fn f_eps_examples() {
        let t = table();
        let z = ZetaEngine::new(1e-14).unwrap();
        let v = f_eps(1.0f64, 2.0, &t, &z).unwrap();
        assert!((v - 3.0 / (std::f64::consts::PI.powi(2))).abs() < 1e-14);
        assert!((v - 0.303_963_550_9).abs() < 1e-10);
        // x = 0.7: only a = 1 contributes a floor, ζ(1.5) = 2.6123753486854883
        let v = f_eps(0.5f64, 0.7, &t, &z).unwrap();
        assert!((v - (1.0 / (0.7 * 2.612_375_348_685_488_3) - 1.0)).abs() < 1e-14);
        let small = MoebiusTable::sieve(5).unwrap();
        assert!(f_eps(0.5, 0.1, &small, &z).is_err());
    }

    #[test]
    fn expansion_agrees_with_pointwise_forms() {
        let t = table();
        let z = ZetaEngine::new(1e-14).unwrap();
        let specs = [
            ApproximantSpec::natural(37),
            ApproximantSpec::selberg(40),
            ApproximantSpec::regularized(0.3, 55),
            ApproximantSpec::regularized_limit(0.2),
        ];
        for spec in specs {
            let e = spec.expansion(1e-3, &t, &z).unwrap();
            for x in [0.0011f64, 0.013, 0.25, 0.6, 0.999, 1.7, 40.0] {
                let direct = evaluate(&spec, x, &t, &z).unwrap();
                assert!((e.eval(x) - direct).abs() < 1e-11, "{spec:?} at {x}");
            }
        }
    }

    #[test]
    fn breakpoint_examples() {
        let t = table();
        let b = breakpoints(&ApproximantSpec::<f64>::natural(1), 0.3, &t, 100).unwrap();
        assert_eq!(b.denominators, vec![3, 2, 1]);
        let b2 = breakpoints(&ApproximantSpec::<f64>::natural(2), 0.3, &t, 100).unwrap();
        assert_eq!(b2.points, b.points);
        let b = breakpoints(&ApproximantSpec::<f64>::natural(10), 1e-3, &t, 10_000).unwrap();
        let mut brute = std::collections::BTreeSet::new();
        for a in 1..=10u64 {
            for k in 1..=1000u64 {
                if a * k <= 1000 {
                    brute.insert(a * k);
                }
            }
        }
        assert_eq!(b.points.len(), brute.len());
        assert!(b.points.windows(2).all(|w| w[0] < w[1]));
        assert!(breakpoints(&ApproximantSpec::<f64>::natural(10), 1e-3, &t, 999).is_err());
    }

    #[test]
    fn sparse_multiples_are_deduplicated_exactly() {
        let m = multiples_up_to(&[2, 3], 20, 100).unwrap();
        assert_eq!(m, vec![2, 3, 4, 6, 8, 9, 10, 12, 14, 15, 16, 18, 20]);
        let m = multiples_up_to(&[6, 10, 15], 10_000, 100_000).unwrap();
        let naive: std::collections::BTreeSet<u64> = (1..=10_000u64)
            .filter(|m| m % 6 == 0 || m % 10 == 0 || m % 15 == 0)
            .collect();
        assert_eq!(m, naive.into_iter().collect::<Vec<_>>());
    }

    #[test]
    fn spec_validation() {
        assert!(ApproximantSpec::<f64>::natural(0).validate().is_err());
        assert!(ApproximantSpec::<f64>::selberg(1).validate().is_err());
        assert!(ApproximantSpec::<f64>::regularized(0.0, 3).validate().is_err());
        assert!(ApproximantSpec::<f64>::regularized_limit(-1.0).validate().is_err());
        assert!(ApproximantSpec::from_parts(ApproximantKind::Natural, 3, 0.1f64).is_err());
        assert!(ApproximantSpec::from_parts(ApproximantKind::Regularized, 3, 0.1f64).is_ok());
    }

    #[test]
    fn pointwise_limit_is_linear_in_eps() {
        let t = table();
        let z = ZetaEngine::new(1e-14).unwrap();
        for x in [0.3f64, 0.7, 1.5] {
            let ks: Vec<f64> = [0.1, 0.01, 0.001]
                .iter()
                .map(|&e| (f_eps(e, x, &t, &z).unwrap() + chi(x)).abs() / e)
                .collect();
            let (lo, hi) = ks.iter().fold((f64::MAX, 0.0f64), |(l, h), &k| (l.min(k), h.max(k)));
            assert!(hi / lo < 1.25, "x = {x}: {ks:?}");
        }
    }

    #[test]
    fn f_eps_n_approaches_limit_in_n() {
        let t = table();
        let z = ZetaEngine::new(1e-14).unwrap();
        let (eps, x) = (0.5f64, 0.3);
        let lim = f_eps(eps, x, &t, &z).unwrap();
        let d: Vec<f64> = [10usize, 100, 1000, 10_000]
            .iter()
            .map(|&n| (f_eps_n(eps, n, x, &t).unwrap() - lim).abs())
            .collect();
        assert!(d.windows(2).all(|w| w[1] < w[0]), "{d:?}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn rho_in_unit_interval(a in 1u64..10_000, x in 1e-6f64..100.0) {
            let r = rho_int(a, x);
            prop_assert!((0.0..1.0).contains(&r));
            let r = rho_a(a as f64 + 0.5, x).unwrap();
            prop_assert!((0.0..1.0).contains(&r));
        }

        #[test]
        fn split_equals_naive(n in 1usize..1000, lx in -3.0f64..1.0, which in 0usize..3) {
            let t = MoebiusTable::sieve(1000).unwrap();
            let eps = [0.1, 0.5, 1.0][which];
            let x = 10f64.powf(lx);
            let got = f_eps_n(eps, n, x, &t).unwrap();
            prop_assert!((got - naive_f_eps_n(eps, n, x, &t)).abs() < 1e-10);
        }

        #[test]
        fn panels_are_affine_in_reciprocal(n in 1usize..60, m in 1u64..500, t1 in 0.05f64..0.95) {
            // on the panel 1/(m+1) < x < 1/m the approximant is c1 u + c0 in u = 1/x
            let t = MoebiusTable::sieve(100).unwrap();
            let us = [m as f64 + 0.02, m as f64 + t1, m as f64 + 0.98];
            let fs: Vec<f64> = us.iter().map(|u| natural_f(n, 1.0 / u, &t).unwrap()).collect();
            let slope_a = (fs[1] - fs[0]) / (us[1] - us[0]);
            let slope_b = (fs[2] - fs[1]) / (us[2] - us[1]);
            prop_assert!((slope_a - slope_b).abs() < 1e-8 * (1.0 + m as f64));
        }
    }
}
