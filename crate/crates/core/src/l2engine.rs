//! `L2(0, ∞)` norms, inner products and distances of panel expansions.
//!
//! Everything is integrated in the reciprocal variable `u = 1/x`, where an
//! approximant is exactly affine between consecutive integers of the
//! breakpoint set. `[x_min, 1]` becomes a list of panels `[m, m']` carrying
//! the running floor constant, `(1, ∞)` becomes `(0, 1)` with the pure
//! `c₁ u` form, and the cut `(0, x_min)` is `u > 1/x_min`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::approximants::{multiples_up_to, reciprocal_limit, ApproximantKind, ApproximantSpec, PanelExpansion};
use crate::arith::MoebiusTable;
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::scalar::Real;
use crate::special::ZetaEngine;
use crate::sum::Neumaier;

/// Panels per parallel work item. Fixed so that the reduction order, and
/// hence every result bit, does not depend on the thread count.
pub(crate) const CHUNK: usize = 4096;

/// Largest coefficient index for which the mean-value head estimate is formed.
const HEAD_ESTIMATE_MAX_INDEX: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailMode {
    /// `∫_X^∞ (c/x)² dx = c²/X` in closed form beyond `x = tail_split`.
    ExactOneOverX,
    /// Numeric quadrature up to `x = numeric_tail_end`, nothing beyond.
    Numeric,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig<T> {
    pub x_min: T,
    pub gauss_order: usize,
    pub tail_mode: TailMode,
    /// Start of the closed-form tail in `ExactOneOverX` mode.
    pub tail_split: T,
    /// Right end of the window in `Numeric` mode.
    pub numeric_tail_end: T,
    /// Upper bound on `log(hi/lo)` of a single Gauss panel.
    pub max_log_width: T,
    pub max_panels: usize,
    /// Euler–Maclaurin terms (0..=3) of the Mellin head correction below `x_min`.
    pub head_terms: usize,
    /// When set, Mellin integrals whose error estimate exceeds this fail
    /// with a capability error instead of returning.
    pub accuracy_goal: Option<T>,
}

impl<T: Real> Default for QuadratureConfig<T> {
    fn default() -> Self {
        Self {
            x_min: T::lit(1e-6),
            gauss_order: 16,
            tail_mode: TailMode::ExactOneOverX,
            tail_split: T::lit(16.0),
            numeric_tail_end: T::lit(1e6),
            max_log_width: T::lit(0.5),
            max_panels: 10_000_000,
            head_terms: 3,
            accuracy_goal: None,
        }
    }
}

impl<T: Real> QuadratureConfig<T> {
    pub fn with_x_min(mut self, x_min: T) -> Self {
        self.x_min = x_min;
        self
    }

    pub fn with_order(mut self, gauss_order: usize) -> Self {
        self.gauss_order = gauss_order;
        self
    }

    pub fn with_tail_mode(mut self, tail_mode: TailMode) -> Self {
        self.tail_mode = tail_mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x_min > T::zero() && self.x_min < T::one()) {
            return Err(Error::rejected(format!("x_min must lie in (0, 1) (got {})", self.x_min)));
        }
        if self.gauss_order < 2 {
            return Err(Error::rejected("gauss_order must be at least 2"));
        }
        if !(self.tail_split >= T::one() && self.tail_split.is_finite()) {
            return Err(Error::rejected("tail_split must be a finite value >= 1"));
        }
        if !(self.numeric_tail_end > T::one() && self.numeric_tail_end.is_finite()) {
            return Err(Error::rejected("numeric_tail_end must be a finite value > 1"));
        }
        if !(self.max_log_width > T::zero() && self.max_log_width <= T::one()) {
            return Err(Error::rejected("max_log_width must lie in (0, 1]"));
        }
        if self.head_terms > 3 {
            return Err(Error::rejected("head_terms must be at most 3"));
        }
        if self.max_panels == 0 {
            return Err(Error::rejected("max_panels must be positive"));
        }
        Ok(())
    }

    pub(crate) fn rules(&self) -> (GaussLegendre<T>, GaussLegendre<T>) {
        let half = (self.gauss_order / 2).max(1);
        (GaussLegendre::new(self.gauss_order), GaussLegendre::new(half))
    }
}

/// What the approximant is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DistanceTarget<T> {
    /// `‖f + χ‖`.
    MinusChi,
    /// `‖f‖`.
    Zero,
    /// `‖f − g‖`.
    Approximant { spec: ApproximantSpec<T> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport<T> {
    pub spec: ApproximantSpec<T>,
    pub target: DistanceTarget<T>,
    /// Weight exponent `w` of `x^{-w}`; 0 for the plain `H` norm.
    pub weight_eps: T,
    /// Norm over `[x_min, ∞)`.
    pub distance: T,
    pub error_estimate: T,
    /// Sum of the panel integrals over `[x_min, 1]`.
    pub panel_sum: T,
    /// Contribution of `x > 1`.
    pub tail_contribution: T,
    /// Rigorous bound on the omitted `∫_0^{x_min}`; `None` when the
    /// approximant has no uniform bound there (the limit form).
    pub head_truncation_bound: Option<T>,
    /// Mean-value estimate of the omitted `∫_0^{x_min}` (not a bound).
    pub head_estimate: Option<T>,
    pub panel_count: usize,
    pub x_min: T,
}

impl<T: Real> DistanceReport<T> {
    /// Distance with the head estimate folded in, when there is one.
    pub fn distance_with_head(&self) -> T {
        match self.head_estimate {
            Some(h) => (self.distance * self.distance + h).sqrt(),
            None => self.distance,
        }
    }
}

/// Raw pieces of `∫ x^{-2w} (f + s_f χ)(g + s_g χ) dx` over `[x_min, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureParts<T> {
    pub value: T,
    pub panel_sum: T,
    pub tail: T,
    pub error_estimate: T,
    pub panel_count: usize,
    pub head_bound: Option<T>,
    pub head_estimate: Option<T>,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Panel<T> {
    pub lo: T,
    pub hi: T,
    /// `shift − c₀` per function; the integrand factor is `α u + β`.
    pub beta: [T; 2],
}

pub(crate) struct Grid<T> {
    pub u_max: T,
    pub panels: Vec<Panel<T>>,
}

/// Panels of `u ∈ [1, 1/x_min]` for up to two expansions.
pub(crate) fn build_grid<T: Real>(
    fs: &[&PanelExpansion<T>],
    shifts: [T; 2],
    config: &QuadratureConfig<T>,
) -> Result<Grid<T>> {
    config.validate()?;
    assert!(!fs.is_empty() && fs.len() <= 2);
    let m_max = reciprocal_limit(config.x_min);
    let u_max = T::one() / config.x_min;
    let mut active: Vec<u64> = fs
        .iter()
        .flat_map(|f| f.terms.iter().map(|&(a, _)| a))
        .filter(|&a| a <= m_max)
        .collect();
    active.sort_unstable();
    active.dedup();
    let points = multiples_up_to(&active, m_max, config.max_panels)?;

    let dense_len = m_max as usize + 1;
    let jumps: Vec<Vec<T>> = if dense_len <= config.max_panels.saturating_mul(4).saturating_add(1) {
        fs.iter()
            .map(|f| {
                let mut d = vec![T::zero(); dense_len];
                for &(a, c) in &f.terms {
                    if a > m_max {
                        break;
                    }
                    let mut m = a;
                    while m <= m_max {
                        d[m as usize] += c;
                        m += a;
                    }
                }
                points.iter().map(|&m| d[m as usize]).collect()
            })
            .collect()
    } else {
        let work = points.len() as u128 * active.len() as u128;
        if work > 2_000_000_000 {
            return Err(Error::capability(
                "breakpoint set too large for the sparse jump computation",
                Some(work as f64),
            ));
        }
        fs.iter()
            .map(|f| {
                points
                    .iter()
                    .map(|&m| {
                        f.terms
                            .iter()
                            .take_while(|&&(a, _)| a <= m)
                            .filter(|&&(a, _)| m % a == 0)
                            .map(|&(_, c)| c)
                            .sum()
                    })
                    .collect()
            })
            .collect()
    };

    let mut c0 = [Neumaier::new(), Neumaier::new()];
    let beta = |c0: &[Neumaier<T>; 2]| [shifts[0] - c0[0].value(), shifts[1] - c0[1].value()];
    let mut panels = Vec::with_capacity(points.len() + 1);
    let mut lo = T::one();
    for (idx, &m) in points.iter().enumerate() {
        let hi = T::from_count(m).min(u_max);
        if hi > lo {
            panels.push(Panel { lo, hi, beta: beta(&c0) });
            lo = hi;
        }
        for (i, j) in jumps.iter().enumerate() {
            c0[i].add(j[idx]);
        }
    }
    if u_max > lo {
        panels.push(Panel {
            lo,
            hi: u_max,
            beta: beta(&c0),
        });
    }
    if panels.len() > config.max_panels {
        return Err(Error::capability(
            format!("{} panels exceed the configured cap of {}", panels.len(), config.max_panels),
            Some(panels.len() as f64),
        ));
    }
    Ok(Grid { u_max, panels })
}

/// Number of geometric pieces so that each has log-width ≤ `max_lw` and
/// phase change `|τ|·log-width ≤ 1/2`.
#[inline]
pub(crate) fn pieces<T: Real>(lo: T, hi: T, tau: T, max_lw: T) -> usize {
    let lw = (hi / lo).ln();
    let by_width = (lw / max_lw).ceil();
    let by_phase = (tau.abs() * lw * T::lit(2.0)).ceil();
    by_width.max(by_phase).max(T::one()).to_usize().unwrap_or(1)
}

/// Geometric subdivision of `[lo, hi]`, calling `f(a, b)` on each piece.
#[inline]
pub(crate) fn for_each_piece<T: Real, F: FnMut(T, T)>(lo: T, hi: T, k: usize, mut f: F) {
    if k == 1 {
        f(lo, hi);
        return;
    }
    let step = (hi / lo).ln() / T::from_count(k as u64);
    let mut a = lo;
    for j in 1..=k {
        let b = if j == k { hi } else { lo * (step * T::from_count(j as u64)).exp() };
        f(a, b);
        a = b;
    }
}

#[derive(Clone, Copy)]
struct ChunkSum<T> {
    value: Neumaier<T>,
    diff: Neumaier<T>,
    abs: Neumaier<T>,
    round: Neumaier<T>,
}

impl<T: Real> ChunkSum<T> {
    fn new() -> Self {
        Self {
            value: Neumaier::new(),
            diff: Neumaier::new(),
            abs: Neumaier::new(),
            round: Neumaier::new(),
        }
    }

    fn merge(&mut self, other: &Self) {
        self.value.merge(&other.value);
        self.diff.merge(&other.diff);
        self.abs.merge(&other.abs);
        self.round.merge(&other.round);
    }
}

#[inline]
fn weight_power<T: Real>(u: T, p: T, plain: bool) -> T {
    if plain {
        T::one() / (u * u)
    } else {
        (p * u.ln()).exp()
    }
}

/// `∫ u^{2w−2} (α₀u + β₀)(α₁u + β₁) du` over all panels.
fn integrate_panels<T: Real>(grid: &Grid<T>, alpha: [T; 2], weight: T, config: &QuadratureConfig<T>) -> (T, T) {
    let (main, half) = config.rules();
    let p = T::lit(2.0) * weight - T::lit(2.0);
    let plain = weight == T::zero();
    let eps = T::epsilon();
    let sums: Vec<ChunkSum<T>> = grid
        .panels
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = ChunkSum::new();
            for panel in chunk {
                let k = pieces(panel.lo, panel.hi, T::zero(), config.max_log_width);
                for_each_piece(panel.lo, panel.hi, k, |a, b| {
                    let mut i_main = T::zero();
                    let mut r = T::zero();
                    for (u, w) in main.mapped(a, b) {
                        let g0 = alpha[0] * u + panel.beta[0];
                        let g1 = alpha[1] * u + panel.beta[1];
                        let s0 = alpha[0].abs() * u + panel.beta[0].abs();
                        let s1 = alpha[1].abs() * u + panel.beta[1].abs();
                        let q = w * weight_power(u, p, plain);
                        i_main += q * g0 * g1;
                        r += q * (g0.abs() * s1 + g1.abs() * s0);
                    }
                    let i_half: T = half
                        .mapped(a, b)
                        .map(|(u, w)| {
                            w * weight_power(u, p, plain) * (alpha[0] * u + panel.beta[0]) * (alpha[1] * u + panel.beta[1])
                        })
                        .sum();
                    acc.value.add(i_main);
                    acc.diff.add((i_main - i_half).abs());
                    acc.abs.add(i_main.abs());
                    acc.round.add(r * eps);
                });
            }
            acc
        })
        .collect();
    let mut total = ChunkSum::new();
    for s in &sums {
        total.merge(s);
    }
    let count = T::from_count(grid.panels.len() as u64 + 1);
    let err = total.diff.value() + total.round.value() + T::lit(4.0) * eps * count.sqrt() * total.abs.value();
    (total.value.value(), err)
}

/// `∫_0^1 p u^{2w} du` split into numeric and closed-form parts per the tail mode.
fn real_tail<T: Real>(product: T, weight: T, config: &QuadratureConfig<T>) -> (T, T) {
    let e = T::lit(2.0) * weight + T::one();
    let (numeric_end, closed) = match config.tail_mode {
        TailMode::ExactOneOverX => (config.tail_split, product * config.tail_split.powf(-e) / e),
        TailMode::Numeric => (config.numeric_tail_end, T::zero()),
    };
    let (main, half) = config.rules();
    let lo = T::one() / numeric_end;
    let k = pieces(lo, T::one(), T::zero(), config.max_log_width);
    let mut acc = Neumaier::new();
    let mut diff = T::zero();
    let f = |u: T| product * (T::lit(2.0) * weight * u.ln()).exp();
    for_each_piece(lo, T::one(), k, |a, b| {
        let i_main = main.integrate(a, b, f);
        let i_half = half.integrate(a, b, f);
        acc.add(i_main);
        diff += (i_main - i_half).abs();
    });
    acc.add(closed);
    let v = acc.value();
    (v, diff + T::lit(8.0) * T::epsilon() * v.abs())
}

/// Jordan totient `J₂(d) = d² Π_{p|d} (1 − p^{-2})` for `d ≤ n`.
fn jordan_j2<T: Real>(n: usize) -> Vec<T> {
    let mut j: Vec<T> = (0..=n).map(|d| T::from_count(d as u64) * T::from_count(d as u64)).collect();
    let mut composite = vec![false; n + 1];
    for p in 2..=n {
        if composite[p] {
            continue;
        }
        let f = T::one() - T::one() / (T::from_count(p as u64) * T::from_count(p as u64));
        let mut m = p;
        while m <= n {
            if m > p {
                composite[m] = true;
            }
            j[m] *= f;
            m += p;
        }
    }
    j
}

/// Mean over `u` of `(Σ c_a ρ(u/a) + s)(Σ d_b ρ(u/b) + t)`.
///
/// Uses `mean ρ(u/a)ρ(u/b) = 1/4 + gcd(a,b)²/(12ab)` and the identity
/// `Σ_{d | gcd} J₂(d) = gcd²`.
fn product_mean<T: Real>(f: &PanelExpansion<T>, g: &PanelExpansion<T>, s: T, t: T) -> T {
    let n = f.max_index().max(g.max_index()) as usize;
    let quarter = T::lit(0.25);
    let half = T::lit(0.5);
    let sum_f: T = f.terms.iter().map(|&(_, c)| c).sum();
    let sum_g: T = g.terms.iter().map(|&(_, c)| c).sum();
    let mut acc = Neumaier::new();
    acc.add(s * t);
    acc.add(s * sum_g * half);
    acc.add(t * sum_f * half);
    acc.add(sum_f * sum_g * quarter);
    if n > 0 {
        let dense = |e: &PanelExpansion<T>| {
            let mut v = vec![T::zero(); n + 1];
            for &(a, c) in &e.terms {
                v[a as usize] = c / T::from_count(a);
            }
            v
        };
        let (vf, vg) = (dense(f), dense(g));
        let j2 = jordan_j2::<T>(n);
        let twelfth = T::one() / T::lit(12.0);
        for d in 1..=n {
            let (mut af, mut ag) = (T::zero(), T::zero());
            let mut m = d;
            while m <= n {
                af += vf[m];
                ag += vg[m];
                m += d;
            }
            if af != T::zero() && ag != T::zero() {
                acc.add(twelfth * j2[d] * af * ag);
            }
        }
    }
    acc.value()
}

/// `∫ x^{-2w} (f + s_f χ)(g + s_g χ) dx` over `[x_min, ∞)`, with head data.
pub fn inner_product_expansions<T: Real>(
    f: &PanelExpansion<T>,
    g: &PanelExpansion<T>,
    shifts: [bool; 2],
    weight: T,
    config: &QuadratureConfig<T>,
) -> Result<QuadratureParts<T>> {
    if !(weight >= T::zero() && weight < T::lit(0.5)) {
        return Err(Error::rejected(format!("weight exponent must lie in [0, 1/2) (got {weight})")));
    }
    let shift = |b: bool| if b { T::one() } else { T::zero() };
    let (sf, sg) = (shift(shifts[0]), shift(shifts[1]));
    let grid = build_grid(&[f, g], [sf, sg], config)?;
    let (panel_sum, panel_err) = integrate_panels(&grid, [f.slope, g.slope], weight, config);
    let (tail, tail_err) = real_tail(f.slope * g.slope, weight, config);
    let mut value = Neumaier::new();
    value.add(panel_sum);
    value.add(tail);

    let head_scale = config.x_min.powf(T::one() - T::lit(2.0) * weight) / (T::one() - T::lit(2.0) * weight);
    let complete = f.complete && g.complete;
    let head_bound = complete.then(|| (sf + f.coefficient_l1()) * (sg + g.coefficient_l1()) * head_scale);
    let head_estimate = (complete && f.max_index().max(g.max_index()) <= HEAD_ESTIMATE_MAX_INDEX)
        .then(|| product_mean(f, g, sf, sg) * head_scale);
    Ok(QuadratureParts {
        value: value.value(),
        panel_sum,
        tail,
        error_estimate: panel_err + tail_err,
        panel_count: grid.panels.len(),
        head_bound,
        head_estimate,
    })
}

fn report_from_parts<T: Real>(
    spec: ApproximantSpec<T>,
    target: DistanceTarget<T>,
    weight: T,
    parts: QuadratureParts<T>,
    config: &QuadratureConfig<T>,
) -> DistanceReport<T> {
    let sq = parts.value.max(T::zero());
    let distance = sq.sqrt();
    let error_estimate = if distance > T::zero() {
        (parts.error_estimate / (T::lit(2.0) * distance)).min(parts.error_estimate.sqrt())
    } else {
        parts.error_estimate.sqrt()
    };
    DistanceReport {
        spec,
        target,
        weight_eps: weight,
        distance,
        error_estimate,
        panel_sum: parts.panel_sum,
        tail_contribution: parts.tail,
        head_truncation_bound: parts.head_bound,
        head_estimate: parts.head_estimate,
        panel_count: parts.panel_count,
        x_min: config.x_min,
    }
}

/// Norm of `x^{-w}(f + χ·[shift])` over `[x_min, ∞)`.
pub fn weighted_norm<T: Real>(
    spec: &ApproximantSpec<T>,
    weight_eps: T,
    shift_by_chi: bool,
    config: &QuadratureConfig<T>,
    table: &MoebiusTable,
    zeta: &ZetaEngine<T>,
) -> Result<DistanceReport<T>> {
    config.validate()?;
    let f = spec.expansion(config.x_min, table, zeta)?;
    let parts = inner_product_expansions(&f, &f, [shift_by_chi; 2], weight_eps, config)?;
    let target = if shift_by_chi {
        DistanceTarget::MinusChi
    } else {
        DistanceTarget::Zero
    };
    Ok(report_from_parts(*spec, target, weight_eps, parts, config))
}

/// `‖f + χ‖_H` (or `‖f‖_H` without the shift) over `[x_min, ∞)`.
pub fn panel_integrate<T: Real>(
    spec: &ApproximantSpec<T>,
    shift_by_chi: bool,
    config: &QuadratureConfig<T>,
    table: &MoebiusTable,
    zeta: &ZetaEngine<T>,
) -> Result<DistanceReport<T>> {
    weighted_norm(spec, T::zero(), shift_by_chi, config, table, zeta)
}

/// `‖f − g‖_H` over `[x_min, ∞)`.
pub fn distance_between<T: Real>(
    f: &ApproximantSpec<T>,
    g: &ApproximantSpec<T>,
    config: &QuadratureConfig<T>,
    table: &MoebiusTable,
    zeta: &ZetaEngine<T>,
) -> Result<DistanceReport<T>> {
    config.validate()?;
    let ef = f.expansion(config.x_min, table, zeta)?;
    let eg = g.expansion(config.x_min, table, zeta)?;
    let d = ef.minus(&eg);
    let parts = inner_product_expansions(&d, &d, [false; 2], T::zero(), config)?;
    Ok(report_from_parts(
        *f,
        DistanceTarget::Approximant { spec: *g },
        T::zero(),
        parts,
        config,
    ))
}

/// `⟨ρ_a, ρ_b⟩_H` over `[x_min, ∞)`.
pub fn gram_inner<T: Real>(a: u64, b: u64, config: &QuadratureConfig<T>) -> Result<T> {
    Ok(gram_inner_parts(a, b, config)?.value)
}

/// [`gram_inner`] with error estimate and head data.
pub fn gram_inner_parts<T: Real>(a: u64, b: u64, config: &QuadratureConfig<T>) -> Result<QuadratureParts<T>> {
    if a == 0 || b == 0 {
        return Err(Error::rejected("dilation indices must be at least 1"));
    }
    // order the pair so that (a, b) and (b, a) run identical arithmetic
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    let fa = PanelExpansion::single(a);
    let fb = PanelExpansion::single(b);
    inner_product_expansions(&fa, &fb, [false; 2], T::zero(), config)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlowBoundRow<T> {
    pub n: usize,
    pub distance: T,
    pub error_estimate: T,
    /// `distance · √(log n)`; zero at `n = 1`.
    pub normalized: T,
}

/// `‖F_n + χ‖_H` and `‖F_n + χ‖_H √(log n)` for each `n`.
pub fn slow_bound_report<T: Real>(
    n_list: &[usize],
    config: &QuadratureConfig<T>,
    table: &MoebiusTable,
) -> Result<Vec<SlowBoundRow<T>>> {
    if let Some(&max) = n_list.iter().max() {
        table.require(max, "the slow-bound sweep")?;
    }
    // finite specs never evaluate ζ
    let zeta = ZetaEngine::new(T::lit(1e-6))?;
    n_list
        .iter()
        .map(|&n| {
            let r = panel_integrate(&ApproximantSpec::natural(n), true, config, table, &zeta)?;
            let ln = T::from_count(n as u64).ln();
            Ok(SlowBoundRow {
                n,
                distance: r.distance,
                error_estimate: r.error_estimate,
                normalized: r.distance * ln.sqrt(),
            })
        })
        .collect()
}

/// Grid of a convergence experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "grid", rename_all = "snake_case")]
pub enum CurveGrid<T> {
    /// `‖f_ε + χ‖` along a descending ε grid.
    EpsToZero(Vec<T>),
    /// `‖f_ε,n − f_ε,m‖` for consecutive orders of an ascending grid.
    NToInfinity(Vec<usize>),
}

/// Spec of the same family with a new ε (kind preserved).
fn with_eps<T: Real>(fixed: &ApproximantSpec<T>, eps: T) -> Result<ApproximantSpec<T>> {
    match fixed.kind {
        ApproximantKind::Regularized => Ok(ApproximantSpec::regularized(eps, fixed.n)),
        ApproximantKind::RegularizedLimit => Ok(ApproximantSpec::regularized_limit(eps)),
        _ => Err(Error::rejected("an eps sweep needs a regularized spec")),
    }
}

/// Order-`n` member of the family; `eps = 0` means the natural approximant.
fn with_order<T: Real>(fixed: &ApproximantSpec<T>, n: usize) -> Result<ApproximantSpec<T>> {
    match fixed.kind {
        ApproximantKind::Natural => Ok(ApproximantSpec::natural(n)),
        ApproximantKind::Selberg => Ok(ApproximantSpec::selberg(n)),
        ApproximantKind::Regularized if fixed.eps == T::zero() => Ok(ApproximantSpec::natural(n)),
        ApproximantKind::Regularized => Ok(ApproximantSpec::regularized(fixed.eps, n)),
        ApproximantKind::RegularizedLimit => Err(Error::rejected("an order sweep needs a finite spec")),
    }
}

pub fn convergence_curve<T: Real>(
    grid: &CurveGrid<T>,
    fixed: &ApproximantSpec<T>,
    config: &QuadratureConfig<T>,
    table: &MoebiusTable,
    zeta: &ZetaEngine<T>,
) -> Result<Vec<DistanceReport<T>>> {
    match grid {
        CurveGrid::EpsToZero(eps) => {
            if eps.is_empty() || eps.windows(2).any(|w| !(w[0] > w[1])) {
                return Err(Error::rejected("eps grid must be nonempty and strictly descending"));
            }
            eps.iter()
                .map(|&e| panel_integrate(&with_eps(fixed, e)?, true, config, table, zeta))
                .collect()
        }
        CurveGrid::NToInfinity(orders) => {
            if orders.len() < 2 || orders.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::rejected("order grid needs at least two strictly ascending entries"));
            }
            orders
                .windows(2)
                .map(|w| {
                    let lo = with_order(fixed, w[0])?;
                    let hi = with_order(fixed, w[1])?;
                    distance_between(&hi, &lo, config, table, zeta)
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// `log 2π − γ = 1 + Σ_{k≥1} ∫_0^1 t²/(k+t)² dt = ‖ρ_1‖²` (mpmath).
    const RHO1_NORM_SQ: f64 = 1.260_661_401_507_812_6;
    /// `‖ρ_1‖²` restricted to `[1e-6, ∞)` (mpmath, exact per-panel sums).
    const RHO1_NORM_SQ_CUT: f64 = 1.260_661_068_174_562_6;

    fn setup() -> (MoebiusTable, ZetaEngine<f64>) {
        (MoebiusTable::sieve(100_000).unwrap(), ZetaEngine::new(1e-13).unwrap())
    }

    #[test]
    fn rho1_norm_matches_series() {
        let (t, z) = setup();
        let cfg = QuadratureConfig::default();
        let r = panel_integrate(&ApproximantSpec::natural(1), false, &cfg, &t, &z).unwrap();
        let sq = r.distance * r.distance;
        assert!((sq - RHO1_NORM_SQ_CUT).abs() < 1e-10, "{sq}");
        assert!((sq - RHO1_NORM_SQ).abs() < 1e-6);
        let with_head = r.distance_with_head().powi(2);
        assert!((with_head - RHO1_NORM_SQ).abs() < 1e-9, "{with_head}");
        assert!(r.head_truncation_bound.unwrap() >= RHO1_NORM_SQ - sq);
        assert!((sq - (r.panel_sum + r.tail_contribution)).abs() < 1e-14);
        let r2 = panel_integrate(&ApproximantSpec::regularized(0.5, 1), false, &cfg, &t, &z).unwrap();
        assert_eq!(r.distance, r2.distance);
    }

    #[test]
    fn gram_is_symmetric_and_consistent() {
        let cfg = QuadratureConfig::default();
        let (t, z) = setup();
        let g11 = gram_inner::<f64>(1, 1, &cfg).unwrap();
        let r = panel_integrate(&ApproximantSpec::natural(1), false, &cfg, &t, &z).unwrap();
        assert!((g11 - r.distance * r.distance).abs() < 1e-10);
        for (a, b) in [(2, 3), (1, 7), (4, 6), (12, 35)] {
            let ab = gram_inner::<f64>(a, b, &cfg).unwrap();
            let ba = gram_inner::<f64>(b, a, &cfg).unwrap();
            assert!((ab - ba).abs() < 1e-12);
        }
    }

    // Dense trapezoid oracles on [1e-2, 1] (2·10^7 uniform points, numpy) plus
    // the closed-form tail c² over x > 1.
    const TRAP_NATURAL3_SHIFT: f64 = 0.210_465_297_318_114;
    const TRAP_NATURAL2_SHIFT: f64 = 1.065_360_842_109_151;
    const TRAP_GRAM_2_3: f64 = 0.438_460_386_292_431;

    #[test]
    fn matches_trapezoid_oracles() {
        let (t, z) = setup();
        let cfg = QuadratureConfig::default().with_x_min(1e-2);
        let d3 = panel_integrate(&ApproximantSpec::natural(3), true, &cfg, &t, &z).unwrap();
        assert!((d3.distance.powi(2) - TRAP_NATURAL3_SHIFT).abs() < 1e-5, "{}", d3.distance.powi(2));
        let d2 = panel_integrate(&ApproximantSpec::natural(2), true, &cfg, &t, &z).unwrap();
        assert!((d2.distance.powi(2) - TRAP_NATURAL2_SHIFT).abs() < 1e-5, "{}", d2.distance.powi(2));
        let g = gram_inner::<f64>(2, 3, &cfg).unwrap();
        assert!((g - TRAP_GRAM_2_3).abs() < 1e-6, "{g}");
    }

    #[test]
    fn refinement_is_within_error_estimate() {
        let (t, z) = setup();
        for spec in [
            ApproximantSpec::natural(30),
            ApproximantSpec::regularized(0.2, 100),
            ApproximantSpec::selberg(50),
        ] {
            let base = QuadratureConfig::default().with_x_min(1e-4);
            let a = panel_integrate(&spec, true, &base, &t, &z).unwrap();
            let b = panel_integrate(&spec, true, &base.with_order(32), &t, &z).unwrap();
            assert!((a.distance - b.distance).abs() < a.error_estimate, "{spec:?}");
        }
    }

    #[test]
    fn tail_modes_agree() {
        let (t, z) = setup();
        let cfg = QuadratureConfig::default().with_x_min(1e-3);
        for spec in [ApproximantSpec::natural(5), ApproximantSpec::regularized(0.3, 40)] {
            let exact = panel_integrate(&spec, true, &cfg, &t, &z).unwrap();
            let numeric = panel_integrate(&spec, true, &cfg.with_tail_mode(TailMode::Numeric), &t, &z).unwrap();
            let c = spec.expansion(cfg.x_min, &t, &z).unwrap().slope;
            let beyond = c * c / cfg.numeric_tail_end;
            assert!((numeric.tail_contribution + beyond - exact.tail_contribution).abs() < 1e-10);
            assert_eq!(numeric.panel_sum, exact.panel_sum);
        }
    }

    #[test]
    fn thread_count_does_not_change_bits() {
        let (t, z) = setup();
        let cfg = QuadratureConfig::default().with_x_min(1e-5);
        let spec = ApproximantSpec::regularized(0.1, 500);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| panel_integrate(&spec, true, &cfg, &t, &z).unwrap());
        let b = four.install(|| panel_integrate(&spec, true, &cfg, &t, &z).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn eps_curve_is_nonincreasing() {
        let (t, z) = setup();
        let cfg = QuadratureConfig::default();
        let table = MoebiusTable::sieve(1_000_000).unwrap();
        let grid = CurveGrid::EpsToZero(vec![0.4, 0.2, 0.1, 0.05]);
        let curve = convergence_curve(&grid, &ApproximantSpec::regularized_limit(0.4), &cfg, &table, &z).unwrap();
        for w in curve.windows(2) {
            let slack = 2.0 * (w[0].error_estimate + w[1].error_estimate);
            assert!(w[1].distance <= w[0].distance + slack);
        }
        assert!(curve[0].head_truncation_bound.is_none());
        let _ = t;
    }

    #[test]
    fn order_curve_increment_is_the_difference_norm() {
        let (t, z) = setup();
        let cfg = QuadratureConfig::default().with_x_min(1e-4);
        let grid = CurveGrid::NToInfinity(vec![2, 4]);
        let curve = convergence_curve(&grid, &ApproximantSpec::regularized(0.25, 2), &cfg, &t, &z).unwrap();
        let diff = PanelExpansion::from_terms(vec![(3, -(3f64.powf(-0.25)))]);
        let direct = inner_product_expansions(&diff, &diff, [false; 2], 0.0, &cfg).unwrap();
        assert!((curve[0].distance - direct.value.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn increments_decrease_for_positive_eps() {
        let (t, z) = setup();
        let cfg = QuadratureConfig::default();
        let grid = CurveGrid::NToInfinity(vec![10, 20, 40, 80]);
        let curve = convergence_curve(&grid, &ApproximantSpec::regularized(0.1, 10), &cfg, &t, &z).unwrap();
        assert!(curve.windows(2).all(|w| w[1].distance < w[0].distance));
    }

    #[test]
    fn slow_bound_products_are_positive() {
        let (t, _) = setup();
        let cfg = QuadratureConfig::<f64>::default();
        let rows = slow_bound_report(&[1, 2, 10, 100, 1000], &cfg, &t).unwrap();
        assert!(rows[0].distance > 0.0);
        assert!(rows[1..].iter().all(|r| r.normalized > 0.1));
    }

    #[test]
    fn head_estimate_uses_gcd_mean() {
        // mean of ρ(u)ρ(u/2) is 1/4 + 1/24
        let f = PanelExpansion::<f64>::single(1);
        let g = PanelExpansion::<f64>::single(2);
        assert!((product_mean(&f, &g, 0.0, 0.0) - (0.25 + 1.0 / 24.0)).abs() < 1e-15);
        assert!((product_mean(&f, &f, 0.0, 0.0) - 1.0 / 3.0).abs() < 1e-15);
        let j = jordan_j2::<f64>(12);
        assert_eq!(j[6], 24.0);
        assert_eq!(j[12], 96.0);
    }

    #[test]
    fn rejects_bad_config() {
        let (t, z) = setup();
        let spec = ApproximantSpec::natural(3);
        for cfg in [
            QuadratureConfig::default().with_x_min(1.5),
            QuadratureConfig::default().with_x_min(0.0),
            QuadratureConfig::default().with_order(1),
        ] {
            assert!(panel_integrate(&spec, true, &cfg, &t, &z).is_err());
        }
        let mut tight = QuadratureConfig::default();
        tight.max_panels = 1000;
        let err = panel_integrate(&spec, true, &tight, &t, &z).unwrap_err();
        assert_eq!(err.kind(), crate::ErrorKind::Capability);
        let small = MoebiusTable::sieve(10).unwrap();
        assert!(panel_integrate(&ApproximantSpec::natural(30), true, &QuadratureConfig::default(), &small, &z).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn triangle_inequality(n1 in 1usize..200, n2 in 1usize..200, e1 in 0.05f64..1.0, e2 in 0.05f64..1.0) {
            let (t, z) = setup();
            let cfg = QuadratureConfig::default().with_x_min(1e-4);
            let f = ApproximantSpec::regularized(e1, n1);
            let g = ApproximantSpec::regularized(e2, n2);
            let fc = panel_integrate(&f, true, &cfg, &t, &z).unwrap();
            let gc = panel_integrate(&g, true, &cfg, &t, &z).unwrap();
            let fg = distance_between(&f, &g, &cfg, &t, &z).unwrap();
            let tol = fc.error_estimate + gc.error_estimate + fg.error_estimate + 1e-12;
            prop_assert!(fc.distance <= fg.distance + gc.distance + tol);
        }

        #[test]
        fn gram_symmetry(a in 1u64..60, b in 1u64..60) {
            let cfg = QuadratureConfig::default().with_x_min(1e-3);
            prop_assert_eq!(gram_inner::<f64>(a, b, &cfg).unwrap(), gram_inner::<f64>(b, a, &cfg).unwrap());
        }
    }
}
