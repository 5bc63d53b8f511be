//! The Mellin transform `M(f)(τ) = ∫_0^∞ x^{-1/2+iτ} f(x) dx` on `H`, by
//! panel quadrature and by its closed forms through `ζ`.
//!
//! With a weight `x^{-w}` the transform is evaluated at
//! `s = 1/2 − w + iτ`, i.e. `∫ x^{s-1} f(x) dx`. For `f = Σ c_a ρ_a`
//! the closed form is `−ζ(s)/s · Σ c_a a^{-s}`.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::approximants::{ApproximantSpec, PanelExpansion};
use crate::arith::MoebiusTable;
use crate::error::{Error, Result};
use crate::l2engine::{build_grid, for_each_piece, pieces, weighted_norm, QuadratureConfig, TailMode, CHUNK};
use crate::scalar::Real;
use crate::special::{inv_zeta_partial, log_chi_factor, power_neg, ComplexPoint, ZetaEngine};
use crate::sum::{ComplexNeumaier, Neumaier};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MellinFormula {
    /// `−ζ(s)/s`, the transform of `ρ_1`.
    Titchmarsh,
    /// `−ζ(s)/s · Σ c_a a^{-s}` for a finite expansion.
    FiniteSum,
    /// `−ζ(1/2−ε+iτ)/(1/2−ε+iτ) · Σ_{a≤n} μ(a) a^{-1/2-ε-iτ}`.
    RegularizedPartial,
    /// `−ζ(1/2−ε+iτ)/ζ(1/2+ε+iτ) · 1/(1/2−ε+iτ)`.
    Limit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Provenance<T> {
    /// Panel quadrature over `[x_lo, x_hi]`; `x_hi = None` means the
    /// `c/x` tail was integrated in closed form to infinity.
    NumericIntegral { x_lo: T, x_hi: Option<T>, head_corrected: bool },
    ClosedForm { formula: MellinFormula },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MellinSample<T> {
    pub tau: T,
    pub weight_eps: T,
    pub value: Complex<T>,
    pub error_estimate: T,
    pub provenance: Provenance<T>,
}

fn check_weight<T: Real>(w: T) -> Result<()> {
    if !(w >= T::zero() && w < T::lit(0.5)) {
        return Err(Error::rejected(format!("weight_eps must lie in [0, 1/2) (got {w})")));
    }
    Ok(())
}

fn check_tau<T: Real>(tau: T) -> Result<()> {
    if !tau.is_finite() {
        return Err(Error::rejected("tau must be finite"));
    }
    Ok(())
}

/// `u^{-s-1}` for `u > 0`.
#[inline]
fn kernel<T: Real>(u: T, s: Complex<T>) -> Complex<T> {
    let l = u.ln();
    let r = (-(s.re + T::one()) * l).exp();
    let (sin, cos) = (s.im * l).sin_cos();
    Complex::new(r * cos, -r * sin)
}

/// `P₂(ρ) = (ρ² − ρ)/2 + 1/12`, `P₃(ρ) = ρ³/6 − ρ²/4 + ρ/12`.
fn periodic_bernoulli<T: Real>(v: T) -> (T, T) {
    let r = v - v.floor();
    let p2 = (r * r - r) * T::lit(0.5) + T::one() / T::lit(12.0);
    let p3 = r * r * r / T::lit(6.0) - r * r * T::lit(0.25) + r / T::lit(12.0);
    (p2, p3)
}

/// `∫_V^∞ v^{-s-1} ρ(v) dv` for `V ≥ 1` by Euler–Maclaurin with `terms`
/// terms, and a bound on what is left out.
fn em_tail<T: Real>(v: T, s: Complex<T>, terms: usize) -> (Complex<T>, T) {
    let sigma = s.re;
    let vs = (-s * v.ln()).exp();
    let (p2, p3) = periodic_bernoulli(v);
    let one = T::one();
    let p2_max = one / T::lit(12.0);
    let p3_max = T::lit(3.0).sqrt() / T::lit(216.0);
    let s1 = s + one;
    let s2 = s + T::lit(2.0);
    let vm = v.powf(-sigma);
    let t1 = vs / (s * T::lit(2.0));
    let t2 = -vs / v * p2;
    let t3 = -s1 * vs / (v * v) * p3;
    let rest = |k: usize| match k {
        0 => vm / sigma,
        1 => p2_max * vm / v * (one + s1.norm() / (sigma + one)),
        2 => vm / (v * v) * p3_max * s1.norm() * (one + s2.norm() / (sigma + T::lit(2.0))),
        _ => vm / (v * v) * p3_max * s1.norm() * s2.norm() / (sigma + T::lit(2.0)),
    };
    let value = match terms {
        0 => Complex::new(T::zero(), T::zero()),
        1 => t1,
        2 => t1 + t2,
        _ => t1 + t2 + t3,
    };
    (value, rest(terms))
}

/// `∫_{1/x_min}^∞ u^{-s-1} Σ c_a ρ(u/a) du`, the part of the Mellin
/// integral cut off below `x_min`.
fn head_correction<T: Real>(f: &PanelExpansion<T>, s: Complex<T>, u_max: T, terms: usize) -> (Complex<T>, T) {
    let mut acc = ComplexNeumaier::new();
    let mut err = Neumaier::new();
    let one = T::one();
    for &(a, c) in &f.terms {
        let af = T::from_count(a);
        let v = u_max / af;
        let a_pow = (-s * af.ln()).exp();
        let (val, e) = if v >= one {
            em_tail(v, s, terms)
        } else {
            // ρ(v) = v on (V, 1)
            let one_minus = Complex::new(one, T::zero()) - s;
            let exact = (Complex::new(one, T::zero()) - (one_minus * v.ln()).exp()) / one_minus;
            let (t, e) = em_tail(one, s, terms);
            (exact + t, e)
        };
        acc.add(a_pow * val * c);
        err.add(c.abs() * a_pow.norm() * e);
    }
    (acc.value(), err.value())
}

/// `∫_1^{1/x_min} u^{-s-1} (αu + β) du` over the panel grid.
fn integrate_grid<T: Real>(
    panels: &[crate::l2engine::Panel<T>],
    alpha: T,
    s: Complex<T>,
    config: &QuadratureConfig<T>,
) -> (Complex<T>, T) {
    let (main, half) = config.rules();
    let eps = T::epsilon();
    let parts: Vec<(ComplexNeumaier<T>, Neumaier<T>, Neumaier<T>)> = panels
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut value = ComplexNeumaier::new();
            let mut diff = Neumaier::new();
            let mut round = Neumaier::new();
            for p in chunk {
                let k = pieces(p.lo, p.hi, s.im, config.max_log_width);
                for_each_piece(p.lo, p.hi, k, |a, b| {
                    let mut i_main = Complex::new(T::zero(), T::zero());
                    let mut r = T::zero();
                    for (u, w) in main.mapped(a, b) {
                        let kv = kernel(u, s) * w;
                        i_main = i_main + kv * (alpha * u + p.beta[0]);
                        r += kv.norm() * (alpha.abs() * u + p.beta[0].abs());
                    }
                    let mut i_half = Complex::new(T::zero(), T::zero());
                    for (u, w) in half.mapped(a, b) {
                        i_half = i_half + kernel(u, s) * w * (alpha * u + p.beta[0]);
                    }
                    value.add(i_main);
                    diff.add((i_main - i_half).norm());
                    round.add(r * eps);
                });
            }
            (value, diff, round)
        })
        .collect();
    let mut value = ComplexNeumaier::new();
    let mut err = Neumaier::new();
    for (v, d, r) in &parts {
        value.add(v.value());
        err.add(d.value());
        err.add(r.value());
    }
    (value.value(), err.value())
}

/// `∫_0^1 α u^{-s} du` (all of `x > 1`), closed form or numeric per the tail mode.
fn mellin_tail<T: Real>(alpha: T, s: Complex<T>, config: &QuadratureConfig<T>) -> (Complex<T>, T, Option<T>) {
    let one = Complex::new(T::one(), T::zero());
    match config.tail_mode {
        TailMode::ExactOneOverX => {
            let v = one / (one - s) * alpha;
            (v, T::epsilon() * v.norm() * T::lit(4.0), None)
        }
        TailMode::Numeric => {
            let (main, half) = config.rules();
            let lo = T::one() / config.numeric_tail_end;
            let k = pieces(lo, T::one(), s.im, config.max_log_width);
            let mut acc = ComplexNeumaier::new();
            let mut diff = T::zero();
            let f = |u: T| kernel(u, s) * (alpha * u);
            for_each_piece(lo, T::one(), k, |a, b| {
                let im: Complex<T> = main.mapped(a, b).fold(Complex::new(T::zero(), T::zero()), |z, (u, w)| z + f(u) * w);
                let ih: Complex<T> = half.mapped(a, b).fold(Complex::new(T::zero(), T::zero()), |z, (u, w)| z + f(u) * w);
                acc.add(im);
                diff += (im - ih).norm();
            });
            (acc.value(), diff, Some(config.numeric_tail_end))
        }
    }
}

/// `∫ x^{-1/2-w+iτ} f(x) dx` by breakpoint-panel quadrature over
/// `[x_min, ∞)`, plus an Euler–Maclaurin correction for `(0, x_min)` when
/// the expansion is a finite sum. The limit form gets no head correction;
/// its window is then genuinely `[x_min, ∞)`.
pub fn mellin_numeric<T: Real>(
    spec: &ApproximantSpec<T>,
    weight_eps: T,
    tau: T,
    config: &QuadratureConfig<T>,
    table: &MoebiusTable,
    zeta: &ZetaEngine<T>,
) -> Result<MellinSample<T>> {
    check_weight(weight_eps)?;
    check_tau(tau)?;
    config.validate()?;
    let f = spec.expansion(config.x_min, table, zeta)?;
    mellin_numeric_expansion(&f, weight_eps, tau, config)
}

/// [`mellin_numeric`] for an explicit expansion.
pub fn mellin_numeric_expansion<T: Real>(
    f: &PanelExpansion<T>,
    weight_eps: T,
    tau: T,
    config: &QuadratureConfig<T>,
) -> Result<MellinSample<T>> {
    check_weight(weight_eps)?;
    check_tau(tau)?;
    let s = Complex::new(T::lit(0.5) - weight_eps, tau);
    let grid = build_grid(&[f], [T::zero(); 2], config)?;
    let (body, body_err) = integrate_grid(&grid.panels, f.slope, s, config);
    let (tail, tail_err, x_hi) = mellin_tail(f.slope, s, config);
    let head_corrected = f.complete && config.head_terms > 0;
    let (head, head_err) = if f.complete {
        head_correction(f, s, grid.u_max, config.head_terms)
    } else {
        (Complex::new(T::zero(), T::zero()), T::zero())
    };
    let mut acc = ComplexNeumaier::new();
    acc.add(body);
    acc.add(tail);
    acc.add(head);
    let error_estimate = body_err + tail_err + head_err;
    if let Some(goal) = config.accuracy_goal {
        if error_estimate > goal {
            return Err(Error::capability(
                format!("Mellin window [{}, ∞) reaches only {error_estimate:e}, goal {goal:e}", config.x_min),
                error_estimate.to_f64(),
            ));
        }
    }
    Ok(MellinSample {
        tau,
        weight_eps,
        value: acc.value(),
        error_estimate,
        provenance: Provenance::NumericIntegral {
            x_lo: config.x_min,
            x_hi,
            head_corrected,
        },
    })
}

/// `|M(ρ_1)(τ) − (−ζ(1/2+iτ)/(1/2+iτ))|` with the numeric side on the
/// configured window.
pub fn titchmarsh_residual<T: Real>(tau: T, config: &QuadratureConfig<T>, zeta: &ZetaEngine<T>) -> Result<T> {
    check_tau(tau)?;
    let numeric = mellin_numeric_expansion(&PanelExpansion::single(1), T::zero(), tau, config)?;
    let closed = titchmarsh(T::zero(), tau, zeta)?;
    Ok((numeric.value - closed.value).norm())
}

/// `−ζ(s)/s` at `s = 1/2 − w + iτ`.
pub fn titchmarsh<T: Real>(weight_eps: T, tau: T, zeta: &ZetaEngine<T>) -> Result<MellinSample<T>> {
    check_weight(weight_eps)?;
    check_tau(tau)?;
    let sp = ComplexPoint::new(T::lit(0.5) - weight_eps, tau)?;
    let z = zeta.zeta(sp)?;
    let s = sp.to_complex();
    let value = -z.value / s;
    Ok(MellinSample {
        tau,
        weight_eps,
        value,
        error_estimate: z.total_error() / s.norm(),
        provenance: Provenance::ClosedForm {
            formula: MellinFormula::Titchmarsh,
        },
    })
}

/// `−ζ(s)/s · Σ c_a a^{-s}` at `s = 1/2 − w + iτ` for a finite spec.
pub fn mellin_closed<T: Real>(
    spec: &ApproximantSpec<T>,
    weight_eps: T,
    tau: T,
    table: &MoebiusTable,
    zeta: &ZetaEngine<T>,
) -> Result<MellinSample<T>> {
    spec.validate()?;
    if !spec.is_finite_sum() {
        return Err(Error::rejected("the finite-sum closed form needs a truncated spec"));
    }
    table.require(spec.n, "this approximant")?;
    let base = titchmarsh(weight_eps, tau, zeta)?;
    let sp = ComplexPoint::new(T::lit(0.5) - weight_eps, tau)?;
    let mut dirichlet = ComplexNeumaier::new();
    let mut l1 = Neumaier::new();
    for a in 1..=spec.n {
        let c = spec.coefficient(a, table);
        if c != T::zero() {
            let p = power_neg(a as u64, sp);
            dirichlet.add(p * c);
            l1.add(c.abs() * p.norm());
        }
    }
    let d = dirichlet.value();
    Ok(MellinSample {
        tau,
        weight_eps,
        value: base.value * d,
        error_estimate: base.error_estimate * d.norm() + T::epsilon() * T::lit(8.0) * l1.value() * base.value.norm(),
        provenance: Provenance::ClosedForm {
            formula: MellinFormula::FiniteSum,
        },
    })
}

/// `M(x^{-ε} f_{2ε,n})(τ) = −ζ(1/2−ε+iτ)/(1/2−ε+iτ) · Σ_{a≤n} μ(a) a^{-1/2-ε-iτ}`.
pub fn mellin_closed_f2eps_n<T: Real>(
    eps: T,
    n: usize,
    tau: T,
    table: &MoebiusTable,
    zeta: &ZetaEngine<T>,
) -> Result<MellinSample<T>> {
    if !(eps > T::zero() && eps < T::lit(0.5)) {
        return Err(Error::rejected(format!("eps must lie in (0, 1/2) (got {eps})")));
    }
    let base = titchmarsh(eps, tau, zeta)?;
    let partial = inv_zeta_partial(ComplexPoint::new(T::lit(0.5) + eps, tau)?, n, table)?;
    Ok(MellinSample {
        tau,
        weight_eps: eps,
        value: base.value * partial,
        error_estimate: base.error_estimate * partial.norm()
            + T::epsilon() * T::from_count(n as u64) * base.value.norm(),
        provenance: Provenance::ClosedForm {
            formula: MellinFormula::RegularizedPartial,
        },
    })
}

/// `M(x^{-ε} f_{2ε})(τ) = −(ζ(1/2−ε+iτ)/ζ(1/2+ε+iτ)) / (1/2−ε+iτ)`.
///
/// Written as `χ(s) · conj(ζ(1−s̄))/ζ(1−s̄)`-style: with `s = 1/2−ε+iτ`,
/// `ζ(s) = χ(s) ζ(1−s)` and `ζ(1−s) = conj ζ(1/2+ε+iτ)`, so the modulus is
/// exactly `|χ(s)|` and only the phase needs `ζ` on the right half.
pub fn mellin_limit<T: Real>(eps: T, tau: T, zeta: &ZetaEngine<T>) -> Result<MellinSample<T>> {
    if !(eps > T::zero() && eps < T::lit(0.25)) {
        return Err(Error::rejected(format!("eps must lie in (0, 1/4) (got {eps})")));
    }
    check_tau(tau)?;
    let s = ComplexPoint::new(T::lit(0.5) - eps, tau)?;
    let right = zeta.zeta(ComplexPoint::new(T::lit(0.5) + eps, tau)?)?;
    let z = right.value;
    let chi = log_chi_factor(s)?.exp();
    let phase = z.conj() / z;
    let sc = s.to_complex();
    let value = -(chi * phase) / sc;
    let rel = T::lit(2.0) * right.total_error() / z.norm() + T::lit(64.0) * T::epsilon() * (T::one() + tau.abs().ln_1p());
    Ok(MellinSample {
        tau,
        weight_eps: eps,
        value,
        error_estimate: value.norm() * rel,
        provenance: Provenance::ClosedForm {
            formula: MellinFormula::Limit,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlancherelReport<T> {
    pub spec: ApproximantSpec<T>,
    pub weight_eps: T,
    pub tau_limit: T,
    pub tau_step: T,
    /// `‖x^{-w} f‖_H`, head estimate included.
    pub h_norm: T,
    pub h_error: T,
    /// `((2π)^{-1} ∫_{-T}^{T} |Mf|² dτ)^{1/2}` by the trapezoid rule.
    pub k_norm: T,
    pub k_error: T,
    /// Estimate of `(2π)^{-1} ∫_{|τ|>T} |Mf|²` from a majorant
    /// `K²(1+|τ|)^{-2+2w}` fitted on `[T/2, T]`.
    pub k_tail_estimate: T,
    /// `h_norm − k_norm`.
    pub defect: T,
    pub samples: usize,
}

/// Compares `‖x^{-w} f‖_H` with the `K`-norm of its closed-form Mellin
/// transform over `|τ| ≤ T`.
pub fn plancherel_check<T: Real>(
    spec: &ApproximantSpec<T>,
    weight_eps: T,
    tau_limit: T,
    tau_step: T,
    config: &QuadratureConfig<T>,
    table: &MoebiusTable,
    zeta: &ZetaEngine<T>,
) -> Result<PlancherelReport<T>> {
    check_weight(weight_eps)?;
    if !spec.is_finite_sum() {
        return Err(Error::rejected("the Plancherel check needs a truncated spec"));
    }
    if !(tau_limit > T::zero() && tau_limit.is_finite() && tau_step > T::zero() && tau_step <= tau_limit) {
        return Err(Error::rejected("need 0 < tau_step <= tau_limit < inf"));
    }
    let h = weighted_norm(spec, weight_eps, false, config, table, zeta)?;
    let h_norm = h.distance_with_head();
    let head_gap = match (h.head_truncation_bound, h.head_estimate) {
        (Some(b), Some(e)) => (b - e).abs(),
        (Some(b), None) => b,
        _ => T::zero(),
    };
    let h_error = h.error_estimate + head_gap / (T::lit(2.0) * h_norm);

    let steps = (tau_limit / tau_step).round().to_usize().unwrap_or(0).max(2);
    // even count so that the doubled step lands on the same endpoint
    let steps = steps + steps % 2;
    let step = tau_limit / T::from_count(steps as u64);
    let samples: Vec<(T, T)> = (0..=steps)
        .into_par_iter()
        .map(|j| {
            let tau = step * T::from_count(j as u64);
            let m = mellin_closed(spec, weight_eps, tau, table, zeta)?;
            Ok((m.value.norm_sqr(), m.error_estimate * m.value.norm() * T::lit(2.0)))
        })
        .collect::<Result<_>>()?;
    let trapezoid = |stride: usize| {
        let mut acc = Neumaier::new();
        let last = samples.len() - 1;
        for j in (0..=last).step_by(stride) {
            let w = if j == 0 || j == last { T::lit(0.5) } else { T::one() };
            acc.add(w * samples[j].0);
        }
        acc.value() * step * T::from_count(stride as u64)
    };
    let fine = trapezoid(1);
    let coarse = trapezoid(2);
    let sample_err: T = samples.iter().map(|&(_, e)| e).sum::<T>() * step;
    // the integrand is even in τ
    let scale = T::one() / T::PI();
    let k_sq = fine * scale;
    let k_norm = k_sq.sqrt();
    let k_sq_err = ((fine - coarse).abs() / T::lit(3.0) + sample_err) * scale;
    let k_error = k_sq_err / (T::lit(2.0) * k_norm);

    let p = T::lit(2.0) - T::lit(2.0) * weight_eps;
    let half = samples.len() / 2;
    let k2 = samples[half..]
        .iter()
        .enumerate()
        .map(|(i, &(v, _))| {
            let tau = step * T::from_count((half + i) as u64);
            v * (T::one() + tau).powf(p)
        })
        .fold(T::zero(), T::max);
    let k_tail_estimate = scale * k2 * (T::one() + tau_limit).powf(T::one() - p) / (p - T::one());

    Ok(PlancherelReport {
        spec: *spec,
        weight_eps,
        tau_limit,
        tau_step: step,
        h_norm,
        h_error,
        k_norm,
        k_error,
        k_tail_estimate,
        defect: h_norm - k_norm,
        samples: samples.len(),
    })
}
