//! Sweeps that put numbers on the two analytic inputs of the convergence
//! argument and on the Cauchy behaviour of `f_ε,n` in `n`.
//!
//! * `|ζ(1/2−ε+iτ)/ζ(1/2+ε+iτ)|` against `(1+|τ|)^ε`;
//! * `|Σ_{a≤n} μ(a) a^{-s} − 1/ζ(s)|` against `n^{-δ/3}(1+|τ|)^ε`, which is
//!   only expected under a zero-free half-plane hypothesis; the sweep
//!   reports consistency, it certifies nothing;
//! * `‖f_ε,n − f_ε,m‖_H` along an ascending order grid.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::approximants::ApproximantSpec;
use crate::arith::MoebiusTable;
use crate::error::{Error, Result};
use crate::l2engine::{convergence_curve, CurveGrid, QuadratureConfig};
use crate::scalar::Real;
use crate::special::{inv_zeta_partial, zeta_ratio, ComplexPoint, ZetaEngine};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaSweepConfig<T> {
    /// Abscissa of the assumed zero-free half-plane, in `[1/2, 1)`.
    pub alpha: T,
    pub delta: T,
    /// Exponent of `(1+|τ|)` in the partial-sum error term.
    pub eps_exponent: T,
    /// Upper end of the ratio sweep, in `(0, 1/4)`.
    pub eps0: T,
    /// ε values of the ratio sweep, ascending, each at most `eps0`.
    pub eps_grid: Vec<T>,
    /// Real parts of the partial-sum sweep, ascending, each at least `alpha + delta`.
    pub sigma_grid: Vec<T>,
    pub tau_grid: Vec<T>,
    pub n_list: Vec<usize>,
}

impl<T: Real> Default for LemmaSweepConfig<T> {
    fn default() -> Self {
        Self {
            alpha: T::lit(0.5),
            delta: T::lit(0.25),
            eps_exponent: T::lit(0.1),
            eps0: T::lit(0.2),
            eps_grid: vec![T::zero(), T::lit(0.1), T::lit(0.2)],
            sigma_grid: vec![T::lit(0.75), T::one()],
            tau_grid: default_tau_grid(61),
            n_list: vec![100, 1000, 10_000],
        }
    }
}

/// `τ = 0` followed by `count` log-spaced points on `[1, 10³]`.
pub fn default_tau_grid<T: Real>(count: usize) -> Vec<T> {
    let mut g = vec![T::zero()];
    g.extend(log_grid(T::one(), T::lit(1e3), count));
    g
}

/// `count ≥ 2` log-spaced points from `lo` to `hi`, endpoints exact.
pub fn log_grid<T: Real>(lo: T, hi: T, count: usize) -> Vec<T> {
    if count == 1 {
        return vec![lo];
    }
    let step = (hi / lo).ln() / T::from_count(count as u64 - 1);
    (0..count)
        .map(|i| {
            if i + 1 == count {
                hi
            } else {
                lo * (step * T::from_count(i as u64)).exp()
            }
        })
        .collect()
}

fn ascending<T: PartialOrd>(v: &[T]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

impl<T: Real> LemmaSweepConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let half = T::lit(0.5);
        if !(self.alpha >= half && self.alpha < T::one()) {
            return Err(Error::rejected("alpha must lie in [1/2, 1)"));
        }
        if !(self.delta > T::zero() && self.alpha + self.delta <= T::one()) {
            return Err(Error::rejected("delta must be positive with alpha + delta <= 1"));
        }
        if !(self.eps_exponent > T::zero() && self.eps_exponent.is_finite()) {
            return Err(Error::rejected("eps_exponent must be positive"));
        }
        if !(self.eps0 > T::zero() && self.eps0 < T::lit(0.25)) {
            return Err(Error::rejected("eps0 must lie in (0, 1/4)"));
        }
        for (name, ok) in [
            ("eps_grid", !self.eps_grid.is_empty() && ascending(&self.eps_grid)),
            ("sigma_grid", !self.sigma_grid.is_empty() && ascending(&self.sigma_grid)),
            ("tau_grid", !self.tau_grid.is_empty() && ascending(&self.tau_grid)),
            ("n_list", !self.n_list.is_empty() && ascending(&self.n_list)),
        ] {
            if !ok {
                return Err(Error::rejected(format!("{name} must be nonempty and strictly ascending")));
            }
        }
        if self.tau_grid.iter().any(|t| !t.is_finite()) {
            return Err(Error::rejected("tau_grid entries must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint<T> {
    pub eps: Option<T>,
    pub sigma: Option<T>,
    pub tau: T,
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundSweepReport<T> {
    pub grid_point: GridPoint<T>,
    pub measured: T,
    pub majorant: T,
    pub ratio: T,
}

/// `measured = |ζ(1/2−ε+iτ)/ζ(1/2+ε+iτ)|` against `(1+|τ|)^ε` over `eps_grid × tau_grid`.
pub fn zratio_bound_sweep<T: Real>(config: &LemmaSweepConfig<T>) -> Result<Vec<BoundSweepReport<T>>> {
    config.validate()?;
    if let Some(&e) = config.eps_grid.iter().find(|&&e| e < T::zero() || e > config.eps0) {
        return Err(Error::rejected(format!("sweep eps {e} outside [0, eps0]")));
    }
    let points: Vec<(T, T)> = config
        .eps_grid
        .iter()
        .flat_map(|&e| config.tau_grid.iter().map(move |&t| (e, t)))
        .collect();
    points
        .par_iter()
        .map(|&(eps, tau)| {
            let measured = zeta_ratio(eps, tau)?;
            let majorant = (T::one() + tau.abs()).powf(eps);
            Ok(BoundSweepReport {
                grid_point: GridPoint {
                    eps: Some(eps),
                    sigma: None,
                    tau,
                    n: None,
                },
                measured,
                majorant,
                ratio: measured / majorant,
            })
        })
        .collect()
}

/// Per-ε digest of a ratio sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZratioSummary<T> {
    pub eps: T,
    /// Empirical constant: sup of `measured/majorant`.
    pub sup_ratio: T,
    /// Least-squares slope of `log ratio` against `log τ` over `τ ∈ [1, 10³]`.
    pub trend_slope: T,
    /// Same slope restricted to `[10², 10³]`.
    pub top_decade_slope: T,
    /// Mean ratio over `[10², 10³]`.
    pub top_decade_mean: T,
    /// `(2π)^{-ε}`, the limit the χ-factor asymptotic predicts.
    pub asymptote: T,
}

/// Least-squares slope of `y` against `x`; zero for fewer than two points.
pub fn ls_slope<T: Real>(xs: &[T], ys: &[T]) -> T {
    let n = T::from_count(xs.len() as u64);
    if xs.len() < 2 {
        return T::zero();
    }
    let mx = xs.iter().copied().sum::<T>() / n;
    let my = ys.iter().copied().sum::<T>() / n;
    let mut sxy = T::zero();
    let mut sxx = T::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == T::zero() {
        T::zero()
    } else {
        sxy / sxx
    }
}

pub fn zratio_summary<T: Real>(reports: &[BoundSweepReport<T>]) -> Vec<ZratioSummary<T>> {
    let mut eps_values: Vec<T> = reports.iter().filter_map(|r| r.grid_point.eps).collect();
    eps_values.dedup();
    let window = |lo: T, hi: T, eps: T| -> (Vec<T>, Vec<T>, Vec<T>) {
        let mut lx = Vec::new();
        let mut ly = Vec::new();
        let mut raw = Vec::new();
        for r in reports.iter().filter(|r| r.grid_point.eps == Some(eps)) {
            let t = r.grid_point.tau.abs();
            if t >= lo && t <= hi && r.ratio > T::zero() {
                lx.push(t.ln());
                ly.push(r.ratio.ln());
                raw.push(r.ratio);
            }
        }
        (lx, ly, raw)
    };
    eps_values
        .into_iter()
        .map(|eps| {
            let sup_ratio = reports
                .iter()
                .filter(|r| r.grid_point.eps == Some(eps))
                .map(|r| r.ratio)
                .fold(T::zero(), T::max);
            let (fx, fy, _) = window(T::one(), T::lit(1e3), eps);
            let (tx, ty, traw) = window(T::lit(1e2), T::lit(1e3), eps);
            let top_decade_mean = if traw.is_empty() {
                T::nan()
            } else {
                traw.iter().copied().sum::<T>() / T::from_count(traw.len() as u64)
            };
            ZratioSummary {
                eps,
                sup_ratio,
                trend_slope: ls_slope(&fx, &fy),
                top_decade_slope: ls_slope(&tx, &ty),
                top_decade_mean,
                asymptote: (T::lit(2.0) * T::PI()).powf(-eps),
            }
        })
        .collect()
}

/// `measured = |Σ_{a≤n} μ(a) a^{-s} − 1/ζ(s)|` against
/// `n^{-δ/3}(1+|τ|)^{eps_exponent}` over `sigma_grid × tau_grid × n_list`.
///
/// Real parts above 1 are accepted: there the partial sums converge
/// absolutely and the sweep doubles as a sanity check.
pub fn balazard_saias_error<T: Real>(
    config: &LemmaSweepConfig<T>,
    table: &MoebiusTable,
    zeta: &ZetaEngine<T>,
) -> Result<Vec<BoundSweepReport<T>>> {
    config.validate()?;
    if let Some(&sigma) = config.sigma_grid.iter().find(|&&s| s < config.alpha + config.delta) {
        return Err(Error::rejected(format!(
            "sigma {sigma} lies left of alpha + delta = {}",
            config.alpha + config.delta
        )));
    }
    if config.n_list[0] < 2 {
        return Err(Error::rejected("partial-sum orders must be at least 2"));
    }
    table.require(*config.n_list.last().unwrap(), "the partial-sum sweep")?;
    let points: Vec<(T, T)> = config
        .sigma_grid
        .iter()
        .flat_map(|&s| config.tau_grid.iter().map(move |&t| (s, t)))
        .collect();
    let rows: Vec<Vec<BoundSweepReport<T>>> = points
        .par_iter()
        .map(|&(sigma, tau)| {
            let s = ComplexPoint::new(sigma, tau)?;
            let inv = if sigma == T::one() && tau == T::zero() {
                Complex::new(T::zero(), T::zero())
            } else {
                Complex::new(T::one(), T::zero()) / zeta.zeta(s)?.value
            };
            config
                .n_list
                .iter()
                .map(|&n| {
                    let partial = inv_zeta_partial(s, n, table)?;
                    let measured = (partial - inv).norm();
                    let majorant = T::from_count(n as u64).powf(-config.delta / T::lit(3.0))
                        * (T::one() + tau.abs()).powf(config.eps_exponent);
                    Ok(BoundSweepReport {
                        grid_point: GridPoint {
                            eps: None,
                            sigma: Some(sigma),
                            tau,
                            n: Some(n),
                        },
                        measured,
                        majorant,
                        ratio: measured / majorant,
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CauchyIncrement<T> {
    pub m: usize,
    pub n: usize,
    /// `‖f_ε,n − f_ε,m‖_H` over `[x_min, ∞)`.
    pub increment: T,
    pub error_estimate: T,
}

/// Consecutive increments `‖f_ε,n − f_ε,m‖_H`; `eps = 0` measures the
/// natural approximants `F_n`.
pub fn f_eps_n_cauchy<T: Real>(
    eps: T,
    n_list: &[usize],
    config: &QuadratureConfig<T>,
    table: &MoebiusTable,
) -> Result<Vec<CauchyIncrement<T>>> {
    if !(eps >= T::zero() && eps.is_finite()) {
        return Err(Error::rejected("eps must be finite and nonnegative"));
    }
    if n_list.first() == Some(&0) {
        return Err(Error::rejected("orders must be at least 1"));
    }
    if let Some(&max) = n_list.iter().max() {
        table.require(max, "the Cauchy sweep")?;
    }
    let fixed = if eps == T::zero() {
        ApproximantSpec::natural(1)
    } else {
        ApproximantSpec::regularized(eps, 1)
    };
    // truncated specs never evaluate ζ
    let zeta = ZetaEngine::new(T::lit(1e-6))?;
    let grid = CurveGrid::NToInfinity(n_list.to_vec());
    let curve = convergence_curve(&grid, &fixed, config, table, &zeta)?;
    Ok(n_list
        .windows(2)
        .zip(curve)
        .map(|(w, r)| CauchyIncrement {
            m: w[0],
            n: w[1],
            increment: r.distance,
            error_estimate: r.error_estimate,
        })
        .collect())
}

/// Verdicts on a sequence of Cauchy increments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CauchyTrend<T> {
    /// Every increment is below its predecessor by more than the combined
    /// error estimates.
    pub strictly_decreasing: bool,
    /// Least-squares slope of `log increment` against `log m`.
    pub loglog_slope: T,
}

pub fn cauchy_trend<T: Real>(increments: &[CauchyIncrement<T>]) -> CauchyTrend<T> {
    let strictly_decreasing = increments
        .windows(2)
        .all(|w| w[1].increment + w[0].error_estimate + w[1].error_estimate < w[0].increment);
    let xs: Vec<T> = increments.iter().map(|c| T::from_count(c.m as u64).ln()).collect();
    let ys: Vec<T> = increments.iter().map(|c| c.increment.ln()).collect();
    CauchyTrend {
        strictly_decreasing,
        loglog_slope: ls_slope(&xs, &ys),
    }
}
