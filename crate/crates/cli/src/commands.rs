use std::fmt::Display;

use nbcrit::approximants::{chi, evaluate, f_eps, reciprocal_limit};
use nbcrit::l2engine::{convergence_curve, panel_integrate, slow_bound_report};
use nbcrit::lemmas::{
    balazard_saias_error, cauchy_trend, f_eps_n_cauchy, log_grid, ls_slope, zratio_bound_sweep, zratio_summary,
};
use nbcrit::mellin::{mellin_closed, mellin_limit, mellin_numeric, plancherel_check};
use nbcrit::special::log_gamma;
use nbcrit::{
    ApproximantKind, ApproximantSpec64, BoundSweepReport64, ComplexPoint64, CurveGrid, DistanceReport64,
    LemmaSweepConfig64, MellinSample64, MoebiusTable, Provenance, QuadratureConfig64, TailMode, ZetaEngine64,
};
use serde::Serialize;
use serde_json::json;

use crate::args::*;

/// Truncation target of the ζ engine shared by every command.
pub const ZETA_TARGET: f64 = 1e-13;

pub const TABLE_ENV: &str = "NBCRIT_TABLE_LIMIT";

#[derive(Debug)]
pub enum CliError {
    Core(nbcrit::Error),
    Usage(String),
    Io(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => match e.kind() {
                nbcrit::ErrorKind::Capability => 3,
                _ => 2,
            },
            CliError::Usage(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}

impl Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Io(e) => write!(f, "{e:#}"),
        }
    }
}

impl From<nbcrit::Error> for CliError {
    fn from(e: nbcrit::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.into())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}

pub type CmdResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// One emitted file. `name` is the file name inside an output directory,
/// or the suffix appended to `--out` for secondary files.
#[derive(Debug, Clone)]
pub struct Artifact {
    pub name: String,
    pub content: String,
}

#[derive(Debug, Clone)]
pub struct Product {
    /// The first artifact is the primary output.
    pub artifacts: Vec<Artifact>,
    pub table_limit: usize,
    pub quadrature: Option<QuadratureConfig64>,
}

impl Product {
    fn single(name: &str, content: String, table_limit: usize, quadrature: Option<QuadratureConfig64>) -> Self {
        Self {
            artifacts: vec![Artifact {
                name: name.to_string(),
                content,
            }],
            table_limit,
            quadrature,
        }
    }

    fn with(mut self, name: &str, content: String) -> Self {
        self.artifacts.push(Artifact {
            name: name.to_string(),
            content,
        });
        self
    }
}

pub struct Context {
    pub table_limit: Option<usize>,
}

impl Context {
    /// Table from `--table-limit`, else the environment, else `needed`.
    fn table(&self, needed: usize) -> CmdResult<(MoebiusTable, usize)> {
        let limit = match self.table_limit {
            Some(l) => l,
            None => match std::env::var(TABLE_ENV) {
                Ok(v) => v
                    .trim()
                    .parse::<usize>()
                    .map_err(|e| usage(format!("{TABLE_ENV}: cannot parse '{v}' as an integer: {e}")))?,
                Err(_) => needed,
            },
        }
        .max(1);
        Ok((MoebiusTable::sieve(limit)?, limit))
    }
}

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

struct Csv(String);

impl Csv {
    fn new(header: &[&str]) -> Self {
        Csv(header.join(",") + "\n")
    }

    fn row<I: IntoIterator<Item = String>>(&mut self, cells: I) {
        let cells: Vec<String> = cells.into_iter().collect();
        self.0.push_str(&cells.join(","));
        self.0.push('\n');
    }

    fn done(self) -> String {
        self.0
    }
}

fn pretty<S: Serialize + ?Sized>(v: &S) -> CmdResult<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

/// `start:stop:count` with an optional `:log` suffix.
pub fn parse_grid(flag: &str, text: &str) -> CmdResult<Vec<f64>> {
    let bad = |why: String| usage(format!("--{flag}: {why} (expected start:stop:count[:log], got '{text}')"));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 && parts.len() != 4 {
        return Err(bad("wrong number of fields".into()));
    }
    let start: f64 = parts[0].trim().parse().map_err(|e| bad(format!("start: {e}")))?;
    let stop: f64 = parts[1].trim().parse().map_err(|e| bad(format!("stop: {e}")))?;
    let count: usize = parts[2].trim().parse().map_err(|e| bad(format!("count: {e}")))?;
    let log = match parts.get(3).map(|s| s.trim()) {
        None => false,
        Some("log") => true,
        Some(other) => return Err(bad(format!("unknown spacing '{other}'"))),
    };
    if !start.is_finite() || !stop.is_finite() {
        return Err(bad("endpoints must be finite".into()));
    }
    if count == 0 {
        return Err(bad("count must be positive".into()));
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    if log {
        if !(start > 0.0 && stop > 0.0) {
            return Err(bad("log spacing needs positive endpoints".into()));
        }
        return Ok(log_grid(start, stop, count));
    }
    let step = (stop - start) / (count - 1) as f64;
    let mut g: Vec<f64> = (0..count).map(|i| start + step * i as f64).collect();
    g[count - 1] = stop;
    Ok(g)
}

pub fn quadrature(q: &QuadArgs) -> CmdResult<QuadratureConfig64> {
    let mut c = QuadratureConfig64::default()
        .with_x_min(q.x_min)
        .with_order(q.order)
        .with_tail_mode(match q.tail_mode {
            TailArg::Exact => TailMode::ExactOneOverX,
            TailArg::Numeric => TailMode::Numeric,
        });
    c.max_panels = q.max_panels;
    c.validate()?;
    Ok(c)
}

fn parse_kind(kind: &str) -> CmdResult<ApproximantKind> {
    kind.parse::<ApproximantKind>()
        .map_err(|_| usage(format!("--kind: unknown approximant '{kind}' (natural, selberg, regularized, regularized_limit)")))
}

pub fn spec_of(s: &SpecArgs) -> CmdResult<ApproximantSpec64> {
    Ok(ApproximantSpec64::from_parts(parse_kind(&s.kind)?, s.n, s.eps)?)
}

/// Table size a quadrature over `[x_min, ∞)` needs for `spec`.
fn needed_for(spec: &ApproximantSpec64, x_min: f64) -> usize {
    if spec.is_finite_sum() {
        spec.n
    } else {
        reciprocal_limit(x_min) as usize
    }
}

fn zeta_engine() -> CmdResult<ZetaEngine64> {
    Ok(ZetaEngine64::new(ZETA_TARGET)?)
}

pub fn dispatch(cmd: &Command, ctx: &Context) -> CmdResult<Product> {
    match cmd {
        Command::Sieve(a) => sieve(a),
        Command::Zeta(a) => zeta(a),
        Command::Eval(a) => eval(a, ctx),
        Command::Distance(a) => distance(a, ctx),
        Command::Mellin(a) => mellin(a, ctx),
        Command::Lemma(a) => lemma(a, ctx),
        Command::Report(a) => report(a, ctx),
        Command::Replay(_) => Err(usage("replay cannot be dispatched as a computation")),
    }
}

fn sieve(a: &SieveArgs) -> CmdResult<Product> {
    if a.limit == 0 {
        return Err(usage("--limit must be at least 1"));
    }
    let t = MoebiusTable::sieve(a.limit)?;
    let mut csv = Csv::new(&["n", "mu", "mertens"]);
    for n in 1..=a.limit {
        csv.row([n.to_string(), t.mu(n).to_string(), t.mertens(n)?.to_string()]);
    }
    Ok(Product::single("sieve.csv", csv.done(), a.limit, None))
}

#[derive(Serialize)]
struct ZetaRow {
    sigma: f64,
    tau: f64,
    re: f64,
    im: f64,
    abs_error_bound: f64,
    rounding_estimate: f64,
}

fn zeta(a: &ZetaArgs) -> CmdResult<Product> {
    let engine = match a.function {
        SpecialFunction::Zeta => Some(ZetaEngine64::new(a.target)?),
        SpecialFunction::LogGamma => None,
    };
    let mut rows = Vec::new();
    for &sigma in &a.sigma {
        for &tau in &a.tau {
            let p = ComplexPoint64::new(sigma, tau)?;
            let v = match &engine {
                Some(z) => z.zeta(p)?,
                None => log_gamma(p)?,
            };
            rows.push(ZetaRow {
                sigma,
                tau,
                re: v.value.re,
                im: v.value.im,
                abs_error_bound: v.abs_error_bound,
                rounding_estimate: v.rounding_estimate,
            });
        }
    }
    let content = match a.format {
        Format::Json => pretty(&rows)?,
        Format::Csv => {
            let mut csv = Csv::new(&["sigma", "tau", "re", "im", "abs_error_bound", "rounding_estimate"]);
            for r in &rows {
                csv.row([r.sigma, r.tau, r.re, r.im, r.abs_error_bound, r.rounding_estimate].map(num));
            }
            csv.done()
        }
    };
    Ok(Product::single("zeta", content, 0, None))
}

fn eval(a: &EvalArgs, ctx: &Context) -> CmdResult<Product> {
    let spec = spec_of(&a.spec)?;
    let xs = parse_grid("x-grid", &a.x_grid)?;
    let needed = if spec.is_finite_sum() {
        spec.n
    } else {
        let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
        if !(lo > 0.0) {
            return Err(usage("--x-grid: points must be positive"));
        }
        (1.0 / lo).floor().min(usize::MAX as f64) as usize
    };
    let (table, limit) = ctx.table(needed)?;
    let z = zeta_engine()?;
    let mut csv = Csv::new(&["x", "value"]);
    for &x in &xs {
        csv.row([num(x), num(evaluate(&spec, x, &table, &z)?)]);
    }
    Ok(Product::single("eval.csv", csv.done(), limit, None))
}

/// Reports of a distance sweep plus the axis each one sits on.
struct DistanceSweep {
    eps_axis: bool,
    reports: Vec<DistanceReport64>,
}

fn distance_csv(sweep: &DistanceSweep) -> String {
    let mut csv = Csv::new(&["n_or_eps", "distance", "error_estimate", "normalized"]);
    for r in &sweep.reports {
        let (axis, normalized) = if sweep.eps_axis {
            (num(r.spec.eps), r.distance / r.spec.eps)
        } else {
            (r.spec.n.to_string(), r.distance * (r.spec.n as f64).ln().sqrt())
        };
        csv.row([axis, num(r.distance), num(r.error_estimate), num(normalized)]);
    }
    csv.done()
}

fn distance(a: &DistanceArgs, ctx: &Context) -> CmdResult<Product> {
    let kind = parse_kind(&a.kind)?;
    let cfg = quadrature(&a.quad)?;
    if a.n.is_empty() || a.eps.is_empty() {
        return Err(usage("--n and --eps need at least one value"));
    }
    if a.n.len() > 1 && a.eps.len() > 1 {
        return Err(usage("--n and --eps cannot both be sweeps"));
    }
    let specs: Vec<ApproximantSpec64> = if a.eps.len() > 1 {
        a.eps
            .iter()
            .map(|&e| ApproximantSpec64::from_parts(kind, a.n[0], e))
            .collect::<nbcrit::Result<_>>()?
    } else {
        a.n.iter()
            .map(|&n| ApproximantSpec64::from_parts(kind, n, a.eps[0]))
            .collect::<nbcrit::Result<_>>()?
    };
    let needed = specs.iter().map(|s| needed_for(s, cfg.x_min)).max().unwrap_or(1);
    let (table, limit) = ctx.table(needed)?;
    let z = zeta_engine()?;
    let reports = specs
        .iter()
        .map(|s| panel_integrate(s, true, &cfg, &table, &z))
        .collect::<nbcrit::Result<Vec<_>>>()?;
    let sweep = DistanceSweep {
        eps_axis: a.eps.len() > 1 || kind == ApproximantKind::RegularizedLimit,
        reports,
    };
    let content = match a.format {
        Format::Json if sweep.reports.len() == 1 => pretty(&sweep.reports[0])?,
        Format::Json => pretty(&sweep.reports)?,
        Format::Csv => distance_csv(&sweep),
    };
    Ok(Product::single("distance", content, limit, Some(cfg)))
}

fn provenance_label(p: &Provenance<f64>) -> String {
    match p {
        Provenance::NumericIntegral {
            x_lo,
            x_hi,
            head_corrected,
        } => format!(
            "numeric(x_lo={x_lo:e};x_hi={};head_corrected={head_corrected})",
            x_hi.map(|x| format!("{x:e}")).unwrap_or_else(|| "inf".into())
        ),
        Provenance::ClosedForm { formula } => {
            let name = serde_json::to_value(formula)
                .ok()
                .and_then(|v| v.as_str().map(str::to_owned))
                .unwrap_or_default();
            format!("closed({name})")
        }
    }
}

fn closed_sample(
    spec: &ApproximantSpec64,
    w: f64,
    tau: f64,
    table: &MoebiusTable,
    z: &ZetaEngine64,
) -> CmdResult<MellinSample64> {
    if spec.is_finite_sum() {
        return Ok(mellin_closed(spec, w, tau, table, z)?);
    }
    if (2.0 * w - spec.eps).abs() <= 4.0 * f64::EPSILON * spec.eps {
        return Ok(mellin_limit(w, tau, z)?);
    }
    Err(usage(format!(
        "--weight-eps: the closed form of the limit approximant needs weight eps/2 = {}",
        spec.eps / 2.0
    )))
}

fn mellin(a: &MellinArgs, ctx: &Context) -> CmdResult<Product> {
    let spec = spec_of(&a.spec)?;
    let cfg = quadrature(&a.quad)?;
    let taus = parse_grid("tau-grid", &a.tau_grid)?;
    let (table, limit) = ctx.table(needed_for(&spec, cfg.x_min))?;
    let z = zeta_engine()?;
    let mut csv = Csv::new(&["tau", "re", "im", "abs", "error_estimate", "provenance"]);
    let mut push = |m: &MellinSample64| {
        csv.row([
            num(m.tau),
            num(m.value.re),
            num(m.value.im),
            num(m.value.norm()),
            num(m.error_estimate),
            provenance_label(&m.provenance),
        ])
    };
    for &tau in &taus {
        if matches!(a.mode, MellinMode::Numeric | MellinMode::Both) {
            push(&mellin_numeric(&spec, a.weight_eps, tau, &cfg, &table, &z)?);
        }
        if matches!(a.mode, MellinMode::Closed | MellinMode::Both) {
            push(&closed_sample(&spec, a.weight_eps, tau, &table, &z)?);
        }
    }
    Ok(Product::single("mellin.csv", csv.done(), limit, Some(cfg)))
}

fn sweep_config(s: &SweepArgs, eps: Option<&Vec<f64>>, default_n: &[usize]) -> CmdResult<LemmaSweepConfig64> {
    let mut tau_grid = parse_grid("tau-grid", &s.tau_grid)?;
    if s.with_zero && tau_grid.first() != Some(&0.0) {
        tau_grid.insert(0, 0.0);
    }
    let base = LemmaSweepConfig64::default();
    Ok(LemmaSweepConfig64 {
        alpha: s.alpha,
        delta: s.delta,
        eps_exponent: s.eps_exponent,
        eps0: s.eps0,
        eps_grid: eps.or(s.eps_grid.as_ref()).cloned().unwrap_or(base.eps_grid),
        sigma_grid: s.sigma_grid.clone(),
        tau_grid,
        n_list: s.n_list.clone().unwrap_or_else(|| default_n.to_vec()),
    })
}

const BS_ORDERS: [usize; 3] = [100, 1000, 10_000];
const CAUCHY_ORDERS: [usize; 4] = [10, 20, 40, 80];
const CAUCHY_EPS: [f64; 3] = [0.0, 0.1, 0.25];

fn sweep_csv(rows: &[BoundSweepReport64]) -> String {
    let mut csv = Csv::new(&["eps", "sigma", "tau", "n", "measured", "majorant", "ratio"]);
    for r in rows {
        let g = &r.grid_point;
        csv.row([
            opt_num(g.eps),
            opt_num(g.sigma),
            num(g.tau),
            g.n.map(|n| n.to_string()).unwrap_or_default(),
            num(r.measured),
            num(r.majorant),
            num(r.ratio),
        ]);
    }
    csv.done()
}

/// Series label used in plot file names, e.g. `eps_0.1`.
fn label(parts: &[(&str, String)]) -> String {
    parts.iter().map(|(k, v)| format!("{k}_{v}")).collect::<Vec<_>>().join("_")
}

fn two_column(x: &str, y: &str, points: impl IntoIterator<Item = (f64, f64)>) -> String {
    let mut csv = Csv::new(&[x, y]);
    for (a, b) in points {
        csv.row([num(a), num(b)]);
    }
    csv.done()
}

struct SweepOutput {
    csv: String,
    summary: serde_json::Value,
    /// `(series label, tau-ratio plot)`.
    plots: Vec<(String, String)>,
    table_limit: usize,
    quadrature: Option<QuadratureConfig64>,
}

fn zratio_run(cfg: &LemmaSweepConfig64) -> CmdResult<SweepOutput> {
    let rows = zratio_bound_sweep(cfg)?;
    let summary = json!({ "which": "zratio", "per_eps": zratio_summary(&rows) });
    let plots = cfg
        .eps_grid
        .iter()
        .map(|&e| {
            let pts = rows
                .iter()
                .filter(|r| r.grid_point.eps == Some(e))
                .map(|r| (r.grid_point.tau, r.ratio));
            (label(&[("eps", e.to_string())]), two_column("tau", "ratio", pts))
        })
        .collect();
    Ok(SweepOutput {
        csv: sweep_csv(&rows),
        summary,
        plots,
        table_limit: 0,
        quadrature: None,
    })
}

fn bs_run(cfg: &LemmaSweepConfig64, ctx: &Context) -> CmdResult<SweepOutput> {
    let needed = cfg.n_list.iter().copied().max().unwrap_or(1);
    let (table, limit) = ctx.table(needed)?;
    let rows = balazard_saias_error(cfg, &table, &zeta_engine()?)?;
    let mut series = Vec::new();
    let mut plots = Vec::new();
    for &sigma in &cfg.sigma_grid {
        for &n in &cfg.n_list {
            let sel: Vec<&BoundSweepReport64> = rows
                .iter()
                .filter(|r| r.grid_point.sigma == Some(sigma) && r.grid_point.n == Some(n))
                .collect();
            let sup = sel.iter().map(|r| r.ratio).fold(0.0, f64::max);
            let (xs, ys): (Vec<f64>, Vec<f64>) = sel
                .iter()
                .filter(|r| r.grid_point.tau >= 1.0 && r.ratio > 0.0)
                .map(|r| (r.grid_point.tau.ln(), r.ratio.ln()))
                .unzip();
            series.push(json!({
                "sigma": sigma,
                "n": n,
                "sup_ratio": sup,
                "trend_slope": ls_slope(&xs, &ys),
            }));
            plots.push((
                label(&[("sigma", sigma.to_string()), ("n", n.to_string())]),
                two_column("tau", "ratio", sel.iter().map(|r| (r.grid_point.tau, r.ratio))),
            ));
        }
    }
    let sup = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let summary = json!({
        "which": "bs",
        "hypothesis": format!(
            "assumes zeta(s) has no zeros with real part above alpha = {}; the sweep measures, it does not verify this",
            cfg.alpha
        ),
        "alpha": cfg.alpha,
        "delta": cfg.delta,
        "eps_exponent": cfg.eps_exponent,
        "sup_ratio": sup,
        "per_series": series,
    });
    Ok(SweepOutput {
        csv: sweep_csv(&rows),
        summary,
        plots,
        table_limit: limit,
        quadrature: None,
    })
}

fn cauchy_run(eps_list: &[f64], n_list: &[usize], quad: &QuadratureConfig64, ctx: &Context) -> CmdResult<SweepOutput> {
    let needed = n_list.iter().copied().max().unwrap_or(1);
    let (table, limit) = ctx.table(needed)?;
    let mut csv = Csv::new(&["eps", "m", "n", "increment", "error_estimate"]);
    let mut per_eps = Vec::new();
    let mut plots = Vec::new();
    for &e in eps_list {
        let inc = f_eps_n_cauchy(e, n_list, quad, &table)?;
        for c in &inc {
            csv.row([num(e), c.m.to_string(), c.n.to_string(), num(c.increment), num(c.error_estimate)]);
        }
        let trend = cauchy_trend(&inc);
        per_eps.push(json!({
            "eps": e,
            "strictly_decreasing": trend.strictly_decreasing,
            "loglog_slope": trend.loglog_slope,
        }));
        plots.push((
            label(&[("eps", e.to_string())]),
            two_column("m", "increment", inc.iter().map(|c| (c.m as f64, c.increment))),
        ));
    }
    Ok(SweepOutput {
        csv: csv.done(),
        summary: json!({ "which": "cauchy", "per_eps": per_eps }),
        plots,
        table_limit: limit,
        quadrature: Some(*quad),
    })
}

fn lemma(a: &LemmaArgs, ctx: &Context) -> CmdResult<Product> {
    let out = match a.which {
        LemmaWhich::Zratio => zratio_run(&sweep_config(&a.sweep, None, &BS_ORDERS)?)?,
        LemmaWhich::Bs => bs_run(&sweep_config(&a.sweep, None, &BS_ORDERS)?, ctx)?,
        LemmaWhich::Cauchy => {
            let eps = a.sweep.eps_grid.clone().unwrap_or_else(|| CAUCHY_EPS.to_vec());
            let n_list = a.sweep.n_list.clone().unwrap_or_else(|| CAUCHY_ORDERS.to_vec());
            cauchy_run(&eps, &n_list, &quadrature(&a.quad)?, ctx)?
        }
    };
    Ok(Product::single("lemma.csv", out.csv, out.table_limit, out.quadrature).with("summary.json", pretty(&out.summary)?))
}

const EPS_SWEEP: [f64; 4] = [0.4, 0.2, 0.1, 0.05];
const POINTWISE_X: [f64; 3] = [0.3, 0.7, 1.5];
const POINTWISE_EPS: [f64; 4] = [0.1, 0.05, 0.02, 0.01];
/// Largest max/min ratio of the fitted pointwise constants that still
/// counts as stable.
pub const K_STABILITY: f64 = 1.25;
const SLOW_BOUND_ORDERS: [usize; 5] = [1, 2, 10, 100, 1000];

/// Experiment files: the main CSV first, then `summary.json`, then plots.
fn experiment(
    exp: Experiment,
    csv: String,
    summary: serde_json::Value,
    plots: Vec<(String, String)>,
    table_limit: usize,
    quadrature: Option<QuadratureConfig64>,
) -> CmdResult<Product> {
    let mut p = Product::single(&format!("{}.csv", exp.name()), csv, table_limit, quadrature)
        .with("summary.json", pretty(&summary)?);
    if plots.len() == 1 {
        p = p.with("plot.csv", plots.into_iter().next().unwrap().1);
    } else {
        for (series, content) in plots {
            p = p.with(&format!("plot_{series}.csv"), content);
        }
    }
    Ok(p)
}

fn report(a: &ReportArgs, ctx: &Context) -> CmdResult<Product> {
    let exp = a.experiment;
    match exp {
        Experiment::EpsSweep => {
            let cfg = quadrature(&a.quad)?;
            let eps = a.eps.clone().unwrap_or_else(|| EPS_SWEEP.to_vec());
            let first = *eps.first().ok_or_else(|| usage("--eps needs at least one value"))?;
            let fixed = ApproximantSpec64::regularized_limit(first);
            let (table, limit) = ctx.table(needed_for(&fixed, cfg.x_min))?;
            let z = zeta_engine()?;
            let curve = convergence_curve(&CurveGrid::EpsToZero(eps.clone()), &fixed, &cfg, &table, &z)?;
            let monotone = curve
                .windows(2)
                .all(|w| w[1].distance <= w[0].distance + 2.0 * (w[0].error_estimate + w[1].error_estimate));
            let mut pointwise = Vec::new();
            let mut stability = Vec::new();
            for &x in &POINTWISE_X {
                let mut ks = Vec::new();
                for &e in &POINTWISE_EPS {
                    let diff = (f_eps(e, x, &table, &z)? + chi(x)).abs();
                    ks.push(diff / e);
                    pointwise.push(json!({ "x": x, "eps": e, "abs_difference": diff, "k": diff / e }));
                }
                let hi = ks.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let lo = ks.iter().copied().fold(f64::INFINITY, f64::min);
                stability.push(json!({ "x": x, "k_max": hi, "k_min": lo, "spread": hi / lo }));
            }
            let k_stable = stability
                .iter()
                .all(|s| s["spread"].as_f64().is_some_and(|v| v <= K_STABILITY));
            let sweep = DistanceSweep {
                eps_axis: true,
                reports: curve,
            };
            let plot = two_column("eps", "distance", sweep.reports.iter().map(|r| (r.spec.eps, r.distance)));
            let summary = json!({
                "experiment": exp.name(),
                "monotone_nonincreasing": monotone,
                "pointwise": pointwise,
                "k_stability": stability,
                "k_stability_tolerance": K_STABILITY,
                "k_stable": k_stable,
            });
            experiment(exp, distance_csv(&sweep), summary, vec![("distance".into(), plot)], limit, Some(cfg))
        }
        Experiment::NCauchy => {
            let cfg = quadrature(&a.quad)?;
            let eps = a.eps.clone().unwrap_or_else(|| CAUCHY_EPS.to_vec());
            let n_list = a.sweep.n_list.clone().unwrap_or_else(|| CAUCHY_ORDERS.to_vec());
            let out = cauchy_run(&eps, &n_list, &cfg, ctx)?;
            let mut summary = out.summary;
            summary["experiment"] = json!(exp.name());
            experiment(exp, out.csv, summary, out.plots, out.table_limit, out.quadrature)
        }
        Experiment::SlowBound => {
            let cfg = quadrature(&a.quad)?;
            let n_list = a.sweep.n_list.clone().unwrap_or_else(|| SLOW_BOUND_ORDERS.to_vec());
            let needed = n_list.iter().copied().max().unwrap_or(1);
            let (table, limit) = ctx.table(needed)?;
            let rows = slow_bound_report(&n_list, &cfg, &table)?;
            let mut csv = Csv::new(&["n", "distance", "error_estimate", "normalized"]);
            for r in &rows {
                csv.row([r.n.to_string(), num(r.distance), num(r.error_estimate), num(r.normalized)]);
            }
            let witness = rows
                .iter()
                .filter(|r| r.n >= 2)
                .map(|r| r.normalized)
                .fold(f64::INFINITY, f64::min);
            let summary = json!({
                "experiment": exp.name(),
                "witness_constant": if witness.is_finite() { json!(witness) } else { json!(null) },
                "positive": witness.is_finite() && witness > 0.0,
            });
            let plot = two_column("n", "normalized", rows.iter().map(|r| (r.n as f64, r.normalized)));
            experiment(exp, csv.done(), summary, vec![("normalized".into(), plot)], limit, Some(cfg))
        }
        Experiment::Plancherel => {
            let cfg = quadrature(&a.quad)?;
            let w = a.weight_eps;
            let spec = ApproximantSpec64::regularized(2.0 * w, a.n);
            spec.validate()?;
            let (table, limit) = ctx.table(a.n)?;
            let z = zeta_engine()?;
            let reports = (0..=a.doublings)
                .map(|k| plancherel_check(&spec, w, a.t_max * (1u64 << k.min(62)) as f64, a.tau_step, &cfg, &table, &z))
                .collect::<nbcrit::Result<Vec<_>>>()?;
            let mut csv = Csv::new(&[
                "tau_limit",
                "h_norm",
                "h_error",
                "k_norm",
                "k_error",
                "k_tail_estimate",
                "defect",
                "relative_defect",
            ]);
            for r in &reports {
                csv.row([
                    r.tau_limit,
                    r.h_norm,
                    r.h_error,
                    r.k_norm,
                    r.k_error,
                    r.k_tail_estimate,
                    r.defect,
                    r.defect / r.h_norm,
                ]
                .map(num));
            }
            let positive = reports.iter().all(|r| r.defect > 0.0);
            let decreasing = reports.windows(2).all(|p| p[1].defect < p[0].defect);
            let max_rel = reports.iter().map(|r| r.defect.abs() / r.h_norm).fold(0.0, f64::max);
            let summary = json!({
                "experiment": exp.name(),
                "spec": spec,
                "weight_eps": w,
                "defect_positive": positive,
                "defect_decreasing": decreasing,
                "max_relative_defect": max_rel,
                "within_two_percent": max_rel < 0.02,
            });
            let plot = two_column("tau_limit", "k_norm", reports.iter().map(|r| (r.tau_limit, r.k_norm)));
            experiment(exp, csv.done(), summary, vec![("k_norm".into(), plot)], limit, Some(cfg))
        }
        Experiment::Zratio => {
            let out = zratio_run(&sweep_config(&a.sweep, a.eps.as_ref(), &BS_ORDERS)?)?;
            let mut summary = out.summary;
            summary["experiment"] = json!(exp.name());
            experiment(exp, out.csv, summary, out.plots, out.table_limit, out.quadrature)
        }
        Experiment::Bs => {
            let out = bs_run(&sweep_config(&a.sweep, a.eps.as_ref(), &BS_ORDERS)?, ctx)?;
            let mut summary = out.summary;
            summary["experiment"] = json!(exp.name());
            experiment(exp, out.csv, summary, out.plots, out.table_limit, out.quadrature)
        }
    }
}
