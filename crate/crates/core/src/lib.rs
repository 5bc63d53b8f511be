//! Numerics for the Nyman–Beurling approximation problem in `L2(0, ∞)`.
//!
//! The crate evaluates Möbius-weighted sums of the dilated fractional-part
//! functions `ρ_a(x) = {1/(ax)}`, measures their distance to `−χ_(0,1]`,
//! computes their Mellin transforms on the critical line and checks the
//! analytic ingredients (ζ on the critical strip, the functional-equation
//! ratio, partial sums of `Σ μ(a) a^{-s}`) that tie the two sides together.
//!
//! All floating-point code is generic over [`Real`]; the `*64` aliases below
//! fix the scalar to `f64`, which is what the accuracy targets assume.

/// Version of this library, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod approximants;
pub mod arith;
pub mod error;
pub mod l2engine;
pub mod lemmas;
pub mod mellin;
pub mod quadrature;
pub mod scalar;
pub mod special;
pub mod sum;

pub use arith::MoebiusTable;
pub use approximants::{ApproximantKind, ApproximantSpec, Breakpoints, PanelExpansion};
pub use error::{Error, ErrorKind, Result};
pub use l2engine::{CurveGrid, DistanceReport, DistanceTarget, QuadratureConfig, TailMode};
pub use lemmas::{BoundSweepReport, GridPoint, LemmaSweepConfig};
pub use mellin::{MellinFormula, MellinSample, PlancherelReport, Provenance};

pub use scalar::Real;
pub use special::{ComplexPoint, SpecialValue, ZetaEngine};

pub use num_complex::Complex;

pub type Complex64 = Complex<f64>;

pub type ComplexPoint64 = ComplexPoint<f64>;
pub type SpecialValue64 = SpecialValue<f64>;
pub type ZetaEngine64 = ZetaEngine<f64>;

pub type ApproximantSpec64 = ApproximantSpec<f64>;
pub type PanelExpansion64 = PanelExpansion<f64>;
pub type Breakpoints64 = Breakpoints<f64>;
pub type QuadratureConfig64 = QuadratureConfig<f64>;
pub type DistanceReport64 = DistanceReport<f64>;
pub type MellinSample64 = MellinSample<f64>;
pub type PlancherelReport64 = PlancherelReport<f64>;
pub type LemmaSweepConfig64 = LemmaSweepConfig<f64>;
pub type BoundSweepReport64 = BoundSweepReport<f64>;
