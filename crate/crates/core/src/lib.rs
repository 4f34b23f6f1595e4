//! Nonstationary autoregressive filters parameterised by partial autocorrelations.
//!
//! Partial autocorrelations (PACFs) with modulus strictly below one generate
//! stable autoregressive polynomials. Allowing selected values to sit exactly
//! at `+1` or `-1` produces polynomials with roots on the unit circle, and the
//! resulting filter factors into unit-root pieces and a stationary remainder.
//! This crate implements those transforms and uses them to build, simulate,
//! filter and estimate seasonal ARUMA models.

pub mod cli;
mod dd;
pub mod fit;
pub mod model;
pub mod nelder_mead;
pub mod pacf;
pub mod poly;
pub mod rootloc;
pub mod series;

pub use fit::{fit, FitOptions, FitReport, FitTemplate, Slot};
pub use model::{build_from_pacf, expand, validate, ExpandedModel, SarumaSpec, Violation};
pub use pacf::{
    coeffs_to_pacf, factor_pacf, pacf_to_coeffs, split_after_unit, PacfError, PacfSeq,
    UnitRootFactorization,
};
pub use poly::{ComplexRootSet, FilterPoly, PolyError, UnitPoint};
pub use rootloc::{count_inside, is_stable, stability, RootLocationReport, Stability};
pub use series::{residuals, simulate, ResidualSet, TimeSeries};
