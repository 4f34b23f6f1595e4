//! Seasonal ARUMA model specification.
//!
//! `U_s(B^s) U(B) phi_s(B^s) phi(B) Y_t = theta_s(B^s) theta(B) e_t`, where
//! `U` and `U_s` carry every root on the unit circle and the remaining
//! polynomials have all roots outside it.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pacf::{factor_pacf, pacf_to_coeffs, PacfError, PacfSeq};
use crate::poly::{FilterPoly, PolyError, UnitPoint, DEFAULT_TOL};
use crate::rootloc::{stability, Stability};

/// Tolerance on `|root| - 1` for unit-root factors.
pub const UNIT_CIRCLE_TOL: f64 = 1e-6;
/// Distance below which an AR root and an MA root count as common.
pub const COMMON_ROOT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("seasonal period must be at least 1")]
    ZeroSeason,
    #[error("innovation variance must be finite and non-negative, got {0}")]
    InvalidSigma2(f64),
    #[error("{component} pacf contains unit pins; only autoregressive sides may be pinned")]
    PinnedMa { component: Component },
    #[error("invalid model: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error(transparent)]
    Pacf(#[from] PacfError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Component {
    #[serde(rename = "U")]
    U,
    #[serde(rename = "U_s")]
    Us,
    #[serde(rename = "phi")]
    Phi,
    #[serde(rename = "phi_s")]
    PhiS,
    #[serde(rename = "theta")]
    Theta,
    #[serde(rename = "theta_s")]
    ThetaS,
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Component::U => "U",
            Component::Us => "U_s",
            Component::Phi => "phi",
            Component::PhiS => "phi_s",
            Component::Theta => "theta",
            Component::ThetaS => "theta_s",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    UnitFactorOffCircle {
        component: Component,
        factor: usize,
        root: Complex64,
    },
    RootOnCircle {
        component: Component,
        root: Option<Complex64>,
    },
    RootInside {
        component: Component,
        root: Option<Complex64>,
    },
    CommonRoot {
        root: Complex64,
    },
    InvalidSeason,
    InvalidSigma2 {
        value: f64,
    },
}

fn fmt_root(z: &Complex64) -> String {
    if z.im.abs() < 1e-12 {
        format!("{}", z.re)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnitFactorOffCircle {
                component,
                factor,
                root,
            } => write!(
                f,
                "{component} factor {factor} has root {} off the unit circle",
                fmt_root(root)
            ),
            Violation::RootOnCircle { component, root } => match root {
                Some(z) => write!(
                    f,
                    "{component} has root on unit circle at z = {}",
                    fmt_root(z)
                ),
                None => write!(f, "{component} has root on unit circle"),
            },
            Violation::RootInside { component, root } => match root {
                Some(z) => write!(
                    f,
                    "{component} has root inside unit circle at z = {}",
                    fmt_root(z)
                ),
                None => write!(f, "{component} has root inside unit circle"),
            },
            Violation::CommonRoot { root } => write!(f, "common root at z = {}", fmt_root(root)),
            Violation::InvalidSeason => f.write_str("seasonal period must be at least 1"),
            Violation::InvalidSigma2 { value } => {
                write!(
                    f,
                    "innovation variance {value} is not finite and non-negative"
                )
            }
        }
    }
}

/// Component polynomials of a seasonal ARUMA model.
///
/// `U` and `U_s` are kept as ordered factor lists; seasonal polynomials are
/// stored before substitution of `z^s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SarumaSpec {
    pub s: usize,
    pub sigma2: f64,
    #[serde(rename = "U", default)]
    pub u: Vec<FilterPoly>,
    #[serde(rename = "U_s", default)]
    pub u_s: Vec<FilterPoly>,
    #[serde(default = "FilterPoly::identity")]
    pub phi: FilterPoly,
    #[serde(default = "FilterPoly::identity")]
    pub phi_s: FilterPoly,
    #[serde(default = "FilterPoly::identity")]
    pub theta: FilterPoly,
    #[serde(default = "FilterPoly::identity")]
    pub theta_s: FilterPoly,
}

impl SarumaSpec {
    pub fn white_noise(s: usize, sigma2: f64) -> Self {
        Self {
            s,
            sigma2,
            u: Vec::new(),
            u_s: Vec::new(),
            phi: FilterPoly::identity(),
            phi_s: FilterPoly::identity(),
            theta: FilterPoly::identity(),
            theta_s: FilterPoly::identity(),
        }
    }

    pub fn unit_product(&self) -> FilterPoly {
        FilterPoly::product(&self.u)
    }

    pub fn seasonal_unit_product(&self) -> FilterPoly {
        FilterPoly::product(&self.u_s)
    }

    /// `d + s * d_s`.
    pub fn nonstationary_degree(&self) -> usize {
        self.unit_product().degree() + self.s * self.seasonal_unit_product().degree()
    }

    /// Stationary AR side `phi_s(z^s) phi(z)`.
    pub fn stationary_ar(&self) -> Result<FilterPoly, PolyError> {
        Ok(self.phi_s.embed_season(self.s)?.mul(&self.phi))
    }

    /// MA side `theta_s(z^s) theta(z)`.
    pub fn ma_full(&self) -> Result<FilterPoly, PolyError> {
        Ok(self.theta_s.embed_season(self.s)?.mul(&self.theta))
    }

    /// Multiplies out every component without checking the model invariants.
    pub fn expand_unvalidated(&self) -> Result<ExpandedModel, PolyError> {
        let unit = self
            .seasonal_unit_product()
            .embed_season(self.s)?
            .mul(&self.unit_product());
        Ok(ExpandedModel {
            ar_full: unit.mul(&self.stationary_ar()?),
            ma_full: self.ma_full()?,
            nonstationary_degree: self.nonstationary_degree(),
        })
    }
}

/// Flat ARUMA form `a(B) Y_t = m(B) e_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpandedModel {
    pub ar_full: FilterPoly,
    pub ma_full: FilterPoly,
    pub nonstationary_degree: usize,
}

impl ExpandedModel {
    /// A model from its two sides; the unit-root degree is counted by deflation at `+-1` only.
    pub fn new(ar_full: FilterPoly, ma_full: FilterPoly) -> Self {
        let nonstationary_degree = ar_full.unit_multiplicity(UnitPoint::Plus, DEFAULT_TOL)
            + ar_full.unit_multiplicity(UnitPoint::Minus, DEFAULT_TOL);
        Self {
            ar_full,
            ma_full,
            nonstationary_degree,
        }
    }

    pub fn white_noise() -> Self {
        Self::new(FilterPoly::identity(), FilterPoly::identity())
    }
}

pub fn expand(spec: &SarumaSpec) -> Result<ExpandedModel, ModelError> {
    let violations = validate(spec);
    if !violations.is_empty() {
        return Err(ModelError::Invalid(violations));
    }
    Ok(spec.expand_unvalidated()?)
}

/// Checks every model invariant; an empty list means the spec is valid.
pub fn validate(spec: &SarumaSpec) -> Vec<Violation> {
    let mut out = Vec::new();
    if spec.s == 0 {
        out.push(Violation::InvalidSeason);
    }
    if !(spec.sigma2.is_finite() && spec.sigma2 >= 0.0) {
        out.push(Violation::InvalidSigma2 { value: spec.sigma2 });
    }
    for (component, factors) in [(Component::U, &spec.u), (Component::Us, &spec.u_s)] {
        for (i, factor) in factors.iter().enumerate() {
            if let Some(root) = off_circle_root(factor) {
                out.push(Violation::UnitFactorOffCircle {
                    component,
                    factor: i,
                    root,
                });
            }
        }
    }
    for (component, poly) in [
        (Component::Phi, &spec.phi),
        (Component::PhiS, &spec.phi_s),
        (Component::Theta, &spec.theta),
        (Component::ThetaS, &spec.theta_s),
    ] {
        if let Some(v) = stationarity_violation(component, poly) {
            out.push(v);
        }
    }
    if spec.s >= 1 {
        if let (Ok(ar), Ok(ma)) = (spec.stationary_ar(), spec.ma_full()) {
            out.extend(
                common_roots(&ar, &ma)
                    .into_iter()
                    .map(|root| Violation::CommonRoot { root }),
            );
        }
    }
    out
}

// Roots at +-1 are deflated first so repeated real unit roots do not scatter.
fn off_circle_root(factor: &FilterPoly) -> Option<Complex64> {
    let (_, rest) = factor.deflate_unit(UnitPoint::Plus, DEFAULT_TOL);
    let (_, rest) = rest.deflate_unit(UnitPoint::Minus, DEFAULT_TOL);
    if rest.is_identity() {
        return None;
    }
    match rest.roots() {
        Ok(roots) => roots
            .roots()
            .iter()
            .copied()
            .find(|z| (z.norm() - 1.0).abs() > UNIT_CIRCLE_TOL),
        Err(_) => Some(Complex64::new(f64::NAN, f64::NAN)),
    }
}

fn stationarity_violation(component: Component, poly: &FilterPoly) -> Option<Violation> {
    let verdict = stability(poly);
    if verdict.is_stable() {
        return None;
    }
    let root = poly.roots().ok().and_then(|r| {
        r.roots()
            .iter()
            .copied()
            .min_by(|a, b| a.norm().total_cmp(&b.norm()))
    });
    Some(match verdict {
        Stability::OnCircle { .. } => Violation::RootOnCircle { component, root },
        _ => {
            if root.is_some_and(|z| (z.norm() - 1.0).abs() <= UNIT_CIRCLE_TOL) {
                Violation::RootOnCircle { component, root }
            } else {
                Violation::RootInside { component, root }
            }
        }
    })
}

fn common_roots(ar: &FilterPoly, ma: &FilterPoly) -> Vec<Complex64> {
    if ar.is_identity() || ma.is_identity() {
        return Vec::new();
    }
    let (Ok(ar_roots), Ok(ma_roots)) = (ar.roots(), ma.roots()) else {
        return Vec::new();
    };
    ar_roots
        .roots()
        .iter()
        .copied()
        .filter(|a| {
            ma_roots
                .roots()
                .iter()
                .any(|m| (a - m).norm() <= COMMON_ROOT_TOL * a.norm().max(1.0))
        })
        .collect()
}

/// Builds each component polynomial from PACFs. Autoregressive sides are
/// factorised at their pins; the unit factors go to `U` (resp. `U_s`) and the
/// stationary remainder to `phi` (resp. `phi_s`). Moving-average sides are
/// parameterised by unpinned PACFs, which keeps them invertible.
pub fn build_from_pacf(
    ar_pacf: &PacfSeq,
    ma_pacf: &PacfSeq,
    seasonal_ar_pacf: &PacfSeq,
    seasonal_ma_pacf: &PacfSeq,
    s: usize,
    sigma2: f64,
) -> Result<SarumaSpec, ModelError> {
    let spec = assemble_from_pacf(
        ar_pacf,
        ma_pacf,
        seasonal_ar_pacf,
        seasonal_ma_pacf,
        s,
        sigma2,
    )?;
    let violations = validate(&spec);
    if violations.is_empty() {
        Ok(spec)
    } else {
        Err(ModelError::Invalid(violations))
    }
}

pub(crate) fn assemble_from_pacf(
    ar_pacf: &PacfSeq,
    ma_pacf: &PacfSeq,
    seasonal_ar_pacf: &PacfSeq,
    seasonal_ma_pacf: &PacfSeq,
    s: usize,
    sigma2: f64,
) -> Result<SarumaSpec, ModelError> {
    if s == 0 {
        return Err(ModelError::ZeroSeason);
    }
    if !(sigma2.is_finite() && sigma2 >= 0.0) {
        return Err(ModelError::InvalidSigma2(sigma2));
    }
    if ma_pacf.has_pins() {
        return Err(ModelError::PinnedMa {
            component: Component::Theta,
        });
    }
    if seasonal_ma_pacf.has_pins() {
        return Err(ModelError::PinnedMa {
            component: Component::ThetaS,
        });
    }
    let regular = factor_pacf(ar_pacf)?;
    let seasonal = factor_pacf(seasonal_ar_pacf)?;
    Ok(SarumaSpec {
        s,
        sigma2,
        u: regular.unit_factors,
        u_s: seasonal.unit_factors,
        phi: regular.stationary_factor,
        phi_s: seasonal.stationary_factor,
        theta: pacf_to_coeffs(ma_pacf),
        theta_s: pacf_to_coeffs(seasonal_ma_pacf),
    })
}
