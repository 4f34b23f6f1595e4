//! Partial autocorrelation parameterisation of autoregressive filters.
//!
//! The forward Levinson-Durbin recursion maps any PACF sequence, including
//! values pinned at exactly `+1` or `-1`, to a filter polynomial. A pinned
//! value at position `m` makes `1 - P_m(z)` a factor of every later
//! polynomial, with all of its roots on the unit circle. The remaining
//! PACFs, sign-adjusted by `(-1)^{d+}` where `d+` counts the roots at `+1`,
//! generate the cofactor.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dd::Dd;
use crate::poly::{FilterPoly, PolyError, UnitPoint, DEFAULT_TOL};

/// Values within this distance of `+-1` are treated as unit during the inverse recursion.
pub const UNIT_EPS: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PacfError {
    #[error("pacf {index} = {value} must be finite with modulus below 1 unless pinned")]
    InvalidValue { index: usize, value: f64 },
    #[error("pin index {index} outside 1..={len}")]
    PinOutOfRange { index: usize, len: usize },
    #[error("pinned pacf {index} = {value} is not exactly +1 or -1")]
    PinNotUnit { index: usize, value: f64 },
    #[error("pacf {index} is not pinned to a unit value")]
    NotUnitAt { index: usize },
    #[error("unit partial autocorrelation encountered at index {index}")]
    UnitPacfEncountered {
        index: usize,
        /// Recovered values for indices `index..=n`, in natural order.
        partial: Vec<f64>,
    },
    #[error("pacf {index} = {value} has modulus above 1")]
    ExceedsUnit { index: usize, value: f64 },
    #[error("non-finite coefficient during the inverse recursion at order {order}")]
    NonFinite { order: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Serialize, Deserialize)]
struct RawPacfSeq {
    values: Vec<f64>,
    #[serde(default)]
    unit_pins: Vec<usize>,
}

/// PACF values `beta_1..beta_n` with explicit pins marking structural `+-1` values.
///
/// Pin indices are 1-based, matching the usual `beta_k` numbering.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "RawPacfSeq", into = "RawPacfSeq")]
pub struct PacfSeq {
    values: Vec<f64>,
    unit_pins: BTreeSet<usize>,
}

impl PacfSeq {
    pub fn new<I>(values: Vec<f64>, unit_pins: I) -> Result<Self, PacfError>
    where
        I: IntoIterator<Item = usize>,
    {
        let unit_pins: BTreeSet<usize> = unit_pins.into_iter().collect();
        let len = values.len();
        for &index in &unit_pins {
            if index == 0 || index > len {
                return Err(PacfError::PinOutOfRange { index, len });
            }
            let value = values[index - 1];
            if value != 1.0 && value != -1.0 {
                return Err(PacfError::PinNotUnit { index, value });
            }
        }
        for (i, &value) in values.iter().enumerate() {
            let index = i + 1;
            if !unit_pins.contains(&index) && !(value.is_finite() && value.abs() < 1.0) {
                return Err(PacfError::InvalidValue { index, value });
            }
        }
        Ok(Self { values, unit_pins })
    }

    /// A sequence without pins; every value must lie strictly inside `(-1, 1)`.
    pub fn stationary(values: Vec<f64>) -> Result<Self, PacfError> {
        Self::new(values, [])
    }

    /// Pins every value that is exactly `+1` or `-1`.
    pub fn pin_exact_units(values: Vec<f64>) -> Result<Self, PacfError> {
        let pins: Vec<usize> = values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.abs() == 1.0)
            .map(|(i, _)| i + 1)
            .collect();
        Self::new(values, pins)
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// 1-based pin positions in increasing order.
    pub fn unit_pins(&self) -> impl Iterator<Item = usize> + '_ {
        self.unit_pins.iter().copied()
    }

    pub fn is_pinned(&self, index: usize) -> bool {
        self.unit_pins.contains(&index)
    }

    pub fn has_pins(&self) -> bool {
        !self.unit_pins.is_empty()
    }
}

impl TryFrom<RawPacfSeq> for PacfSeq {
    type Error = PacfError;

    fn try_from(raw: RawPacfSeq) -> Result<Self, Self::Error> {
        PacfSeq::new(raw.values, raw.unit_pins)
    }
}

impl From<PacfSeq> for RawPacfSeq {
    fn from(seq: PacfSeq) -> Self {
        RawPacfSeq {
            values: seq.values,
            unit_pins: seq.unit_pins.into_iter().collect(),
        }
    }
}

/// Forward Levinson-Durbin recursion on arbitrary real values.
///
/// `phi_n^{(n)} = beta_n` and `phi_k^{(n)} = phi_k^{(n-1)} - beta_n phi_{n-k}^{(n-1)}`.
/// A trailing zero PACF leaves the polynomial unchanged, so the returned degree
/// is the position of the last nonzero value.
pub fn levinson_forward(values: &[f64]) -> FilterPoly {
    let mut phi: Vec<Dd> = Vec::with_capacity(values.len());
    for &beta in values {
        let b = Dd::from_f64(beta);
        let prev = phi.clone();
        let n = prev.len() + 1;
        for k in 0..n - 1 {
            phi[k] = prev[k] - b * prev[n - 2 - k];
        }
        phi.push(b);
    }
    let mut hi = Vec::with_capacity(phi.len() + 1);
    let mut lo = Vec::with_capacity(phi.len() + 1);
    hi.push(1.0);
    lo.push(0.0);
    for p in &phi {
        let c = -*p;
        hi.push(c.hi);
        lo.push(c.lo);
    }
    FilterPoly::with_low_parts(hi, lo)
}

/// Inverse Levinson-Durbin recursion without restricting `|beta| < 1`.
///
/// The coefficient-to-PACF map is ill-conditioned when several `|beta|` are
/// close to one, so both recursions run in double-double arithmetic.
///
/// Fails with `UnitPacfEncountered` as soon as some `|beta_k|` is within
/// [`UNIT_EPS`] of one, since the step divides by `1 - beta_k^2`.
pub fn reflection_coefficients(p: &FilterPoly) -> Result<Vec<f64>, PacfError> {
    let n = p.degree();
    let lo = p.low_parts();
    let mut phi: Vec<Dd> = (1..=n)
        .map(|k| -Dd::new(p.coeffs()[k], lo.map_or(0.0, |l| l[k])))
        .collect();
    let mut betas = vec![0.0; n];
    for order in (1..=n).rev() {
        let beta = phi[order - 1];
        betas[order - 1] = beta.to_f64();
        if (beta.to_f64().abs() - 1.0).abs() <= UNIT_EPS {
            return Err(PacfError::UnitPacfEncountered {
                index: order,
                partial: betas[order - 1..].to_vec(),
            });
        }
        let denom = (Dd::ONE - beta) * (Dd::ONE + beta);
        let next: Vec<Dd> = (0..order - 1)
            .map(|k| (phi[k] + beta * phi[order - 2 - k]) / denom)
            .collect();
        if next.iter().any(|v| !v.is_finite()) {
            return Err(PacfError::NonFinite { order: order - 1 });
        }
        phi = next;
    }
    Ok(betas)
}

pub fn pacf_to_coeffs(b: &PacfSeq) -> FilterPoly {
    levinson_forward(b.values())
}

/// Recovers the PACFs of a polynomial whose roots all lie off the unit circle
/// and whose PACFs all have modulus below one.
pub fn coeffs_to_pacf(p: &FilterPoly) -> Result<PacfSeq, PacfError> {
    let betas = reflection_coefficients(p)?;
    if let Some((i, &value)) = betas.iter().enumerate().find(|(_, b)| b.abs() > 1.0) {
        return Err(PacfError::ExceedsUnit {
            index: i + 1,
            value,
        });
    }
    PacfSeq::stationary(betas)
}

/// Result of splitting a PACF sequence after a pinned unit value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitSplit {
    pub unit_part: FilterPoly,
    pub adjusted_tail: PacfSeq,
    pub d_plus: usize,
}

/// Splits `b` after the pinned position `m` (1-based).
///
/// `pacf_to_coeffs(b) == unit_part * pacf_to_coeffs(adjusted_tail)`.
///
/// A polynomial whose roots all sit on the unit circle satisfies
/// `z^m f(1/z) = (-1)^{d+} f(z)`, so its leading coefficient `-beta_m` equals
/// `(-1)^{d+}`. The tail sign is taken from that exact identity; `d_plus`
/// itself is counted by deflation.
pub fn split_after_unit(b: &PacfSeq, m: usize) -> Result<UnitSplit, PacfError> {
    if m == 0 || m > b.len() {
        return Err(PacfError::PinOutOfRange {
            index: m,
            len: b.len(),
        });
    }
    if !b.is_pinned(m) {
        return Err(PacfError::NotUnitAt { index: m });
    }
    let values = b.values();
    let unit_part = levinson_forward(&values[..m]);
    let d_plus = unit_part.unit_multiplicity(UnitPoint::Plus, DEFAULT_TOL);
    let sign = -values[m - 1];
    let tail: Vec<f64> = values[m..].iter().map(|v| sign * v).collect();
    let pins = b.unit_pins().filter(|&i| i > m).map(|i| i - m);
    let adjusted_tail = PacfSeq::new(tail, pins)?;
    Ok(UnitSplit {
        unit_part,
        adjusted_tail,
        d_plus,
    })
}

/// Unit-root factors in pin order followed by a stationary remainder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitRootFactorization {
    pub unit_factors: Vec<FilterPoly>,
    pub stationary_factor: FilterPoly,
    /// Running total of `d+` after each split.
    pub d_plus_trace: Vec<usize>,
    pub source: PacfSeq,
}

impl UnitRootFactorization {
    pub fn unit_product(&self) -> FilterPoly {
        FilterPoly::product(&self.unit_factors)
    }

    /// Product of every factor, equal to `pacf_to_coeffs(source)`.
    pub fn product(&self) -> FilterPoly {
        self.unit_product().mul(&self.stationary_factor)
    }

    /// `d+` contributed by each individual split.
    pub fn d_plus_per_split(&self) -> Vec<usize> {
        let mut prev = 0;
        self.d_plus_trace
            .iter()
            .map(|&total| {
                let step = total - prev;
                prev = total;
                step
            })
            .collect()
    }
}

/// Splits at every pin, left to right. Each split's sign adjustment applies
/// to everything after it, so adjustments compose cumulatively.
pub fn factor_pacf(b: &PacfSeq) -> Result<UnitRootFactorization, PacfError> {
    let mut unit_factors = Vec::new();
    let mut d_plus_trace = Vec::new();
    let mut total = 0;
    let mut current = b.clone();
    loop {
        let Some(m) = current.unit_pins().next() else {
            break;
        };
        let split = split_after_unit(&current, m)?;
        total += split.d_plus;
        d_plus_trace.push(total);
        unit_factors.push(split.unit_part);
        current = split.adjusted_tail;
    }
    Ok(UnitRootFactorization {
        unit_factors,
        stationary_factor: pacf_to_coeffs(&current),
        d_plus_trace,
        source: b.clone(),
    })
}
