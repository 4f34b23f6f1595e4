//! Conditional-sum-of-squares estimation in PACF space.
//!
//! Pinned slots stay at `+-1` and generate the unit-root filter; free slots
//! are mapped from the real line into `(-1, 1)` with [`squash`] so an
//! unconstrained simplex search always proposes a valid PACF sequence.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{build_from_pacf, ModelError, SarumaSpec};
use crate::nelder_mead::{minimize, NelderMeadOptions};
use crate::pacf::{PacfError, PacfSeq};
use crate::series::{residuals, SeriesError, TimeSeries};

/// Objective value reported for parameter vectors that do not give a valid model.
pub const SENTINEL: f64 = 1e300;

// Largest f64 strictly below one.
const MAX_INTERIOR: f64 = 1.0 - f64::EPSILON / 2.0;

#[derive(Debug, Error)]
pub enum FitError {
    #[error("template has no free slots")]
    NoFreeSlots,
    #[error("{side} slot {index} is pinned; pins are only allowed on autoregressive sides")]
    PinnedMa { side: Side, index: usize },
    #[error("{side} slot {index} has invalid value {value}")]
    InvalidSlot {
        side: Side,
        index: usize,
        value: f64,
    },
    #[error("seasonal period must be at least 1")]
    ZeroSeason,
    #[error("max_iter must be at least 1")]
    ZeroIterations,
    #[error("unsquash requires |x| < 1, got {0}")]
    OutsideUnitInterval(f64),
    #[error("every start hit an invalid region of the parameter space")]
    AllStartsFailed,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Pacf(#[from] PacfError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Smooth, odd, strictly increasing map from the reals onto `(-1, 1)`.
///
/// `tanh` rounds to `+-1` for large arguments, so the result is clamped to the
/// largest representable value below one.
pub fn squash(u: f64) -> f64 {
    u.tanh().clamp(-MAX_INTERIOR, MAX_INTERIOR)
}

pub fn unsquash(x: f64) -> Result<f64, FitError> {
    if x.is_nan() || x.abs() >= 1.0 {
        return Err(FitError::OutsideUnitInterval(x));
    }
    Ok(x.atanh())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Ar,
    Ma,
    SeasonalAr,
    SeasonalMa,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Ar => "ar",
            Side::Ma => "ma",
            Side::SeasonalAr => "seasonal_ar",
            Side::SeasonalMa => "seasonal_ma",
        })
    }
}

/// One PACF position in a template.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Slot {
    /// Structural unit value, `+1` or `-1`.
    Pinned(f64),
    /// Estimated; the payload is the starting value in `(-1, 1)`.
    Free(f64),
    /// Held at a known value in `(-1, 1)`.
    Fixed(f64),
}

/// Slot layout of a seasonal model, without data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotLayout {
    #[serde(default = "default_season")]
    pub s: usize,
    #[serde(default)]
    pub ar: Vec<Slot>,
    #[serde(default)]
    pub ma: Vec<Slot>,
    #[serde(default)]
    pub seasonal_ar: Vec<Slot>,
    #[serde(default)]
    pub seasonal_ma: Vec<Slot>,
}

fn default_season() -> usize {
    1
}

impl SlotLayout {
    fn sides(&self) -> [(Side, &[Slot]); 4] {
        [
            (Side::Ar, &self.ar),
            (Side::Ma, &self.ma),
            (Side::SeasonalAr, &self.seasonal_ar),
            (Side::SeasonalMa, &self.seasonal_ma),
        ]
    }

    pub fn free_count(&self) -> usize {
        self.sides()
            .iter()
            .flat_map(|(_, slots)| slots.iter())
            .filter(|s| matches!(s, Slot::Free(_)))
            .count()
    }

    fn check(&self) -> Result<(), FitError> {
        if self.s == 0 {
            return Err(FitError::ZeroSeason);
        }
        for (side, slots) in self.sides() {
            for (i, slot) in slots.iter().enumerate() {
                let index = i + 1;
                match *slot {
                    Slot::Pinned(_) if matches!(side, Side::Ma | Side::SeasonalMa) => {
                        return Err(FitError::PinnedMa { side, index })
                    }
                    Slot::Pinned(v) if v != 1.0 && v != -1.0 => {
                        return Err(FitError::InvalidSlot {
                            side,
                            index,
                            value: v,
                        })
                    }
                    Slot::Free(v) | Slot::Fixed(v) if !(v.is_finite() && v.abs() < 1.0) => {
                        return Err(FitError::InvalidSlot {
                            side,
                            index,
                            value: v,
                        })
                    }
                    _ => {}
                }
            }
        }
        if self.free_count() == 0 {
            return Err(FitError::NoFreeSlots);
        }
        Ok(())
    }
}

/// A slot layout plus the series to fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTemplate")]
pub struct FitTemplate {
    #[serde(flatten)]
    layout: SlotLayout,
    data: TimeSeries,
}

#[derive(Deserialize)]
struct RawTemplate {
    #[serde(flatten)]
    layout: SlotLayout,
    data: TimeSeries,
}

impl TryFrom<RawTemplate> for FitTemplate {
    type Error = FitError;

    fn try_from(raw: RawTemplate) -> Result<Self, Self::Error> {
        FitTemplate::new(raw.layout, raw.data)
    }
}

impl FitTemplate {
    pub fn new(layout: SlotLayout, data: TimeSeries) -> Result<Self, FitError> {
        layout.check()?;
        Ok(Self { layout, data })
    }

    pub fn layout(&self) -> &SlotLayout {
        &self.layout
    }

    pub fn data(&self) -> &TimeSeries {
        &self.data
    }

    pub fn free_count(&self) -> usize {
        self.layout.free_count()
    }

    /// Starting point in unconstrained coordinates, in slot order ar, ma, seasonal_ar, seasonal_ma.
    pub fn initial_params(&self) -> Vec<f64> {
        self.layout
            .sides()
            .iter()
            .flat_map(|(_, slots)| slots.iter())
            .filter_map(|s| match s {
                Slot::Free(v) => Some(v.atanh()),
                _ => None,
            })
            .collect()
    }

    /// Fills the slots from unconstrained parameters.
    pub fn pacfs(&self, params: &[f64]) -> Result<[PacfSeq; 4], FitError> {
        assert_eq!(
            params.len(),
            self.free_count(),
            "one parameter per free slot"
        );
        let mut next = params.iter();
        let mut fill = |slots: &[Slot]| -> Result<PacfSeq, FitError> {
            let mut values = Vec::with_capacity(slots.len());
            let mut pins = Vec::new();
            for (i, slot) in slots.iter().enumerate() {
                values.push(match *slot {
                    Slot::Pinned(v) => {
                        pins.push(i + 1);
                        v
                    }
                    Slot::Fixed(v) => v,
                    Slot::Free(_) => squash(*next.next().expect("counted above")),
                });
            }
            Ok(PacfSeq::new(values, pins)?)
        };
        Ok([
            fill(&self.layout.ar)?,
            fill(&self.layout.ma)?,
            fill(&self.layout.seasonal_ar)?,
            fill(&self.layout.seasonal_ma)?,
        ])
    }

    fn spec(&self, params: &[f64], sigma2: f64) -> Result<SarumaSpec, FitError> {
        let [ar, ma, sar, sma] = self.pacfs(params)?;
        Ok(build_from_pacf(
            &ar,
            &ma,
            &sar,
            &sma,
            self.layout.s,
            sigma2,
        )?)
    }
}

/// Residual sum of squares at `params`, or [`SENTINEL`] when the parameters do
/// not produce a valid model.
pub fn css_objective(params: &[f64], template: &FitTemplate) -> f64 {
    let Ok(spec) = template.spec(params, 1.0) else {
        return SENTINEL;
    };
    let Ok(model) = spec.expand_unvalidated() else {
        return SENTINEL;
    };
    match residuals(&model, &template.data) {
        Ok(r) if r.sum_sq.is_finite() => r.sum_sq.min(SENTINEL),
        _ => SENTINEL,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub max_iter: usize,
    pub tol: f64,
    pub multistarts: usize,
    pub seed: u64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            max_iter: 2000,
            tol: 1e-8,
            multistarts: 5,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub ar: PacfSeq,
    pub ma: PacfSeq,
    pub seasonal_ar: PacfSeq,
    pub seasonal_ma: PacfSeq,
    pub spec: SarumaSpec,
    pub sum_sq: f64,
    pub sigma2_hat: f64,
    pub effective_n: usize,
    /// Optimum in unconstrained coordinates.
    pub params: Vec<f64>,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    pub starts_used: usize,
    pub trace_len: usize,
    pub objective_trace: Vec<f64>,
}

/// Minimises [`css_objective`] from the template's initial values and
/// `multistarts - 1` further seeded random starts, keeping the best result.
pub fn fit(template: &FitTemplate, opts: &FitOptions) -> Result<FitReport, FitError> {
    if opts.max_iter == 0 {
        return Err(FitError::ZeroIterations);
    }
    let dim = template.free_count();
    let mut starts = vec![template.initial_params()];
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 1..opts.multistarts.max(1) {
        starts.push((0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect());
    }

    let nm = NelderMeadOptions {
        max_iter: opts.max_iter,
        tol: opts.tol,
        ..NelderMeadOptions::default()
    };
    let mut best = None;
    let mut evaluations = 0;
    let mut starts_used = 0;
    for start in &starts {
        let result = minimize(|x| css_objective(x, template), start, &nm);
        evaluations += result.evaluations;
        if result.f >= SENTINEL {
            continue;
        }
        starts_used += 1;
        if best
            .as_ref()
            .is_none_or(|b: &crate::nelder_mead::NelderMeadResult| result.f < b.f)
        {
            best = Some(result);
        }
    }
    let best = best.ok_or(FitError::AllStartsFailed)?;

    let unit_variance = template.spec(&best.x, 1.0)?;
    let model = unit_variance
        .expand_unvalidated()
        .map_err(ModelError::from)?;
    let res = residuals(&model, &template.data)?;
    let sigma2_hat = res.sum_sq / res.effective_n as f64;
    let spec = SarumaSpec {
        sigma2: sigma2_hat,
        ..unit_variance
    };
    let [ar, ma, seasonal_ar, seasonal_ma] = template.pacfs(&best.x)?;
    Ok(FitReport {
        ar,
        ma,
        seasonal_ar,
        seasonal_ma,
        spec,
        sum_sq: res.sum_sq,
        sigma2_hat,
        effective_n: res.effective_n,
        params: best.x,
        iterations: best.iterations,
        evaluations,
        converged: best.converged,
        starts_used,
        trace_len: best.trace.len(),
        objective_trace: best.trace,
    })
}
