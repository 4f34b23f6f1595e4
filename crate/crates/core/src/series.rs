//! Time series container, simulation, conditional residuals and CSV I/O.

use std::fs;
use std::io;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::ExpandedModel;
use crate::rootloc::is_stable;

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("time series is empty")]
    Empty,
    #[error("value at index {index} is not finite")]
    NonFinite { index: usize },
    #[error("series of length {len} is too short; need more than {required} observations")]
    SeriesTooShort { len: usize, required: usize },
    #[error("moving-average polynomial has roots on or inside the unit circle")]
    NonInvertibleMa,
    #[error("innovation standard deviation must be finite and non-negative, got {0}")]
    InvalidSigma(f64),
    #[error("simulated value overflowed at step {step}")]
    Overflow { step: usize },
    #[error("residual recursion overflowed at index {index}")]
    ResidualOverflow { index: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Observations `y_1..y_T` with optional per-observation labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self, SeriesError> {
        if values.is_empty() {
            return Err(SeriesError::Empty);
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(SeriesError::NonFinite { index });
        }
        Ok(Self {
            values,
            labels: None,
        })
    }

    /// Attaches labels; panics if the count differs from the number of values.
    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.values.len(), "one label per observation");
        self.labels = Some(labels);
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Lag-`lag` differences `y_t - y_{t-lag}`; labels follow the later observation.
    pub fn difference(&self, lag: usize) -> Result<TimeSeries, SeriesError> {
        if lag == 0 || lag >= self.values.len() {
            return Err(SeriesError::SeriesTooShort {
                len: self.values.len(),
                required: lag,
            });
        }
        let values = self
            .values
            .windows(lag + 1)
            .map(|w| w[lag] - w[0])
            .collect();
        let labels = self.labels.as_ref().map(|l| l[lag..].to_vec());
        Ok(TimeSeries { values, labels })
    }
}

/// Conditional residuals over `t = k+1..T`, where `k` is the AR degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualSet {
    pub residuals: Vec<f64>,
    pub sum_sq: f64,
    pub effective_n: usize,
}

/// A simulated path together with the innovations that drove its retained part.
#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub series: TimeSeries,
    pub innovations: Vec<f64>,
}

/// Seeded Gaussian innovations `sigma * N(0, 1)`.
pub fn gaussian_innovations(len: usize, sigma: f64, seed: u64) -> Result<Vec<f64>, SeriesError> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(SeriesError::InvalidSigma(sigma));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..len)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            sigma * z
        })
        .collect())
}

/// Runs `a(B) y_t = m(B) e_t` forward from zero presample values.
pub fn filter_innovations(
    model: &ExpandedModel,
    innovations: &[f64],
) -> Result<Vec<f64>, SeriesError> {
    let a = model.ar_full.coeffs();
    let m = model.ma_full.coeffs();
    let mut y = Vec::with_capacity(innovations.len());
    for t in 0..innovations.len() {
        let mut value: f64 = m
            .iter()
            .enumerate()
            .take(t + 1)
            .map(|(j, mj)| mj * innovations[t - j])
            .sum();
        for (k, ak) in a.iter().enumerate().skip(1).take(t) {
            value -= ak * y[t - k];
        }
        if !value.is_finite() {
            return Err(SeriesError::Overflow { step: t });
        }
        y.push(value);
    }
    Ok(y)
}

/// Simulates `burn_in + len` steps and keeps the last `len`.
pub fn simulate_with_innovations(
    model: &ExpandedModel,
    len: usize,
    sigma: f64,
    seed: u64,
    burn_in: usize,
) -> Result<Simulation, SeriesError> {
    if len == 0 {
        return Err(SeriesError::Empty);
    }
    let innovations = gaussian_innovations(burn_in + len, sigma, seed)?;
    let y = filter_innovations(model, &innovations)?;
    Ok(Simulation {
        series: TimeSeries::new(y[burn_in..].to_vec())?,
        innovations: innovations[burn_in..].to_vec(),
    })
}

pub fn simulate(
    model: &ExpandedModel,
    len: usize,
    sigma: f64,
    seed: u64,
    burn_in: usize,
) -> Result<TimeSeries, SeriesError> {
    Ok(simulate_with_innovations(model, len, sigma, seed, burn_in)?.series)
}

/// Conditional-sum-of-squares residuals with zero presample innovations.
pub fn residuals(model: &ExpandedModel, y: &TimeSeries) -> Result<ResidualSet, SeriesError> {
    let a = model.ar_full.coeffs();
    let m = model.ma_full.coeffs();
    let k = a.len() - 1;
    let q = m.len() - 1;
    let values = y.values();
    if values.len() <= k + q {
        return Err(SeriesError::SeriesTooShort {
            len: values.len(),
            required: k + q,
        });
    }
    if !is_stable(&model.ma_full) {
        return Err(SeriesError::NonInvertibleMa);
    }
    let mut out: Vec<f64> = Vec::with_capacity(values.len() - k);
    for t in k..values.len() {
        let w: f64 = a.iter().enumerate().map(|(j, aj)| aj * values[t - j]).sum();
        let i = t - k;
        let mut e = w;
        for (j, mj) in m.iter().enumerate().skip(1).take(i) {
            e -= mj * out[i - j];
        }
        if !e.is_finite() {
            return Err(SeriesError::ResidualOverflow { index: t });
        }
        out.push(e);
    }
    let sum_sq = out.iter().map(|e| e * e).sum();
    Ok(ResidualSet {
        effective_n: out.len(),
        residuals: out,
        sum_sq,
    })
}

/// Parses one value per line, optionally `label,value`, with an optional header.
pub fn parse_csv(text: &str) -> Result<TimeSeries, SeriesError> {
    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut labelled = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let line_no = i + 1;
        if line.is_empty() {
            continue;
        }
        if values.is_empty() && labelled.is_none() && is_header(line) {
            continue;
        }
        let (label, field) = match line.rsplit_once(',') {
            Some((label, field)) => (Some(label.trim().to_string()), field.trim()),
            None => (None, line),
        };
        match labelled {
            None => labelled = Some(label.is_some()),
            Some(has) if has != label.is_some() => {
                return Err(SeriesError::Parse {
                    line: line_no,
                    message: "inconsistent column count".into(),
                })
            }
            _ => {}
        }
        let value: f64 = field.parse().map_err(|e| SeriesError::Parse {
            line: line_no,
            message: format!("invalid number {field:?}: {e}"),
        })?;
        if !value.is_finite() {
            return Err(SeriesError::Parse {
                line: line_no,
                message: format!("non-finite value {field:?}"),
            });
        }
        values.push(value);
        labels.extend(label);
    }
    let ts = TimeSeries::new(values)?;
    Ok(if labelled == Some(true) {
        ts.with_labels(labels)
    } else {
        ts
    })
}

fn is_header(line: &str) -> bool {
    let last = line.rsplit(',').next().unwrap_or(line).trim();
    last.eq_ignore_ascii_case("value")
}

/// Formats a series with a header; `f64` display is shortest round-trip.
pub fn format_csv(ts: &TimeSeries) -> String {
    let mut out = String::new();
    match ts.labels() {
        Some(labels) => {
            out.push_str("label,value\n");
            for (l, v) in labels.iter().zip(ts.values()) {
                out.push_str(&format!("{l},{v}\n"));
            }
        }
        None => {
            out.push_str("value\n");
            for v in ts.values() {
                out.push_str(&format!("{v}\n"));
            }
        }
    }
    out
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<TimeSeries, SeriesError> {
    parse_csv(&fs::read_to_string(path)?)
}

pub fn write_csv(ts: &TimeSeries, path: impl AsRef<Path>) -> Result<(), SeriesError> {
    fs::write(path, format_csv(ts))?;
    Ok(())
}
