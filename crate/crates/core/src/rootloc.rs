//! Zero location relative to the unit circle from reflection coefficients.
//!
//! With `q_k = prod_{i=n}^{k} (1 - beta_i^2)`, the number of roots strictly
//! inside the unit circle equals the number of negative terms among
//! `q_n, ..., q_1`. Only squares enter, so PACFs and reflection coefficients
//! (PACFs negated) give the same answer.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pacf::{reflection_coefficients, PacfError, UNIT_EPS};
use crate::poly::FilterPoly;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RootLocError {
    #[error("reflection coefficient {index} = {value} has unit modulus")]
    IllDefinedRcs { index: usize, value: f64 },
    #[error("non-finite reflection coefficient at index {index}")]
    NonFinite { index: usize },
    #[error(transparent)]
    Pacf(#[from] PacfError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootLocationReport {
    pub nu_inside: usize,
    pub n_outside: usize,
    /// `q_n, q_{n-1}, ..., q_1` in that order.
    pub q_sequence: Vec<f64>,
}

/// Counts roots inside the unit circle from reflection coefficients `beta_1..beta_n`.
/// Values with modulus above one are legal; unit modulus is not.
pub fn count_inside(betas: &[f64]) -> Result<RootLocationReport, RootLocError> {
    for (i, &value) in betas.iter().enumerate() {
        if !value.is_finite() {
            return Err(RootLocError::NonFinite { index: i + 1 });
        }
        if (value.abs() - 1.0).abs() <= UNIT_EPS {
            return Err(RootLocError::IllDefinedRcs {
                index: i + 1,
                value,
            });
        }
    }
    let mut q = 1.0;
    let q_sequence: Vec<f64> = betas
        .iter()
        .rev()
        .map(|b| {
            q *= 1.0 - b * b;
            q
        })
        .collect();
    let nu_inside = q_sequence.iter().filter(|v| **v < 0.0).count();
    Ok(RootLocationReport {
        nu_inside,
        n_outside: betas.len() - nu_inside,
        q_sequence,
    })
}

/// Runs the inverse recursion on `p` and counts its inside roots.
pub fn count_inside_poly(p: &FilterPoly) -> Result<RootLocationReport, RootLocError> {
    let betas = reflection_coefficients(p)?;
    count_inside(&betas)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Stability {
    Stable,
    /// Some roots lie strictly inside the unit circle.
    Inside {
        count: usize,
    },
    /// A unit reflection coefficient was hit at `index`, so at least one root is on the circle.
    OnCircle {
        index: usize,
    },
    /// The inverse recursion overflowed before a verdict.
    Indeterminate,
}

impl Stability {
    pub fn is_stable(self) -> bool {
        matches!(self, Stability::Stable)
    }
}

/// Stability of `p`: all roots strictly outside the unit circle.
/// The identity polynomial is stable.
pub fn stability(p: &FilterPoly) -> Stability {
    match reflection_coefficients(p) {
        Ok(betas) => {
            let inside = betas.iter().filter(|b| b.abs() >= 1.0 - UNIT_EPS).count();
            if inside == 0 {
                Stability::Stable
            } else {
                match count_inside(&betas) {
                    Ok(r) if r.nu_inside > 0 => Stability::Inside { count: r.nu_inside },
                    _ => Stability::Indeterminate,
                }
            }
        }
        Err(PacfError::UnitPacfEncountered { index, .. }) => Stability::OnCircle { index },
        Err(_) => Stability::Indeterminate,
    }
}

pub fn is_stable(p: &FilterPoly) -> bool {
    stability(p).is_stable()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn count_examples() {
        let r = count_inside(&[0.5]).unwrap();
        assert_eq!(r.q_sequence, vec![0.75]);
        assert_eq!((r.nu_inside, r.n_outside), (0, 1));

        let r = count_inside(&[2.0]).unwrap();
        assert_eq!(r.q_sequence, vec![-3.0]);
        assert_eq!(r.nu_inside, 1);

        let r = count_inside(&[0.5, 2.0]).unwrap();
        assert_eq!(r.q_sequence, vec![-3.0, -2.25]);
        assert_eq!((r.nu_inside, r.n_outside), (2, 0));

        assert!(matches!(
            count_inside(&[0.2, -1.0]),
            Err(RootLocError::IllDefinedRcs { index: 2, .. })
        ));
        assert_eq!(count_inside(&[]).unwrap().nu_inside, 0);
    }

    #[test]
    fn count_from_polynomial() {
        // 1 - 2z has its root at 0.5.
        let p = FilterPoly::from_ar(&[2.0]).unwrap();
        assert_eq!(count_inside_poly(&p).unwrap().nu_inside, 1);
    }

    #[test]
    fn stability_examples() {
        assert!(is_stable(&FilterPoly::from_ar(&[0.5]).unwrap()));
        assert_eq!(
            stability(&FilterPoly::difference(1).unwrap()),
            Stability::OnCircle { index: 1 }
        );
        let p = FilterPoly::new(vec![1.0, -1.0, 1.0]).unwrap();
        assert_eq!(stability(&p), Stability::OnCircle { index: 2 });
        assert_eq!(
            stability(&FilterPoly::from_ar(&[2.0]).unwrap()),
            Stability::Inside { count: 1 }
        );
        assert!(is_stable(&FilterPoly::identity()));
    }
}
