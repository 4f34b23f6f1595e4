//! Real polynomials in the backshift variable, normalised to the form `1 - P(z)`.
//!
//! Coefficients are stored lowest degree first and the constant term is
//! always exactly `1`. Autoregressive coefficients `phi_k` therefore appear
//! negated: `c_k = -phi_k` for `k >= 1`.

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default relative tolerance for deflation and exact division.
pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("polynomial has no coefficients")]
    Empty,
    #[error("coefficient {index} is not finite")]
    NonFinite { index: usize },
    #[error("constant term must be exactly 1, found {found}")]
    NotNormalised { found: f64 },
    #[error("constant term is zero, cannot normalise")]
    ZeroConstant,
    #[error("seasonal period must be at least 1")]
    ZeroSeason,
    #[error("divisor degree {den} exceeds dividend degree {num}")]
    DivisorTooLarge { num: usize, den: usize },
    #[error("not a factor: remainder {remainder:e} exceeds bound {bound:e}")]
    NotAFactor { remainder: f64, bound: f64 },
    #[error("root finding requires degree >= 1")]
    ConstantPolynomial,
    #[error("eigenvalue iteration failed to converge for degree {degree}")]
    RootsFailed { degree: usize },
}

/// The two real points of the unit circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnitPoint {
    Plus,
    Minus,
}

impl UnitPoint {
    pub fn value(self) -> f64 {
        match self {
            UnitPoint::Plus => 1.0,
            UnitPoint::Minus => -1.0,
        }
    }
}

/// A real polynomial `c_0 + c_1 z + ... + c_n z^n` with `c_0 == 1` and `c_n != 0`.
///
/// Polynomials produced by the forward PACF recursion also carry the rounding
/// error of each coefficient (`c_k + lo_k` is accurate to about 106 bits), which
/// the inverse recursion consumes. Every other operation, equality and
/// serialisation see only the `f64` coefficients.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct FilterPoly {
    coeffs: Vec<f64>,
    lo: Vec<f64>,
}

impl PartialEq for FilterPoly {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl FilterPoly {
    /// Builds a polynomial from coefficients that already have a unit constant term.
    /// Exact trailing zeros are dropped so the degree is honest.
    pub fn new(coeffs: Vec<f64>) -> Result<Self, PolyError> {
        check_finite(&coeffs)?;
        match coeffs.first() {
            None => Err(PolyError::Empty),
            Some(&c0) if c0 != 1.0 => Err(PolyError::NotNormalised { found: c0 }),
            Some(_) => Ok(Self::trimmed(coeffs)),
        }
    }

    /// Builds a polynomial after dividing every coefficient by the constant term.
    pub fn normalised(mut coeffs: Vec<f64>) -> Result<Self, PolyError> {
        check_finite(&coeffs)?;
        let c0 = *coeffs.first().ok_or(PolyError::Empty)?;
        if c0 == 0.0 {
            return Err(PolyError::ZeroConstant);
        }
        if c0 != 1.0 {
            coeffs.iter_mut().for_each(|c| *c /= c0);
            coeffs[0] = 1.0;
        }
        Ok(Self::trimmed(coeffs))
    }

    /// `1 - phi_1 z - ... - phi_p z^p`.
    pub fn from_ar(phi: &[f64]) -> Result<Self, PolyError> {
        let mut coeffs = Vec::with_capacity(phi.len() + 1);
        coeffs.push(1.0);
        coeffs.extend(phi.iter().map(|p| -p));
        Self::new(coeffs)
    }

    /// `1 + theta_1 z + ... + theta_q z^q`.
    pub fn from_ma(theta: &[f64]) -> Result<Self, PolyError> {
        let mut coeffs = Vec::with_capacity(theta.len() + 1);
        coeffs.push(1.0);
        coeffs.extend_from_slice(theta);
        Self::new(coeffs)
    }

    pub fn identity() -> Self {
        Self {
            coeffs: vec![1.0],
            lo: Vec::new(),
        }
    }

    /// The lag-`s` differencing operator `1 - z^s`.
    pub fn difference(s: usize) -> Result<Self, PolyError> {
        if s == 0 {
            return Err(PolyError::ZeroSeason);
        }
        let mut coeffs = vec![0.0; s + 1];
        coeffs[0] = 1.0;
        coeffs[s] = -1.0;
        Ok(Self {
            coeffs,
            lo: Vec::new(),
        })
    }

    // Internal constructor for values produced by closed operations.
    pub(crate) fn from_raw(coeffs: Vec<f64>) -> Self {
        debug_assert_eq!(coeffs.first(), Some(&1.0));
        Self::trimmed(coeffs)
    }

    // `lo` holds the low-order parts from the forward recursion; trailing
    // coefficients are dropped only when both parts are zero.
    pub(crate) fn with_low_parts(coeffs: Vec<f64>, mut lo: Vec<f64>) -> Self {
        debug_assert_eq!(coeffs.len(), lo.len());
        let mut p = Self::trimmed_pair(coeffs, &lo);
        lo.truncate(p.coeffs.len());
        if lo.iter().any(|v| *v != 0.0) {
            p.lo = lo;
        }
        p
    }

    /// Low-order parts, when the polynomial came out of the extended-precision recursion.
    pub(crate) fn low_parts(&self) -> Option<&[f64]> {
        (!self.lo.is_empty()).then_some(&self.lo)
    }

    fn trimmed(coeffs: Vec<f64>) -> Self {
        Self::trimmed_pair(coeffs, &[])
    }

    fn trimmed_pair(mut coeffs: Vec<f64>, lo: &[f64]) -> Self {
        while coeffs.len() > 1
            && coeffs[coeffs.len() - 1] == 0.0
            && lo.get(coeffs.len() - 1).is_none_or(|v| *v == 0.0)
        {
            coeffs.pop();
        }
        Self {
            coeffs,
            lo: Vec::new(),
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_identity(&self) -> bool {
        self.coeffs.len() == 1
    }

    /// Autoregressive coefficients `phi_1..phi_n`, i.e. the negated tail.
    pub fn ar_coefficients(&self) -> Vec<f64> {
        self.coeffs[1..].iter().map(|c| -c).collect()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn eval_real(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn mul(&self, other: &FilterPoly) -> FilterPoly {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0.0 {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        FilterPoly::from_raw(out)
    }

    /// Product of a list of factors; the empty product is the identity.
    pub fn product<'a, I>(factors: I) -> FilterPoly
    where
        I: IntoIterator<Item = &'a FilterPoly>,
    {
        factors
            .into_iter()
            .fold(FilterPoly::identity(), |acc, f| acc.mul(f))
    }

    /// Substitutes `z -> z^s`.
    pub fn embed_season(&self, s: usize) -> Result<FilterPoly, PolyError> {
        if s == 0 {
            return Err(PolyError::ZeroSeason);
        }
        let mut out = vec![0.0; self.degree() * s + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            out[k * s] = *c;
        }
        Ok(FilterPoly::from_raw(out))
    }

    /// Multiplicity of the root at `+1` or `-1`, found by repeated synthetic division.
    pub fn unit_multiplicity(&self, at: UnitPoint, tol: f64) -> usize {
        self.deflate_unit(at, tol).0
    }

    /// Divides out `(1 - a z)` with `a = at.value()` as many times as the
    /// remainder stays within `tol * (1 + max |c_i|)`. Returns the count and
    /// the deflated factor.
    pub fn deflate_unit(&self, at: UnitPoint, tol: f64) -> (usize, FilterPoly) {
        let a = at.value();
        let bound = tol * (1.0 + self.max_abs_coeff());
        let mut current = self.coeffs.clone();
        let mut count = 0;
        while current.len() > 1 {
            let n = current.len() - 1;
            let mut quotient = Vec::with_capacity(n);
            let mut prev = 0.0;
            for &c in &current[..n] {
                prev = c + a * prev;
                quotient.push(prev);
            }
            let remainder = current[n] + a * prev;
            if remainder.abs() > bound {
                break;
            }
            current = quotient;
            count += 1;
        }
        (count, FilterPoly::trimmed(current))
    }

    /// Quotient `q` with `self = den * q`, or `NotAFactor` when the remainder is too large.
    pub fn divide_exact(&self, den: &FilterPoly, tol: f64) -> Result<FilterPoly, PolyError> {
        let (n, m) = (self.degree(), den.degree());
        if m > n {
            return Err(PolyError::DivisorTooLarge { num: n, den: m });
        }
        if m == 0 {
            return Ok(self.clone());
        }
        let bound = tol * (1.0 + self.max_abs_coeff());
        let nq = n - m;

        // Forward division is stable when the divisor's roots lie outside the
        // unit circle, backward division when they lie inside. Mixed divisors
        // fall back to least squares on the convolution system.
        let candidates = [
            Some(ascending_division(&self.coeffs, &den.coeffs, nq)),
            descending_division(&self.coeffs, &den.coeffs, nq),
            least_squares_division(&self.coeffs, &den.coeffs, nq),
        ];
        let (quotient, remainder) = candidates
            .into_iter()
            .flatten()
            .filter_map(|q| {
                let q = normalise_quotient(q)?;
                let r = residual(&self.coeffs, &den.coeffs, &q);
                Some((q, r))
            })
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .ok_or(PolyError::NotAFactor {
                remainder: f64::INFINITY,
                bound,
            })?;
        if remainder > bound {
            return Err(PolyError::NotAFactor { remainder, bound });
        }
        Ok(FilterPoly::trimmed(quotient))
    }

    /// All complex roots, via eigenvalues of the companion matrix followed by
    /// a guarded Newton polish.
    pub fn roots(&self) -> Result<ComplexRootSet, PolyError> {
        let n = self.degree();
        if n == 0 {
            return Err(PolyError::ConstantPolynomial);
        }
        // Companion matrices of z^n - 1 and relatives are orthogonal with all
        // eigenvalues of equal modulus, which stalls the shifted QR sweeps. A
        // real translation z = w + t separates the moduli.
        let raw = [0.0, 0.1, -0.13, 0.27]
            .iter()
            .find_map(|&t| self.shifted_eigenvalues(t))
            .ok_or(PolyError::RootsFailed { degree: n })?;
        let roots = raw.into_iter().map(|z| self.polish(z)).collect();
        Ok(ComplexRootSet { roots })
    }

    // Eigenvalues of the companion matrix of p(w + shift), mapped back to z.
    fn shifted_eigenvalues(&self, shift: f64) -> Option<Vec<Complex64>> {
        let n = self.degree();
        let mut shifted = self.coeffs.clone();
        if shift != 0.0 {
            // Taylor shift by repeated synthetic division.
            for i in 0..n {
                for j in (i..n).rev() {
                    shifted[j] += shift * shifted[j + 1];
                }
            }
        }
        let lead = shifted[n];
        let mut companion = DMatrix::<f64>::zeros(n, n);
        for i in 1..n {
            companion[(i, i - 1)] = 1.0;
        }
        for i in 0..n {
            companion[(i, n - 1)] = -shifted[i] / lead;
        }
        let schur = Schur::try_new(companion, f64::EPSILON, 100 * n.max(10))?;
        let raw = schur.complex_eigenvalues();
        if raw.len() != n || raw.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return None;
        }
        Some(raw.iter().map(|w| w + shift).collect())
    }

    fn polish(&self, mut z: Complex64) -> Complex64 {
        let deriv: Vec<f64> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| k as f64 * c)
            .collect();
        let eval_deriv = |z: Complex64| {
            deriv
                .iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
        };
        let mut value = self.eval(z).norm();
        for _ in 0..3 {
            let d = eval_deriv(z);
            if d.norm() == 0.0 {
                break;
            }
            let candidate = z - self.eval(z) / d;
            let candidate_value = self.eval(candidate).norm();
            if candidate_value.is_nan() || candidate_value >= value {
                break;
            }
            z = candidate;
            value = candidate_value;
        }
        z
    }
}

impl TryFrom<Vec<f64>> for FilterPoly {
    type Error = PolyError;

    fn try_from(coeffs: Vec<f64>) -> Result<Self, Self::Error> {
        FilterPoly::new(coeffs)
    }
}

impl From<FilterPoly> for Vec<f64> {
    fn from(p: FilterPoly) -> Self {
        p.coeffs
    }
}

fn check_finite(coeffs: &[f64]) -> Result<(), PolyError> {
    match coeffs.iter().position(|c| !c.is_finite()) {
        Some(index) => Err(PolyError::NonFinite { index }),
        None => Ok(()),
    }
}

fn ascending_division(num: &[f64], den: &[f64], nq: usize) -> Vec<f64> {
    let m = den.len() - 1;
    let mut q = vec![0.0; nq + 1];
    for k in 0..=nq {
        let mut acc = num[k];
        for j in 1..=m.min(k) {
            acc -= den[j] * q[k - j];
        }
        q[k] = acc / den[0];
    }
    q
}

fn descending_division(num: &[f64], den: &[f64], nq: usize) -> Option<Vec<f64>> {
    let m = den.len() - 1;
    let lead = den[m];
    let mut q = vec![0.0; nq + 1];
    for k in (0..=nq).rev() {
        let mut acc = num[k + m];
        for (j, d) in den[..m].iter().enumerate() {
            let idx = k + m - j;
            if idx <= nq {
                acc -= d * q[idx];
            }
        }
        q[k] = acc / lead;
    }
    q.iter().all(|v| v.is_finite()).then_some(q)
}

fn least_squares_division(num: &[f64], den: &[f64], nq: usize) -> Option<Vec<f64>> {
    let rows = num.len();
    let a = DMatrix::from_fn(rows, nq + 1, |i, j| {
        if i >= j && i - j < den.len() {
            den[i - j]
        } else {
            0.0
        }
    });
    let b = DVector::from_column_slice(num);
    let x = a.svd(true, true).solve(&b, 1e-14).ok()?;
    let q: Vec<f64> = x.iter().copied().collect();
    q.iter().all(|v| v.is_finite()).then_some(q)
}

fn normalise_quotient(mut q: Vec<f64>) -> Option<Vec<f64>> {
    let q0 = q[0];
    if q0 == 0.0 || !q0.is_finite() {
        return None;
    }
    if q0 != 1.0 {
        q.iter_mut().for_each(|v| *v /= q0);
        q[0] = 1.0;
    }
    Some(q)
}

fn residual(num: &[f64], den: &[f64], q: &[f64]) -> f64 {
    let mut prod = vec![0.0; den.len() + q.len() - 1];
    for (i, a) in den.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            prod[i + j] += a * b;
        }
    }
    num.iter()
        .zip(&prod)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Complex roots of a real polynomial; multiplicity is carried by repetition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexRootSet {
    roots: Vec<Complex64>,
}

impl ComplexRootSet {
    pub fn roots(&self) -> &[Complex64] {
        &self.roots
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn moduli(&self) -> impl Iterator<Item = f64> + '_ {
        self.roots.iter().map(|z| z.norm())
    }

    pub fn min_modulus(&self) -> f64 {
        self.moduli().fold(f64::INFINITY, f64::min)
    }

    pub fn max_modulus(&self) -> f64 {
        self.moduli().fold(0.0, f64::max)
    }

    /// Number of roots with modulus strictly below one.
    pub fn count_inside(&self) -> usize {
        self.moduli().filter(|m| *m < 1.0).count()
    }

    /// True when the multiset is closed under conjugation within `tol`.
    pub fn is_conjugate_closed(&self, tol: f64) -> bool {
        let mut used = vec![false; self.roots.len()];
        for (i, z) in self.roots.iter().enumerate() {
            if used[i] {
                continue;
            }
            if z.im.abs() <= tol {
                used[i] = true;
                continue;
            }
            let partner = (0..self.roots.len())
                .filter(|&j| j != i && !used[j])
                .min_by(|&a, &b| {
                    let da = (self.roots[a] - z.conj()).norm();
                    let db = (self.roots[b] - z.conj()).norm();
                    da.total_cmp(&db)
                });
            match partner {
                Some(j) if (self.roots[j] - z.conj()).norm() <= tol => {
                    used[i] = true;
                    used[j] = true;
                }
                _ => return false,
            }
        }
        true
    }
}

impl IntoIterator for ComplexRootSet {
    type Item = Complex64;
    type IntoIter = std::vec::IntoIter<Complex64>;

    fn into_iter(self) -> Self::IntoIter {
        self.roots.into_iter()
    }
}
