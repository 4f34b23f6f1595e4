//! Reference computations used only by tests. Nothing here calls the code paths it checks.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Schoolbook convolution of coefficient vectors.
pub fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Polynomial recursion `f_n(z) = f_{n-1}(z) - beta_n z^n f_{n-1}(1/z)`, i.e.
/// subtracting `beta_n` times the reversed coefficient vector padded to degree n.
/// Returns untrimmed coefficients of length `betas.len() + 1`.
pub fn reversal_recursion(betas: &[f64]) -> Vec<f64> {
    let mut f = vec![1.0];
    for (i, &b) in betas.iter().enumerate() {
        let n = i + 1;
        let mut padded = f.clone();
        padded.resize(n + 1, 0.0);
        let reversed: Vec<f64> = padded.iter().rev().copied().collect();
        f = padded
            .iter()
            .zip(&reversed)
            .map(|(x, r)| x - b * r)
            .collect();
    }
    f
}

/// Horner evaluation.
pub fn horner(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| (a.get(i).copied().unwrap_or(0.0) - b.get(i).copied().unwrap_or(0.0)).abs())
        .fold(0.0, f64::max)
}

/// Largest distance after matching two root multisets; repeatedly pairs the
/// globally closest remaining pair. Returns infinity on a size mismatch.
pub fn matched_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            pairs.push(((x - y).norm(), i, j));
        }
    }
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for (d, i, j) in pairs {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            worst = worst.max(d);
        }
    }
    worst
}

/// Uniform values in `[-bound, bound]`.
pub fn uniform_vec(rng: &mut ChaCha8Rng, len: usize, bound: f64) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(-bound..=bound)).collect()
}

pub fn random_sign(rng: &mut ChaCha8Rng) -> f64 {
    if rng.gen_bool(0.5) {
        1.0
    } else {
        -1.0
    }
}

/// Eigenvalues of the companion matrix of `coeffs` (lowest degree first), or
/// `None` if the Schur iteration does not converge.
pub fn companion_roots(coeffs: &[f64]) -> Option<Vec<Complex64>> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    let mut m = nalgebra::DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        m[(0, j)] = -coeffs[n - 1 - j] / lead;
    }
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    let schur = nalgebra::linalg::Schur::try_new(m, f64::EPSILON, 100_000)?;
    Some(schur.complex_eigenvalues().iter().copied().collect())
}
