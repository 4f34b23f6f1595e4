//! Derivative-free simplex minimisation.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    pub max_iter: usize,
    /// Bound on both the simplex diameter and the relative spread of objective values.
    pub tol: f64,
    /// Offset of the initial vertices from the starting point along each axis.
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_iter: 2000,
            tol: 1e-8,
            initial_step: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    /// Best objective value after each iteration; never increases.
    pub trace: Vec<f64>,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Minimises `f` starting from `x0`. NaN objective values are treated as `+inf`.
pub fn minimize<F>(mut f: F, x0: &[f64], opts: &NelderMeadOptions) -> NelderMeadResult
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut evaluations = 0;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), eval(x0)));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += opts.initial_step;
        let fx = eval(&x);
        simplex.push((x, fx));
    }

    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if has_converged(&simplex, opts.tol) {
            converged = true;
            break;
        }
        iterations += 1;

        let centroid = centroid(&simplex[..n]);
        let worst = simplex[n].clone();
        let second_worst = simplex[n.saturating_sub(1)].1;
        let best = simplex[0].1;

        let reflected = affine(&centroid, &worst.0, -REFLECT);
        let f_reflected = eval(&reflected);

        if f_reflected < best {
            let expanded = affine(&centroid, &reflected, EXPAND);
            let f_expanded = eval(&expanded);
            simplex[n] = if f_expanded < f_reflected {
                (expanded, f_expanded)
            } else {
                (reflected, f_reflected)
            };
        } else if f_reflected < second_worst {
            simplex[n] = (reflected, f_reflected);
        } else {
            let (contracted, bound) = if f_reflected < worst.1 {
                (affine(&centroid, &reflected, CONTRACT), f_reflected)
            } else {
                (affine(&centroid, &worst.0, CONTRACT), worst.1)
            };
            let f_contracted = eval(&contracted);
            if f_contracted < bound {
                simplex[n] = (contracted, f_contracted);
            } else {
                let anchor = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    let x = affine(&anchor, &vertex.0, SHRINK);
                    let fx = eval(&x);
                    *vertex = (x, fx);
                }
            }
        }
        let current_best = simplex.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
        trace.push(current_best);
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, f) = simplex.swap_remove(0);
    NelderMeadResult {
        x,
        f,
        iterations,
        evaluations,
        converged,
        trace,
    }
}

fn has_converged(sorted: &[(Vec<f64>, f64)], tol: f64) -> bool {
    let (best_x, best_f) = (&sorted[0].0, sorted[0].1);
    let worst_f = sorted[sorted.len() - 1].1;
    if !best_f.is_finite() || !worst_f.is_finite() {
        return false;
    }
    let diameter = sorted
        .iter()
        .skip(1)
        .flat_map(|(x, _)| x.iter().zip(best_x).map(|(a, b)| (a - b).abs()))
        .fold(0.0, f64::max);
    diameter < tol && (worst_f - best_f) <= tol * (1.0 + best_f.abs())
}

fn centroid(vertices: &[(Vec<f64>, f64)]) -> Vec<f64> {
    let n = vertices[0].0.len();
    let mut c = vec![0.0; n];
    for (x, _) in vertices {
        for (ci, xi) in c.iter_mut().zip(x) {
            *ci += xi;
        }
    }
    let k = vertices.len() as f64;
    c.iter_mut().for_each(|ci| *ci /= k);
    c
}

// origin + t * (target - origin)
fn affine(origin: &[f64], target: &[f64], t: f64) -> Vec<f64> {
    origin
        .iter()
        .zip(target)
        .map(|(o, x)| o + t * (x - o))
        .collect()
}
