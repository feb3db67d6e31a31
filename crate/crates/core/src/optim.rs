//! Derivative-free minimization over the probability simplex.
//!
//! Points of the simplex are reached through a softmax parameterization
//! anchored at the largest coordinate of each start; a Nelder-Mead search
//! runs in the unconstrained coordinates and is restarted from its best
//! vertex until it stops improving. A final pattern search moves mass
//! between pairs of coordinates directly on the simplex, which reaches
//! faces that the softmax map only approaches asymptotically.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Minimizer settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimizerOptions {
    /// Total number of starts: the caller's preferred starts first, then
    /// the uniform distribution, then random Dirichlet points.
    pub restarts: usize,
    pub seed: u64,
    /// Converged when the simplex diameter falls below this.
    pub step_tol: f64,
    /// ... or when the spread of vertex values falls below this.
    pub value_tol: f64,
    pub max_evals: usize,
}

impl Default for MinimizerOptions {
    fn default() -> Self {
        Self { restarts: 8, seed: 0xF0C05, step_tol: 1e-9, value_tol: 1e-10, max_evals: 20_000 }
    }
}

/// Outcome of a simplex-constrained minimization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimplexMinimum {
    pub point: Vec<f64>,
    pub value: f64,
    pub restarts_used: usize,
    /// Pattern-search step at termination of the best run.
    pub final_step: f64,
    pub evals: usize,
    /// At least one start met the convergence criterion.
    pub converged: bool,
}

struct NmOutcome {
    x: Vec<f64>,
    value: f64,
    evals: usize,
    converged: bool,
}

/// Plain Nelder-Mead with standard coefficients.
fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    f: &mut F,
    x0: &[f64],
    step: f64,
    step_tol: f64,
    value_tol: f64,
    max_evals: usize,
) -> NmOutcome {
    let n = x0.len();
    if n == 0 {
        let v = f(x0);
        return NmOutcome { x: vec![], value: v, evals: 1, converged: true };
    }
    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|x| f(x)).collect();
    let mut evals = n + 1;
    let mut converged = false;

    while evals < max_evals {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let diameter = simplex[1..]
            .iter()
            .map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        let spread = values[n] - values[0];
        if diameter < step_tol || (spread.is_finite() && spread < value_tol) {
            converged = true;
            break;
        }

        let centroid: Vec<f64> =
            (0..n).map(|k| simplex[..n].iter().map(|v| v[k]).sum::<f64>() / n as f64).collect();
        let along = |t: f64| -> Vec<f64> {
            centroid.iter().zip(&simplex[n]).map(|(c, w)| c + t * (w - c)).collect()
        };

        let xr = along(-1.0);
        let fr = f(&xr);
        evals += 1;
        if fr < values[0] {
            let xe = along(-2.0);
            let fe = f(&xe);
            evals += 1;
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
            continue;
        }
        let (xc, fc) = if fr < values[n] {
            let xc = along(-0.5);
            let fc = f(&xc);
            (xc, fc)
        } else {
            let xc = along(0.5);
            let fc = f(&xc);
            (xc, fc)
        };
        evals += 1;
        if fc < values[n].min(fr) {
            simplex[n] = xc;
            values[n] = fc;
            continue;
        }
        // shrink toward the best vertex
        for i in 1..=n {
            let shrunk: Vec<f64> = simplex[i].iter().zip(&simplex[0]).map(|(v, b)| b + 0.5 * (v - b)).collect();
            values[i] = f(&shrunk);
            simplex[i] = shrunk;
        }
        evals += n;
    }
    let best = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
    NmOutcome { x: simplex[best].clone(), value: values[best], evals, converged }
}

fn softmax_point(z: &[f64], anchor: usize, dim: usize) -> Vec<f64> {
    let mut logits = Vec::with_capacity(dim);
    let mut zi = z.iter();
    for i in 0..dim {
        logits.push(if i == anchor { 0.0 } else { *zi.next().unwrap() });
    }
    let m = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = logits.iter().map(|l| (l - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

fn logits_of(p: &[f64], anchor: usize) -> Vec<f64> {
    let floor = 1e-300;
    let pa = p[anchor].max(floor);
    p.iter()
        .enumerate()
        .filter(|&(i, _)| i != anchor)
        .map(|(_, &x)| (x.max(floor) / pa).ln().max(-60.0))
        .collect()
}

/// Pattern search moving mass between coordinate pairs.
fn pair_transfer_polish<F: FnMut(&[f64]) -> f64>(
    f: &mut F,
    p: &mut Vec<f64>,
    value: &mut f64,
    start_step: f64,
    min_step: f64,
    max_evals: usize,
) -> (f64, usize) {
    let d = p.len();
    let mut h = start_step;
    let mut evals = 0;
    while h >= min_step && evals < max_evals {
        let mut improved = false;
        for i in 0..d {
            for j in 0..d {
                if i == j || p[j] <= 0.0 {
                    continue;
                }
                let t = h.min(p[j]);
                let mut trial = p.clone();
                trial[i] += t;
                trial[j] -= t;
                let v = f(&trial);
                evals += 1;
                if v < *value {
                    *p = trial;
                    *value = v;
                    improved = true;
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    (h, evals)
}

/// Uniformly distributed point of the probability simplex.
pub fn random_simplex_point(rng: &mut impl Rng, dim: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..dim).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

/// Radical inverse of `index` in `base`.
fn radical_inverse(mut index: usize, base: usize) -> f64 {
    let inv = 1.0 / base as f64;
    let mut r = 0.0;
    let mut f = inv;
    while index > 0 {
        r += (index % base) as f64 * f;
        index /= base;
        f *= inv;
    }
    r
}

const PRIMES: [usize; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Quasi-random simplex points: Halton points pushed through the
/// exponential-spacings map to the simplex.
pub fn halton_simplex_points(dim: usize, count: usize) -> Vec<Vec<f64>> {
    assert!(dim <= PRIMES.len(), "simplex dimension too large for the Halton bases");
    (1..=count)
        .map(|k| {
            let e: Vec<f64> = (0..dim).map(|b| -(1.0 - radical_inverse(k, PRIMES[b])).ln()).collect();
            let s: f64 = e.iter().sum();
            e.into_iter().map(|x| x / s).collect()
        })
        .collect()
}

/// Minimizes `f` over probability vectors of length `dim`.
///
/// `preferred` starts are tried first, then the uniform point, then random
/// points until `opts.restarts` starts have run. The result is the best
/// point found across all starts and is deterministic given `opts.seed`.
pub fn minimize_on_simplex<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    dim: usize,
    preferred: &[Vec<f64>],
    opts: &MinimizerOptions,
) -> SimplexMinimum {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut starts: Vec<Vec<f64>> = preferred.iter().take(opts.restarts.max(1)).cloned().collect();
    if starts.len() < opts.restarts {
        starts.push(vec![1.0 / dim as f64; dim]);
    }
    while starts.len() < opts.restarts {
        starts.push(random_simplex_point(&mut rng, dim));
    }

    let mut best: Option<SimplexMinimum> = None;
    let mut total_evals = 0;
    let mut any_converged = false;
    for (used, start) in starts.iter().enumerate() {
        let mut p = start.clone();
        let mut value = f(&p);
        total_evals += 1;
        let mut converged = false;
        let mut step = 0.5;
        for _round in 0..8 {
            let anchor = (0..dim).max_by(|&a, &b| p[a].total_cmp(&p[b])).unwrap();
            let z0 = logits_of(&p, anchor);
            let mut g = |z: &[f64]| f(&softmax_point(z, anchor, dim));
            let out = nelder_mead(&mut g, &z0, step, opts.step_tol, opts.value_tol, opts.max_evals);
            total_evals += out.evals;
            converged |= out.converged;
            let improvement = value - out.value;
            if out.value <= value {
                p = softmax_point(&out.x, anchor, dim);
                value = out.value;
            }
            if !(improvement > opts.value_tol) {
                break;
            }
            step = (step * 0.5).max(1e-3);
        }
        let (final_step, polish_evals) =
            pair_transfer_polish(&mut f, &mut p, &mut value, 1e-2, 1e-12, opts.max_evals);
        total_evals += polish_evals;
        any_converged |= converged;
        let better = best.as_ref().is_none_or(|b| value < b.value);
        if better {
            best = Some(SimplexMinimum {
                point: p,
                value,
                restarts_used: used + 1,
                final_step,
                evals: 0,
                converged,
            });
        }
    }
    let mut best = best.expect("at least one start");
    best.restarts_used = starts.len();
    best.evals = total_evals;
    best.converged = any_converged;
    best
}

/// Golden-section refinement of a unimodal function on `[lo, hi]`.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Minimizes a function of one variable on `[lo, hi]` by a uniform scan
/// with `points` samples followed by golden-section refinement around the
/// best sample. Returns the minimizer, its value and the scan samples.
pub fn scan_and_refine<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    points: usize,
    tol: f64,
) -> (f64, f64, Vec<(f64, f64)>) {
    let samples: Vec<(f64, f64)> = (0..points)
        .map(|i| {
            let s = lo + (hi - lo) * i as f64 / (points - 1) as f64;
            (s, f(s))
        })
        .collect();
    let k = (0..points).min_by(|&a, &b| samples[a].1.total_cmp(&samples[b].1)).unwrap();
    let a = samples[k.saturating_sub(1)].0;
    let b = samples[(k + 1).min(points - 1)].0;
    let (s, v) = golden_section(&mut f, a, b, tol);
    if v <= samples[k].1 {
        (s, v, samples)
    } else {
        (samples[k].0, samples[k].1, samples)
    }
}
