//! Entrywise stability of the Gram matrix under additive noise on the
//! squared distances.
//!
//! The map `D -> X` is linear, so `X_noisy - X = sum_(i<j) noise_ij v_ij` and
//! `||X_noisy - X||_max <= F(n) ||noise||_max` with
//! `F(n) = max_(a,b) sum_(i<j) |J_ai J_jb|`. `F(n)` stays below 4 for every
//! `n`.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::basis::dual_atom;
use crate::error::{domain, Result};
use crate::mds::{dual_expansion, expand_coefficients, squared_distances};
use crate::pairspace::{
    check_hollow, check_symmetric, pair_count, pairs, upper_entries, GramMatrix,
    PointConfiguration, SquaredDistanceMatrix, DEFAULT_TOLERANCE,
};

/// The strict upper bound on the amplification.
pub const NOISE_BOUND: f64 = 4.0;

/// Symmetric, hollow additive perturbation of a squared-distance matrix.
/// Entries may have either sign.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseMatrix(DMatrix<f64>);

impl NoiseMatrix {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return domain("noise matrix must be square");
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return domain("noise matrix contains non-finite entries");
        }
        check_symmetric(&entries, DEFAULT_TOLERANCE, "noise matrix")?;
        check_hollow(&entries, DEFAULT_TOLERANCE, "noise matrix")?;
        Ok(Self(entries))
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn max_abs(&self) -> f64 {
        self.0.amax()
    }
}

// For fixed 0-based (a, b), write |J_ai| = s + d [i = a] with s = 1/n and
// d = (n-2)/n. Expanding the product over i < j leaves counting terms:
//   sum_(i<j) |J_ai J_jb| = s^2 L + s d (n-1-a) + s d b + d^2 [a < b]
//   sum_(i<j) |J_aj J_ib| = s^2 L + s d (n-1-b) + s d a + d^2 [b < a]
fn pair_product_sum(n: usize, a: usize, b: usize, swapped: bool) -> f64 {
    let nf = n as f64;
    let s = 1.0 / nf;
    let d = (nf - 2.0) / nf;
    let l = pair_count(n) as f64;
    let (first, second) = if swapped { (b, a) } else { (a, b) };
    let ordered = if first < second { d * d } else { 0.0 };
    s * s * l + s * d * ((n - 1 - first) as f64 + second as f64) + ordered
}

fn factor(n: usize, swapped: bool) -> Result<f64> {
    if n < 2 {
        return domain(format!("need n >= 2, got {n}"));
    }
    let mut best = 0.0_f64;
    for a in 0..n {
        for b in 0..n {
            best = best.max(pair_product_sum(n, a, b, swapped));
        }
    }
    Ok(best)
}

/// `F(n) = max_(a,b) sum_(i<j) |J_ai J_jb|`, evaluated over every `(a, b)`.
pub fn amplification_factor(n: usize) -> Result<f64> {
    factor(n, false)
}

/// The same maximum written as `max_(a,b) sum_(i<j) |J_aj J_ib|`.
pub fn amplification_factor_swapped(n: usize) -> Result<f64> {
    factor(n, true)
}

/// The attainable worst case `max_(a,b) sum_(i<j) |[v_ij]_ab|`, reached by
/// noise whose signs follow the dual atom entries at the maximizing `(a, b)`.
/// Never exceeds [`amplification_factor`].
pub fn worst_case_ratio(n: usize) -> Result<f64> {
    if n < 2 {
        return domain(format!("need n >= 2, got {n}"));
    }
    let atoms: Vec<_> = pairs(n).map(dual_atom).collect();
    let mut best = 0.0_f64;
    for a in 0..n {
        for b in a..n {
            let s: f64 = atoms.iter().map(|v| v.entry(a, b).abs()).sum();
            best = best.max(s);
        }
    }
    Ok(best)
}

/// Gram matrix of `D + noise` through the dual expansion. Noisy values may
/// be negative; the map stays well defined.
pub fn perturbed_gram(d: &SquaredDistanceMatrix, noise: &NoiseMatrix) -> Result<GramMatrix> {
    if noise.entries().shape() != d.entries().shape() {
        return domain(format!(
            "noise shape {:?} does not match distance shape {:?}",
            noise.entries().shape(),
            d.entries().shape()
        ));
    }
    let sum = d.entries() + noise.entries();
    let x = expand_coefficients(d.n(), upper_entries(&sum).as_slice())?;
    GramMatrix::new(x)
}

/// Outcome of a randomized noise experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub n: usize,
    pub dim: usize,
    pub epsilon: f64,
    pub trials: usize,
    pub seed: u64,
    /// Largest `||X_noisy - X||_max / ||noise||_max` seen.
    pub max_ratio: f64,
    pub amplification_factor: f64,
    pub bound: f64,
    pub pass: bool,
}

fn trial_ratio(n: usize, dim: usize, epsilon: f64, seed: u64, trial: usize) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    let points = PointConfiguration::new(DMatrix::from_fn(n, dim, |_, _| {
        StandardNormal.sample(&mut rng)
    }))?;
    let d = squared_distances(&points);
    let mut noise = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let v = epsilon * rng.random_range(-1.0..=1.0);
            noise[(i, j)] = v;
            noise[(j, i)] = v;
        }
    }
    let noise = NoiseMatrix::new(noise)?;
    let scale = noise.max_abs();
    if scale == 0.0 {
        return Ok(0.0);
    }
    let clean = dual_expansion(&d);
    let noisy = perturbed_gram(&d, &noise)?;
    Ok((noisy.entries() - clean.entries()).amax() / scale)
}

/// Runs `trials` seeded noise trials on random standard-normal
/// configurations of `n` points in `R^dim`.
///
/// Trial `t` draws from a ChaCha stream `t` under the master seed, so the
/// report does not depend on how trials are scheduled.
pub fn noise_experiment(
    n: usize,
    dim: usize,
    epsilon: f64,
    trials: usize,
    seed: u64,
) -> Result<StabilityReport> {
    if trials < 1 {
        return domain("noise experiment needs at least one trial");
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return domain(format!("epsilon must be positive, got {epsilon}"));
    }
    if dim < 1 || n <= dim {
        return domain(format!("need n > r >= 1, got n = {n}, r = {dim}"));
    }
    let ratios = (0..trials)
        .into_par_iter()
        .map(|t| trial_ratio(n, dim, epsilon, seed, t))
        .collect::<Result<Vec<f64>>>()?;
    let max_ratio = ratios.into_iter().fold(0.0, f64::max);
    let amplification_factor = amplification_factor(n)?;
    Ok(StabilityReport {
        n,
        dim,
        epsilon,
        trials,
        seed,
        max_ratio,
        amplification_factor,
        bound: NOISE_BOUND,
        pass: max_ratio < NOISE_BOUND && max_ratio <= amplification_factor + 1e-12,
    })
}
