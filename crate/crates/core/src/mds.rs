//! Classical multidimensional scaling.
//!
//! Two independent routes lead from squared distances to the Gram matrix:
//! [`double_center`] forms `-1/2 J D J` directly, and [`dual_expansion`]
//! sums `D_ij v_ij` over the dyadic dual atoms. [`measure_coefficients`]
//! goes the other way, reading `<X, w_ij>` off a Gram matrix.

use nalgebra::{DMatrix, DVector};

use crate::basis::{basis_atom, dual_atom};
use crate::error::{domain, Error, Result};
use crate::pairspace::{
    centering_matrix, pair_count, pairs, upper_entries, GramMatrix, PointConfiguration,
    SquaredDistanceMatrix,
};
use crate::spectral::sym_eig;

/// Default relative threshold for rank detection and the Schoenberg test.
pub const DEFAULT_RANK_TOLERANCE: f64 = 1e-8;

/// `D[i, j] = ||p_i - p_j||^2`.
pub fn squared_distances(points: &PointConfiguration) -> SquaredDistanceMatrix {
    let p = points.points();
    let n = p.nrows();
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let v = (p.row(i) - p.row(j)).norm_squared();
            d[(i, j)] = v;
            d[(j, i)] = v;
        }
    }
    SquaredDistanceMatrix::from_trusted(d)
}

/// `X = -1/2 J D J`.
pub fn double_center(d: &SquaredDistanceMatrix) -> GramMatrix {
    let j = centering_matrix(d.n()).expect("validated matrices have n >= 2");
    let j = j.entries();
    let x = j * d.entries() * j * -0.5;
    GramMatrix::from_trusted((&x + x.transpose()) * 0.5)
}

/// `sum_(i,j) c_ij v_ij` for coefficients given in pair order.
pub fn expand_coefficients(n: usize, coefficients: &[f64]) -> Result<DMatrix<f64>> {
    if n < 2 || coefficients.len() != pair_count(n) {
        return domain(format!(
            "expected {} coefficients for n = {n}, got {}",
            pair_count(n),
            coefficients.len()
        ));
    }
    let mut x = DMatrix::zeros(n, n);
    for (p, &c) in pairs(n).zip(coefficients) {
        if c == 0.0 {
            continue;
        }
        let v = dual_atom(p);
        // x += c v_p = -c/2 (a b^T + b a^T)
        x.ger(-0.5 * c, v.a(), v.b(), 1.0);
        x.ger(-0.5 * c, v.b(), v.a(), 1.0);
    }
    Ok(x)
}

/// `sum_(i<j) D_ij v_ij`, built from the dyadic dual atoms.
pub fn dual_expansion(d: &SquaredDistanceMatrix) -> GramMatrix {
    let coeffs = upper_entries(d.entries());
    let x = expand_coefficients(d.n(), coeffs.as_slice()).expect("length matches by construction");
    GramMatrix::from_trusted(x)
}

/// Coefficients `<X, w_a>` in pair order.
pub fn measure_coefficients(x: &GramMatrix) -> DVector<f64> {
    let n = x.n();
    DVector::from_iterator(
        pair_count(n),
        pairs(n).map(|p| basis_atom(p).inner(x.entries())),
    )
}

/// Outcome of the Schoenberg test on `-1/2 J D J`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchoenbergTest {
    pub euclidean: bool,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
}

/// `D` is squared-Euclidean iff `lambda_min >= -tol * max(1, lambda_max)`.
pub fn is_euclidean(d: &SquaredDistanceMatrix, tol: f64) -> SchoenbergTest {
    let eig = sym_eig(double_center(d).entries()).expect("Gram matrix is symmetric");
    schoenberg(&eig.eigenvalues, tol)
}

fn schoenberg(desc: &[f64], tol: f64) -> SchoenbergTest {
    let max_eigenvalue = desc[0];
    let min_eigenvalue = desc[desc.len() - 1];
    SchoenbergTest {
        euclidean: min_eigenvalue >= -tol * max_eigenvalue.max(1.0),
        min_eigenvalue,
        max_eigenvalue,
    }
}

/// Recovered coordinates with the spectral bookkeeping behind them.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingResult {
    pub points: PointConfiguration,
    /// Eigenvalues backing the nonzero coordinate columns, descending.
    pub retained_eigenvalues: Vec<f64>,
    /// Sum of `|lambda|` over eigenvalues that were not retained.
    pub discarded_mass: f64,
    /// Number of eigenvalues above `tol * lambda_max`.
    pub rank: usize,
    pub min_eigenvalue: f64,
    /// Zero columns appended because the requested dimension exceeded the rank.
    pub padded_dims: usize,
}

/// Embeds `D` with a truncated eigendecomposition of `-1/2 J D J`.
///
/// With `dim = None` the embedding dimension is the detected rank (at least
/// one column, so `D = 0` yields all points at the origin of a line). A
/// requested dimension above the detected rank is honored with zero columns
/// and reported through `padded_dims`.
pub fn embed(d: &SquaredDistanceMatrix, dim: Option<usize>, tol: f64) -> Result<EmbeddingResult> {
    let n = d.n();
    if let Some(r) = dim {
        if r >= n {
            return domain(format!("embedding dimension {r} must be below the point count {n}"));
        }
    }
    let eig = sym_eig(double_center(d).entries())?;
    let test = schoenberg(&eig.eigenvalues, tol);
    if !test.euclidean {
        return Err(Error::NonEuclidean {
            min_eigenvalue: test.min_eigenvalue,
        });
    }
    let lambda_max = test.max_eigenvalue;
    let rank = if lambda_max > 0.0 {
        eig.eigenvalues
            .iter()
            .filter(|&&l| l > tol * lambda_max)
            .count()
    } else {
        0
    };
    let cols = dim.unwrap_or(rank.max(1));
    let kept = rank.min(cols);
    let padded_dims = if dim.is_some() { cols - kept } else { 0 };

    let mut p = DMatrix::zeros(n, cols);
    for k in 0..kept {
        let scale = eig.eigenvalues[k].sqrt();
        p.set_column(k, &(eig.eigenvectors.column(k) * scale));
    }
    let retained_eigenvalues = eig.eigenvalues[..kept].to_vec();
    let discarded_mass = eig.eigenvalues[kept..].iter().map(|l| l.abs()).sum();
    Ok(EmbeddingResult {
        points: PointConfiguration::new(p)?,
        retained_eigenvalues,
        discarded_mass,
        rank,
        min_eigenvalue: test.min_eigenvalue,
        padded_dims,
    })
}

fn centered_padded(p: &DMatrix<f64>, cols: usize) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(p.nrows(), cols);
    for (k, col) in p.column_iter().enumerate() {
        let mean = col.mean();
        out.set_column(k, &col.add_scalar(-mean));
    }
    out
}

/// Minimal Frobenius distance between centered `p` and centered `q` over
/// orthogonal transforms (rotations and reflections).
pub fn procrustes_residual(p: &PointConfiguration, q: &PointConfiguration) -> Result<f64> {
    if p.n() != q.n() {
        return domain(format!(
            "configurations have different point counts ({} and {})",
            p.n(),
            q.n()
        ));
    }
    let cols = p.dim().max(q.dim());
    let a = centered_padded(p.points(), cols);
    let b = centered_padded(q.points(), cols);
    if cols == 0 {
        return Ok(0.0);
    }
    let svd = (a.transpose() * &b).svd(true, true);
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return domain("SVD of the cross-covariance failed"),
    };
    let rotation = u * v_t;
    Ok((a * rotation - b).norm())
}
