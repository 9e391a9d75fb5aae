//! Deterministic symmetric eigendecomposition and multiplicity grouping.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{domain, Result};
use crate::pairspace::check_symmetric;

/// Default relative tolerance for merging eigenvalues into one group.
pub const DEFAULT_GROUP_TOLERANCE: f64 = 1e-8;

/// Eigenvalues (descending) with their orthonormal eigenvectors as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigendecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<f64>,
}

/// Distinct values of a spectrum together with their multiplicities.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    /// `(representative, multiplicity)`, representatives strictly decreasing.
    pub groups: Vec<(f64, usize)>,
    /// All values, sorted descending.
    pub values: Vec<f64>,
    pub tolerance: f64,
}

impl SpectrumReport {
    pub fn dimension(&self) -> usize {
        self.groups.iter().map(|(_, m)| m).sum()
    }

    /// Compares against `(value, multiplicity)` pairs in any order.
    ///
    /// Entries with zero multiplicity are ignored. Values are compared with
    /// `rel_tol * max(1, |expected|)`; multiplicities must agree exactly.
    pub fn matches(&self, expected: &[(f64, usize)], rel_tol: f64) -> bool {
        let mut expected: Vec<(f64, usize)> =
            expected.iter().copied().filter(|(_, m)| *m > 0).collect();
        expected.sort_by(|a, b| b.0.total_cmp(&a.0));
        expected.len() == self.groups.len()
            && expected
                .iter()
                .zip(&self.groups)
                .all(|(&(ev, em), &(gv, gm))| {
                    em == gm && (ev - gv).abs() <= rel_tol * ev.abs().max(1.0)
                })
    }

    /// Largest relative deviation of a group representative from the paired
    /// expected value, or `None` when the group structure differs.
    pub fn max_deviation(&self, expected: &[(f64, usize)]) -> Option<f64> {
        let mut expected: Vec<(f64, usize)> =
            expected.iter().copied().filter(|(_, m)| *m > 0).collect();
        expected.sort_by(|a, b| b.0.total_cmp(&a.0));
        if expected.len() != self.groups.len()
            || expected.iter().zip(&self.groups).any(|(e, g)| e.1 != g.1)
        {
            return None;
        }
        Some(
            expected
                .iter()
                .zip(&self.groups)
                .map(|(e, g)| (e.0 - g.0).abs() / e.0.abs().max(1.0))
                .fold(0.0, f64::max),
        )
    }
}

/// Eigendecomposition of a symmetric matrix.
///
/// Eigenvalues are sorted descending. Each eigenvector is normalized so that
/// its largest-magnitude component is positive, ties going to the lowest
/// index. Identical input gives bit-identical output.
pub fn sym_eig(m: &DMatrix<f64>) -> Result<Eigendecomposition> {
    if m.nrows() != m.ncols() {
        return domain(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        ));
    }
    let scale = m.amax().max(1.0);
    check_symmetric(m, 1e-9 * scale, "matrix")?;
    let n = m.nrows();
    if n == 0 {
        return Ok(Eigendecomposition {
            eigenvalues: Vec::new(),
            eigenvectors: DMatrix::zeros(0, 0),
        });
    }

    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(src).clone_owned();
        fix_sign(&mut v);
        eigenvectors.set_column(dst, &v);
    }
    Ok(Eigendecomposition {
        eigenvalues,
        eigenvectors,
    })
}

fn fix_sign(v: &mut DVector<f64>) {
    let mut best = 0;
    for (k, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = k;
        }
    }
    if v[best] < 0.0 {
        v.neg_mut();
    }
}

/// Singular values of an arbitrary matrix, sorted descending.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Merges adjacent values that lie within `rel_tol * max(1, |value|)`.
///
/// `values` must be sorted descending. The representative of a group is the
/// mean of its members.
pub fn group_spectrum(values: &[f64], rel_tol: f64) -> SpectrumReport {
    let mut groups: Vec<(f64, usize)> = Vec::new();
    let mut sum = 0.0;
    let mut count = 0usize;
    let mut prev = f64::NAN;
    for &v in values {
        if count > 0 && (prev - v).abs() <= rel_tol * v.abs().max(1.0) {
            sum += v;
            count += 1;
        } else {
            if count > 0 {
                groups.push((sum / count as f64, count));
            }
            sum = v;
            count = 1;
        }
        prev = v;
    }
    if count > 0 {
        groups.push((sum / count as f64, count));
    }
    SpectrumReport {
        groups,
        values: values.to_vec(),
        tolerance: rel_tol,
    }
}

/// Eigendecomposition followed by grouping, for spectrum checks.
pub fn spectrum(m: &DMatrix<f64>, rel_tol: f64) -> Result<SpectrumReport> {
    let eig = sym_eig(m)?;
    Ok(group_spectrum(&eig.eigenvalues, rel_tol))
}
