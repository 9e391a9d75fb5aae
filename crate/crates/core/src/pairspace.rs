//! Canonical indexing of the unordered pairs `{(i, j) : 1 <= i < j <= n}` and
//! the validated matrix value types shared by the rest of the crate.
//!
//! Pair indices are 1-based everywhere they are visible. The linear order is
//! lexicographic: `(1,2), (1,3), ..., (1,n), (2,3), ..., (n-1,n)`.

use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{domain, Result};

/// Default absolute tolerance used when validating matrix invariants.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Number of pairs `L = n(n-1)/2`.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// An ordered pair `(i, j)` with `1 <= i < j <= n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairIndex {
    i: usize,
    j: usize,
    n: usize,
}

impl PairIndex {
    pub fn new(i: usize, j: usize, n: usize) -> Result<Self> {
        if i < 1 || i >= j || j > n {
            return domain(format!(
                "invalid pair ({i}, {j}) for n = {n}: need 1 <= i < j <= n"
            ));
        }
        Ok(Self { i, j, n })
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// 1-based position of the pair in lexicographic order.
    pub fn linear(&self) -> usize {
        pair_to_linear(*self)
    }

    /// Whether the two pairs have a vertex in common (including equality).
    pub fn shares_vertex(&self, other: &PairIndex) -> bool {
        self.i == other.i || self.i == other.j || self.j == other.i || self.j == other.j
    }

    // 0-based offsets used for matrix storage.
    pub(crate) fn pos(&self) -> usize {
        self.linear() - 1
    }

    pub(crate) fn rows(&self) -> (usize, usize) {
        (self.i - 1, self.j - 1)
    }
}

impl fmt::Display for PairIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

/// Lexicographic position of `p`, in `1..=L`.
pub fn pair_to_linear(p: PairIndex) -> usize {
    let (i, j, n) = (p.i, p.j, p.n);
    // pairs whose first vertex is below i: (n-1) + (n-2) + ... + (n-i+1)
    (i - 1) * (2 * n - i) / 2 + (j - i)
}

/// Inverse of [`pair_to_linear`].
pub fn linear_to_pair(k: usize, n: usize) -> Result<PairIndex> {
    let total = pair_count(n);
    if k < 1 || k > total {
        return domain(format!("linear index {k} out of range 1..={total} for n = {n}"));
    }
    let mut rest = k;
    let mut i = 1;
    while rest > n - i {
        rest -= n - i;
        i += 1;
    }
    PairIndex::new(i, i + rest, n)
}

/// All pairs for `n` points in lexicographic order.
pub fn pairs(n: usize) -> impl Iterator<Item = PairIndex> {
    (1..=n).flat_map(move |i| (i + 1..=n).map(move |j| PairIndex { i, j, n }))
}

/// Upper-triangular entries of a square matrix in pair order.
pub(crate) fn upper_entries(m: &DMatrix<f64>) -> DVector<f64> {
    let n = m.nrows();
    DVector::from_iterator(pair_count(n), pairs(n).map(|p| m[p.rows()]))
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

fn check_square(m: &DMatrix<f64>, what: &str) -> Result<()> {
    if m.nrows() != m.ncols() {
        return domain(format!("{what} must be square, got {}x{}", m.nrows(), m.ncols()));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return domain(format!("{what} contains non-finite entries"));
    }
    Ok(())
}

pub(crate) fn check_symmetric(m: &DMatrix<f64>, tol: f64, what: &str) -> Result<()> {
    let n = m.nrows();
    for i in 0..n {
        for j in i + 1..n {
            let diff = (m[(i, j)] - m[(j, i)]).abs();
            if diff > tol {
                return domain(format!(
                    "{what} is not symmetric: entries ({},{}) and ({},{}) differ by {diff:e}",
                    i + 1,
                    j + 1,
                    j + 1,
                    i + 1
                ));
            }
        }
    }
    Ok(())
}

pub(crate) fn check_hollow(m: &DMatrix<f64>, tol: f64, what: &str) -> Result<()> {
    for i in 0..m.nrows() {
        if m[(i, i)].abs() > tol {
            return domain(format!(
                "{what} must have zero diagonal, entry ({},{}) is {}",
                i + 1,
                i + 1,
                m[(i, i)]
            ));
        }
    }
    Ok(())
}

fn check_nonnegative(m: &DMatrix<f64>, tol: f64, what: &str) -> Result<()> {
    if let Some(((i, j), v)) = m
        .iter()
        .enumerate()
        .map(|(k, v)| ((k % m.nrows(), k / m.nrows()), *v))
        .find(|(_, v)| *v < -tol)
    {
        return domain(format!("{what} has negative entry {v} at ({},{})", i + 1, j + 1));
    }
    Ok(())
}

/// Symmetric, hollow, nonnegative matrix of squared pairwise distances.
#[derive(Debug, Clone, PartialEq)]
pub struct SquaredDistanceMatrix(DMatrix<f64>);

impl SquaredDistanceMatrix {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        Self::with_tolerance(entries, DEFAULT_TOLERANCE)
    }

    pub fn with_tolerance(entries: DMatrix<f64>, tol: f64) -> Result<Self> {
        const WHAT: &str = "squared distance matrix";
        check_square(&entries, WHAT)?;
        if entries.nrows() < 2 {
            return domain("squared distance matrix needs at least 2 points");
        }
        check_symmetric(&entries, tol, WHAT)?;
        check_hollow(&entries, tol, WHAT)?;
        check_nonnegative(&entries, tol, WHAT)?;
        Ok(Self(entries))
    }

    /// Builds the matrix from upper-triangular values in pair order.
    pub fn from_pair_values(n: usize, values: &[f64]) -> Result<Self> {
        if values.len() != pair_count(n) {
            return domain(format!(
                "expected {} pair values for n = {n}, got {}",
                pair_count(n),
                values.len()
            ));
        }
        let mut m = DMatrix::zeros(n, n);
        for (p, v) in pairs(n).zip(values) {
            let (a, b) = p.rows();
            m[(a, b)] = *v;
            m[(b, a)] = *v;
        }
        Self::new(m)
    }

    // Skips validation; callers guarantee the invariants by construction.
    pub(crate) fn from_trusted(entries: DMatrix<f64>) -> Self {
        Self(entries)
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        max_abs(&self.0)
    }
}

/// Symmetric, zero-centered (`X 1 = 0`) matrix.
///
/// The row-sum check uses `tol * max(1, max|X|)` so that validation does not
/// depend on the scale of the configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix(DMatrix<f64>);

impl GramMatrix {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        Self::with_tolerance(entries, DEFAULT_TOLERANCE)
    }

    pub fn with_tolerance(entries: DMatrix<f64>, tol: f64) -> Result<Self> {
        const WHAT: &str = "Gram matrix";
        check_square(&entries, WHAT)?;
        let scaled = tol * max_abs(&entries).max(1.0);
        check_symmetric(&entries, scaled, WHAT)?;
        for (r, row) in entries.row_iter().enumerate() {
            let sum: f64 = row.iter().sum();
            if sum.abs() > scaled {
                return domain(format!(
                    "Gram matrix is not zero-centered: row {} sums to {sum:e}",
                    r + 1
                ));
            }
        }
        Ok(Self(entries))
    }

    pub(crate) fn from_trusted(entries: DMatrix<f64>) -> Self {
        Self(entries)
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.0)
    }
}

/// `n` points in `R^r`, one per row, with `n > r`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointConfiguration(DMatrix<f64>);

impl PointConfiguration {
    pub fn new(points: DMatrix<f64>) -> Result<Self> {
        if points.nrows() <= points.ncols() {
            return domain(format!(
                "point configuration needs more points than dimensions, got {} points in R^{}",
                points.nrows(),
                points.ncols()
            ));
        }
        if points.iter().any(|v| !v.is_finite()) {
            return domain("point configuration contains non-finite coordinates");
        }
        Ok(Self(points))
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn dim(&self) -> usize {
        self.0.ncols()
    }

    pub fn points(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    /// Same points translated so that their centroid is the origin.
    pub fn centered(&self) -> PointConfiguration {
        let mut p = self.0.clone();
        for mut col in p.column_iter_mut() {
            let mean = col.mean();
            col.add_scalar_mut(-mean);
        }
        PointConfiguration(p)
    }

    /// Frobenius norm of the coordinate matrix.
    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }
}

/// The centering matrix `J = I - (1/n) 1 1^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct CenteringMatrix {
    n: usize,
    entries: DMatrix<f64>,
}

impl CenteringMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Entry `J[a, b]` for 1-based `a`, `b`.
    pub fn entry(&self, a: usize, b: usize) -> f64 {
        centering_entry(self.n, a - 1, b - 1)
    }

    /// Column `J(:, i)` for 1-based `i`, i.e. `e_i - (1/n) 1`.
    pub fn column(&self, i: usize) -> DVector<f64> {
        centering_column(self.n, i - 1)
    }
}

pub(crate) fn centering_entry(n: usize, a: usize, b: usize) -> f64 {
    let inv = 1.0 / n as f64;
    if a == b {
        1.0 - inv
    } else {
        -inv
    }
}

pub(crate) fn centering_column(n: usize, i: usize) -> DVector<f64> {
    DVector::from_fn(n, |a, _| centering_entry(n, a, i))
}

pub fn centering_matrix(n: usize) -> Result<CenteringMatrix> {
    if n < 2 {
        return domain(format!("centering matrix needs n >= 2, got {n}"));
    }
    let entries = DMatrix::from_fn(n, n, |a, b| centering_entry(n, a, b));
    Ok(CenteringMatrix { n, entries })
}
