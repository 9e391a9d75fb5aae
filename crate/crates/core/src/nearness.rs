//! Triangle-inequality constraint matrix from metric nearness.
//!
//! Each vertex triple `i < j < k` contributes three rows, one per choice of
//! the positive pair, encoding `D_pos - D_neg1 - D_neg2 <= 0`. Rows follow
//! the triples in lexicographic order; inside a triple the positive pair is
//! `(i,j)`, then `(i,k)`, then `(j,k)`. Columns follow the pair order, so
//! `A` is `3 C(n,3) x C(n,2)` with `3(n-2)` nonzeros per column, and
//! `A^T A = (3n - 2) I - H`.

use std::io::Write;

use nalgebra::{DMatrix, DVector};

use crate::basis::{basis_gram, h_spectrum_predicted, DENSE_PAIR_CAP};
use crate::error::{domain, Error, Result};
use crate::pairspace::{check_hollow, check_symmetric, pair_count, upper_entries, PairIndex, DEFAULT_TOLERANCE};

/// Nonnegative symmetric hollow matrix of plain (not squared) distances.
#[derive(Debug, Clone, PartialEq)]
pub struct DissimilarityMatrix(DMatrix<f64>);

impl DissimilarityMatrix {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        const WHAT: &str = "dissimilarity matrix";
        if entries.nrows() != entries.ncols() || entries.nrows() < 3 {
            return domain("dissimilarity matrix must be square with at least 3 points");
        }
        if entries.iter().any(|v| !v.is_finite() || *v < -DEFAULT_TOLERANCE) {
            return domain("dissimilarity matrix entries must be finite and nonnegative");
        }
        check_symmetric(&entries, DEFAULT_TOLERANCE, WHAT)?;
        check_hollow(&entries, DEFAULT_TOLERANCE, WHAT)?;
        Ok(Self(entries))
    }

    /// Plain Euclidean distances between the rows of `points`.
    pub fn from_points(points: &DMatrix<f64>) -> Result<Self> {
        let n = points.nrows();
        let d = DMatrix::from_fn(n, n, |a, b| (points.row(a) - points.row(b)).norm());
        Self::new(d)
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.0
    }
}

/// `D_(i,k) - D_(i,j) - D_(j,k) <= 0`, written with the positive pair
/// `(i,k)` and the remaining vertex `j` of the triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TripleConstraint {
    positive: PairIndex,
    apex: usize,
}

impl TripleConstraint {
    pub fn positive(&self) -> PairIndex {
        self.positive
    }

    /// Vertex of the triple outside the positive pair.
    pub fn apex(&self) -> usize {
        self.apex
    }

    /// The two pairs entering with sign `-1`, in pair order.
    pub fn negatives(&self) -> [PairIndex; 2] {
        let n = self.positive.n();
        let mk = |u: usize, v: usize| {
            PairIndex::new(u.min(v), u.max(v), n).expect("triple vertices are distinct")
        };
        let mut neg = [mk(self.positive.i(), self.apex), mk(self.positive.j(), self.apex)];
        neg.sort();
        neg
    }

    /// Row label `(p_i, p_k, p_j)`: the positive pair first, then the apex.
    pub fn label(&self) -> (usize, usize, usize) {
        (self.positive.i(), self.positive.j(), self.apex)
    }

    /// Signed `(column, sign)` entries, 0-based columns in ascending order.
    fn entries(&self) -> [(usize, i64); 3] {
        let [a, b] = self.negatives();
        let mut e = [(self.positive.pos(), 1), (a.pos(), -1), (b.pos(), -1)];
        e.sort();
        e
    }
}

/// Sparse `{-1, 0, 1}` matrix of triangle constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintMatrix {
    n: usize,
    constraints: Vec<TripleConstraint>,
}

/// A nonzero of `A` with 1-based row and column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Triplet {
    pub row: usize,
    pub col: usize,
    pub sign: i64,
}

impl ConstraintMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nrows(&self) -> usize {
        self.constraints.len()
    }

    pub fn ncols(&self) -> usize {
        pair_count(self.n)
    }

    pub fn nnz(&self) -> usize {
        3 * self.constraints.len()
    }

    pub fn constraints(&self) -> &[TripleConstraint] {
        &self.constraints
    }

    /// 1-based row of the constraint labelled `(p_i, p_k, p_j)`.
    pub fn row_of_label(&self, label: (usize, usize, usize)) -> Option<usize> {
        self.constraints
            .iter()
            .position(|c| c.label() == label)
            .map(|r| r + 1)
    }

    /// Row `row` (1-based) as a dense sign vector over the pair columns.
    pub fn dense_row(&self, row: usize) -> Option<Vec<i64>> {
        let c = self.constraints.get(row.checked_sub(1)?)?;
        let mut out = vec![0; self.ncols()];
        for (col, sign) in c.entries() {
            out[col] = sign;
        }
        Some(out)
    }

    /// Nonzeros sorted by `(row, col)`, 1-based.
    pub fn triplets(&self) -> Vec<Triplet> {
        self.constraints
            .iter()
            .enumerate()
            .flat_map(|(r, c)| {
                c.entries().into_iter().map(move |(col, sign)| Triplet {
                    row: r + 1,
                    col: col + 1,
                    sign,
                })
            })
            .collect()
    }

    pub fn to_dense(&self) -> DMatrix<i64> {
        let mut a = DMatrix::zeros(self.nrows(), self.ncols());
        for t in self.triplets() {
            a[(t.row - 1, t.col - 1)] = t.sign;
        }
        a
    }

    /// `A^T A`, accumulated in integers from the sparse rows.
    pub fn gram(&self) -> Result<DMatrix<i64>> {
        let l = self.ncols();
        if l > DENSE_PAIR_CAP {
            return Err(Error::Resource {
                what: "constraint Gram matrix",
                dim: l,
                cap: DENSE_PAIR_CAP,
            });
        }
        let mut g = DMatrix::zeros(l, l);
        for c in &self.constraints {
            let e = c.entries();
            for &(r, sr) in &e {
                for &(s, ss) in &e {
                    g[(r, s)] += sr * ss;
                }
            }
        }
        Ok(g)
    }

    /// `A x` for `x` indexed by pairs.
    pub fn apply(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        if x.len() != self.ncols() {
            return domain(format!(
                "vector of length {} does not match {} columns",
                x.len(),
                self.ncols()
            ));
        }
        Ok(DVector::from_iterator(
            self.nrows(),
            self.constraints.iter().map(|c| {
                c.entries()
                    .iter()
                    .map(|&(col, sign)| sign as f64 * x[col])
                    .sum::<f64>()
            }),
        ))
    }

    /// Writes `row col sign` lines, 1-based, sorted by `(row, col)`.
    pub fn write_triplets<W: Write>(&self, mut out: W) -> Result<()> {
        for t in self.triplets() {
            writeln!(out, "{} {} {}", t.row, t.col, t.sign)?;
        }
        Ok(())
    }
}

pub fn constraint_matrix(n: usize) -> Result<ConstraintMatrix> {
    if n < 3 {
        return domain(format!("constraint matrix needs n >= 3 (a vertex triple), got {n}"));
    }
    let mut constraints = Vec::with_capacity(n * (n - 1) * (n - 2) / 2);
    for i in 1..=n {
        for j in i + 1..=n {
            for k in j + 1..=n {
                for (u, v, apex) in [(i, j, k), (i, k, j), (j, k, i)] {
                    constraints.push(TripleConstraint {
                        positive: PairIndex::new(u, v, n)?,
                        apex,
                    });
                }
            }
        }
    }
    Ok(ConstraintMatrix { n, constraints })
}

/// Comparison of `A^T A` against `(3n - 2) I - H`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramIdentityCheck {
    pub n: usize,
    pub holds: bool,
    /// Largest absolute integer deviation.
    pub max_deviation: i64,
    /// Common diagonal value of `A^T A` if all diagonal entries agree.
    pub diagonal: Option<i64>,
}

pub fn gram_identity_check(n: usize) -> Result<GramIdentityCheck> {
    let ata = constraint_matrix(n)?.gram()?;
    let h = basis_gram(n)?;
    let l = pair_count(n);
    let expected = DMatrix::<i64>::identity(l, l) * (3 * n as i64 - 2) - h.entries();
    let max_deviation = (&ata - expected).iter().map(|v| v.abs()).max().unwrap_or(0);
    let first = ata[(0, 0)];
    let diagonal = ata.diagonal().iter().all(|&d| d == first).then_some(first);
    Ok(GramIdentityCheck {
        n,
        holds: max_deviation == 0,
        max_deviation,
        diagonal,
    })
}

/// `[(sqrt(3n-4), n(n-3)/2), (sqrt(2n-2), n-1), (sqrt(n-2), 1)]`, obtained as
/// `sqrt((3n - 2) - lambda)` over the spectrum of `H`. Zero multiplicities
/// are dropped.
pub fn predicted_singular_values(n: usize) -> Result<Vec<(f64, usize)>> {
    if n < 3 {
        return domain(format!("need n >= 3, got {n}"));
    }
    let shift = 3.0 * n as f64 - 2.0;
    Ok(h_spectrum_predicted(n)?
        .into_iter()
        .map(|(lambda, m)| ((shift - lambda).sqrt(), m))
        .collect())
}

/// A constraint violated by more than the tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    /// 1-based row of `A`.
    pub row: usize,
    pub constraint: TripleConstraint,
    /// `D_pos - D_neg1 - D_neg2`, positive when violated.
    pub slack: f64,
}

/// All rows of `A vec(D)` exceeding `tol`, ordered by row.
pub fn violations(d: &DissimilarityMatrix, tol: f64) -> Result<Vec<Violation>> {
    let a = constraint_matrix(d.n())?;
    let slacks = a.apply(&upper_entries(d.entries()))?;
    Ok(a
        .constraints
        .iter()
        .zip(slacks.iter())
        .enumerate()
        .filter(|(_, (_, s))| **s > tol)
        .map(|(r, (c, s))| Violation {
            row: r + 1,
            constraint: *c,
            slack: *s,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_point_rows() {
        let a = constraint_matrix(4).unwrap();
        assert_eq!(a.ncols(), 6);
        assert_eq!(a.nrows(), 12);
        assert_eq!(a.nnz(), 36);
        assert_eq!(a.dense_row(1).unwrap(), vec![1, -1, 0, -1, 0, 0]);
        let r = a.row_of_label((1, 3, 2)).unwrap();
        assert_eq!(a.dense_row(r).unwrap(), vec![-1, 1, 0, -1, 0, 0]);
        let r = a.row_of_label((2, 3, 1)).unwrap();
        assert_eq!(a.dense_row(r).unwrap(), vec![-1, -1, 0, 1, 0, 0]);
        let r = a.row_of_label((2, 3, 4)).unwrap();
        assert_eq!(a.dense_row(r).unwrap(), vec![0, 0, 0, 1, -1, -1]);
        assert!(constraint_matrix(2).is_err());
    }

    #[test]
    fn structure() {
        for n in 3..=9 {
            let a = constraint_matrix(n).unwrap().to_dense();
            for row in a.row_iter() {
                assert_eq!(row.iter().filter(|v| **v == 1).count(), 1);
                assert_eq!(row.iter().filter(|v| **v == -1).count(), 2);
            }
            for col in a.column_iter() {
                assert_eq!(col.iter().filter(|v| **v != 0).count(), 3 * (n - 2));
            }
        }
    }

    #[test]
    fn gram_identity_small() {
        let c = gram_identity_check(4).unwrap();
        assert!(c.holds);
        assert_eq!(c.diagonal, Some(6));
        let g = constraint_matrix(4).unwrap().gram().unwrap();
        let p = |i, j| PairIndex::new(i, j, 4).unwrap().pos();
        assert_eq!(g[(p(1, 2), p(1, 3))], -1);
        assert_eq!(g[(p(1, 2), p(3, 4))], 0);
        // dense route agrees with the sparse accumulation
        let a = constraint_matrix(5).unwrap().to_dense();
        assert_eq!(a.transpose() * &a, constraint_matrix(5).unwrap().gram().unwrap());
    }

    #[test]
    fn predicted_values() {
        let s = predicted_singular_values(4).unwrap();
        assert_eq!(s, vec![(8f64.sqrt(), 2), (6f64.sqrt(), 3), (2f64.sqrt(), 1)]);
        let s = predicted_singular_values(5).unwrap();
        assert_eq!(s, vec![(11f64.sqrt(), 5), (8f64.sqrt(), 4), (3f64.sqrt(), 1)]);
        for n in 3..=30 {
            let total: usize = predicted_singular_values(n).unwrap().iter().map(|s| s.1).sum();
            assert_eq!(total, pair_count(n));
        }
    }

    #[test]
    fn violation_scan() {
        let ones = DMatrix::from_fn(5, 5, |a, b| if a == b { 0.0 } else { 1.0 });
        assert!(violations(&DissimilarityMatrix::new(ones).unwrap(), 0.0).unwrap().is_empty());

        let d = DissimilarityMatrix::new(DMatrix::from_row_slice(
            3,
            3,
            &[0., 3., 1., 3., 0., 1., 1., 1., 0.],
        ))
        .unwrap();
        let v = violations(&d, 1e-12).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].constraint.label(), (1, 2, 3));
        assert!((v[0].slack - 1.0).abs() < 1e-15);

        let pts = DMatrix::from_row_slice(5, 2, &[0., 0., 1., 0., 0., 2., -1., 1., 3., 3.]);
        let d = DissimilarityMatrix::from_points(&pts).unwrap();
        assert!(violations(&d, 1e-12).unwrap().is_empty());
    }

    #[test]
    fn triplet_export() {
        let mut buf = Vec::new();
        constraint_matrix(3).unwrap().write_triplets(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines, ["1 1 1", "1 2 -1", "1 3 -1", "2 1 -1", "2 2 1", "2 3 -1", "3 1 -1", "3 2 -1", "3 3 1"]);
    }
}
