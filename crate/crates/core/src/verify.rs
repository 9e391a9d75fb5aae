//! End-to-end verification of the closed-form results for a given `n`.

use nalgebra::{DMatrix, DVector};

use crate::basis::{
    basis_atom, basis_gram, dual_atom, dual_atom_eigenpairs, dual_gram, h_spectrum_predicted,
    triangular_graph_adjacency,
};
use crate::error::{domain, Result};
use crate::nearness::{constraint_matrix, gram_identity_check, predicted_singular_values};
use crate::pairspace::{pair_count, pairs, PairIndex};
use crate::spectral::{group_spectrum, singular_values, spectrum, sym_eig, DEFAULT_GROUP_TOLERANCE};
use crate::stability::{amplification_factor, NOISE_BOUND};

/// Largest `n` accepted by [`verify`]; keeps every dense matrix below
/// 2000 x 2000.
pub const VERIFY_MAX_N: usize = 63;

/// Four-point fixtures, integer entries scaled by 16 where fractional.
pub mod fixtures {
    pub const W12: [[i64; 4]; 4] = [[1, -1, 0, 0], [-1, 1, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]];

    pub const V12_X16: [[i64; 4]; 4] = [[3, -5, 1, 1], [-5, 3, 1, 1], [1, 1, -1, -1], [1, 1, -1, -1]];

    pub const H: [[i64; 6]; 6] = [
        [4, 1, 1, 1, 1, 0],
        [1, 4, 1, 1, 0, 1],
        [1, 1, 4, 0, 1, 1],
        [1, 1, 0, 4, 1, 1],
        [1, 0, 1, 1, 4, 1],
        [0, 1, 1, 1, 1, 4],
    ];

    pub const H_INV_X16: [[i64; 6]; 6] = [
        [5, -1, -1, -1, -1, 1],
        [-1, 5, -1, -1, 1, -1],
        [-1, -1, 5, 1, -1, -1],
        [-1, -1, 1, 5, -1, -1],
        [-1, 1, -1, -1, 5, -1],
        [1, -1, -1, -1, -1, 5],
    ];

    /// Labelled rows `(p_i, p_k, p_j)` of the four-point constraint matrix.
    pub const CONSTRAINT_ROWS: [((usize, usize, usize), [i64; 6]); 4] = [
        ((1, 2, 3), [1, -1, 0, -1, 0, 0]),
        ((1, 3, 2), [-1, 1, 0, -1, 0, 0]),
        ((2, 3, 1), [-1, -1, 0, 1, 0, 0]),
        ((2, 3, 4), [0, 0, 0, 1, -1, -1]),
    ];
}

/// Outcome of one check, with labelled numeric payloads.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub pass: bool,
    pub values: Vec<(String, f64)>,
}

impl CheckResult {
    fn new(name: &'static str, pass: bool) -> Self {
        Self {
            name,
            pass,
            values: Vec::new(),
        }
    }

    fn with(mut self, label: impl Into<String>, value: f64) -> Self {
        self.values.push((label.into(), value));
        self
    }
}

fn fixture_deviation<const R: usize>(m: &DMatrix<f64>, fixture: &[[i64; R]; R], scale: f64) -> f64 {
    let mut worst = 0.0_f64;
    for (r, row) in fixture.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            worst = worst.max((m[(r, c)] - *v as f64 / scale).abs());
        }
    }
    worst
}

/// Four-point `w_12`, `v_12`, `H`, `H^{-1}` against the stored fixtures
/// (tolerance `1e-12` after scaling).
pub fn check_fixtures() -> CheckResult {
    let p = PairIndex::new(1, 2, 4).expect("valid pair");
    let w = fixture_deviation(&basis_atom(p).to_f64(), &fixtures::W12, 1.0);
    let v = fixture_deviation(&dual_atom(p).matrix(), &fixtures::V12_X16, 16.0);
    let h = fixture_deviation(&basis_gram(4).expect("n = 4").to_f64(), &fixtures::H, 1.0);
    let hi = fixture_deviation(&dual_gram(4).expect("n = 4"), &fixtures::H_INV_X16, 16.0);
    let a = constraint_matrix(4).expect("n = 4");
    let rows_match = fixtures::CONSTRAINT_ROWS.iter().all(|(label, expected)| {
        a.row_of_label(*label)
            .and_then(|r| a.dense_row(r))
            .is_some_and(|row| row == expected)
    });
    let worst = w.max(v).max(h).max(hi);
    CheckResult::new("fixtures", worst <= 1e-12 && rows_match)
        .with("w12_deviation", w)
        .with("v12_deviation", v)
        .with("h_deviation", h)
        .with("h_inverse_deviation", hi)
        .with("constraint_rows_match", if rows_match { 1.0 } else { 0.0 })
}

pub fn check_h_spectrum(n: usize) -> Result<CheckResult> {
    let report = spectrum(&basis_gram(n)?.to_f64(), DEFAULT_GROUP_TOLERANCE)?;
    let predicted = h_spectrum_predicted(n)?;
    let mut c = CheckResult::new("h_spectrum", report.matches(&predicted, 1e-8));
    for (value, mult) in &report.groups {
        c = c.with(format!("eigenvalue {value:.12}"), *mult as f64);
    }
    Ok(c)
}

pub fn check_triangular_decomposition(n: usize) -> Result<CheckResult> {
    let l = pair_count(n);
    let h = basis_gram(n)?;
    let diff = h.entries() - DMatrix::<i64>::identity(l, l) * 4;
    let adj = triangular_graph_adjacency(n)?;
    let mismatches = diff.iter().zip(adj.iter()).filter(|(a, b)| a != b).count();
    Ok(CheckResult::new("triangular_decomposition", mismatches == 0)
        .with("mismatched_entries", mismatches as f64))
}

/// Exhaustive `|<v_a, w_b> - delta_ab|` over all pairs of pairs.
pub fn check_biorthogonality(n: usize) -> Result<CheckResult> {
    if n < 2 {
        return domain(format!("need n >= 2, got {n}"));
    }
    let duals: Vec<_> = pairs(n).map(dual_atom).collect();
    let bases: Vec<_> = pairs(n).map(basis_atom).collect();
    let mut worst = 0.0_f64;
    for (r, v) in duals.iter().enumerate() {
        for (c, w) in bases.iter().enumerate() {
            let delta = if r == c { 1.0 } else { 0.0 };
            worst = worst.max((v.inner_basis(w) - delta).abs());
        }
    }
    Ok(CheckResult::new("biorthogonality", worst <= 1e-12).with("max_deviation", worst))
}

/// Deviation of one materialized dual atom from its closed-form spectrum:
/// eigenvalue error, eigenvector misalignment, and the number of eigenvalues
/// above `1e-10` in magnitude.
pub fn dual_atom_spectrum_deviation(alpha: PairIndex) -> Result<(f64, f64, usize)> {
    let eig = sym_eig(&dual_atom(alpha).matrix())?;
    let nonzero: Vec<usize> = (0..eig.eigenvalues.len())
        .filter(|&k| eig.eigenvalues[k].abs() > 1e-10)
        .collect();
    let mut value_err = 0.0_f64;
    let mut vector_err = 0.0_f64;
    for (lambda, u) in dual_atom_eigenpairs(alpha) {
        if lambda.abs() <= 1e-10 {
            continue;
        }
        let k = (0..eig.eigenvalues.len())
            .min_by(|&a, &b| {
                (eig.eigenvalues[a] - lambda)
                    .abs()
                    .total_cmp(&(eig.eigenvalues[b] - lambda).abs())
            })
            .expect("nonempty spectrum");
        value_err = value_err.max((eig.eigenvalues[k] - lambda).abs());
        let unit: DVector<f64> = u.normalize();
        let got = eig.eigenvectors.column(k);
        let aligned = (got - &unit).norm().min((got + &unit).norm());
        vector_err = vector_err.max(aligned);
    }
    Ok((value_err, vector_err, nonzero.len()))
}

pub fn check_dual_spectrum(n: usize) -> Result<CheckResult> {
    let mut value_err = 0.0_f64;
    let mut vector_err = 0.0_f64;
    let mut rank_ok = true;
    let expected_rank = if n >= 3 { 2 } else { 1 };
    for alpha in pairs(n) {
        let (v, u, rank) = dual_atom_spectrum_deviation(alpha)?;
        value_err = value_err.max(v);
        vector_err = vector_err.max(u);
        rank_ok &= rank == expected_rank;
        let sv = singular_values(&dual_atom(alpha).matrix());
        rank_ok &= sv.iter().filter(|s| **s > 1e-10).count() == expected_rank;
    }
    Ok(
        CheckResult::new("dual_spectrum", rank_ok && value_err <= 1e-10 && vector_err <= 1e-9)
            .with("eigenvalue_deviation", value_err)
            .with("eigenvector_deviation", vector_err),
    )
}

pub fn check_dual_gram_inverse(n: usize) -> Result<CheckResult> {
    let l = pair_count(n);
    let prod = dual_gram(n)? * basis_gram(n)?.to_f64();
    let dev = (prod - DMatrix::identity(l, l)).amax();
    Ok(CheckResult::new("dual_gram_inverse", dev <= 1e-9).with("max_deviation", dev))
}

pub fn check_nearness_identity(n: usize) -> Result<CheckResult> {
    let c = gram_identity_check(n)?;
    let diag_ok = c.diagonal == Some(3 * (n as i64 - 2));
    Ok(CheckResult::new("nearness_identity", c.holds && diag_ok)
        .with("max_deviation", c.max_deviation as f64)
        .with("diagonal", c.diagonal.map_or(f64::NAN, |d| d as f64)))
}

/// Singular values of `A` against the predicted three-value spectrum. Uses a
/// dense SVD of `A` while it has at most two million entries, otherwise the
/// square roots of the eigenvalues of the exact `A^T A`.
pub fn check_singular_values(n: usize) -> Result<CheckResult> {
    let a = constraint_matrix(n)?;
    let values = if a.nrows() * a.ncols() <= 2_000_000 {
        singular_values(&a.to_dense().map(|v| v as f64))
    } else {
        let ata = a.gram()?.map(|v| v as f64);
        sym_eig(&ata)?
            .eigenvalues
            .into_iter()
            .map(|l| l.max(0.0).sqrt())
            .collect()
    };
    let report = group_spectrum(&values, DEFAULT_GROUP_TOLERANCE);
    let predicted = predicted_singular_values(n)?;
    let mut c = CheckResult::new("singular_values", report.matches(&predicted, 1e-8));
    for (value, mult) in &report.groups {
        c = c.with(format!("singular value {value:.12}"), *mult as f64);
    }
    Ok(c)
}

pub fn check_amplification(n: usize) -> Result<CheckResult> {
    let f = amplification_factor(n)?;
    Ok(CheckResult::new("amplification_factor", f < NOISE_BOUND).with("factor", f))
}

/// Runs every check for `n` in `3..=VERIFY_MAX_N`; the fixture check is
/// included when `n = 4`.
pub fn verify(n: usize) -> Result<Vec<CheckResult>> {
    if !(3..=VERIFY_MAX_N).contains(&n) {
        return domain(format!("verify supports 3 <= n <= {VERIFY_MAX_N}, got {n}"));
    }
    let mut out = Vec::new();
    if n == 4 {
        out.push(check_fixtures());
    }
    out.push(check_h_spectrum(n)?);
    out.push(check_triangular_decomposition(n)?);
    out.push(check_biorthogonality(n)?);
    out.push(check_dual_spectrum(n)?);
    out.push(check_dual_gram_inverse(n)?);
    out.push(check_nearness_identity(n)?);
    out.push(check_singular_values(n)?);
    out.push(check_amplification(n)?);
    Ok(out)
}
