//! Basis atoms `w_a`, their dual atoms `v_a`, and the inner-product matrix `H`.
//!
//! For a pair `a = (i, j)` the basis atom is `e_ii + e_jj - e_ij - e_ji`, so
//! `<X, w_a>` reads the squared distance between points `i` and `j` off a
//! Gram matrix `X`. The dual atom is the rank-2 dyad
//! `v_a = -1/2 (a b^T + b a^T)` with `a = J(:, i)` and `b = J(:, j)`, which
//! satisfies `<v_a, w_b> = delta_ab` without ever forming `H^{-1}`.
//!
//! `H[a, b] = <w_a, w_b>` is 4 on the diagonal, 1 when the pairs share a
//! vertex and 0 otherwise, i.e. `4 I` plus the adjacency matrix of the
//! triangular graph (the line graph of `K_n`). Its spectrum is
//! `{2, n, 2n}` with multiplicities `L - n`, `n - 1` and `1`.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Error, Result};
use crate::pairspace::{centering_column, pair_count, pairs, PairIndex};

/// Largest pair count `L` for which dense `L x L` matrices are built.
pub const DENSE_PAIR_CAP: usize = 20_000;

fn check_dense(n: usize) -> Result<usize> {
    if n < 2 {
        return domain(format!("need n >= 2, got {n}"));
    }
    let l = pair_count(n);
    if l > DENSE_PAIR_CAP {
        return Err(Error::Resource {
            what: "pair-indexed matrix",
            dim: l,
            cap: DENSE_PAIR_CAP,
        });
    }
    Ok(l)
}

/// The integer matrix `w_a`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisAtom {
    alpha: PairIndex,
}

impl BasisAtom {
    pub fn alpha(&self) -> PairIndex {
        self.alpha
    }

    pub fn entries(&self) -> DMatrix<i64> {
        let n = self.alpha.n();
        let (i, j) = self.alpha.rows();
        let mut m = DMatrix::zeros(n, n);
        m[(i, i)] = 1;
        m[(j, j)] = 1;
        m[(i, j)] = -1;
        m[(j, i)] = -1;
        m
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        self.entries().map(|v| v as f64)
    }

    /// Trace inner product `<X, w_a>`.
    pub fn inner(&self, x: &DMatrix<f64>) -> f64 {
        let (i, j) = self.alpha.rows();
        x[(i, i)] + x[(j, j)] - x[(i, j)] - x[(j, i)]
    }
}

pub fn basis_atom(alpha: PairIndex) -> BasisAtom {
    BasisAtom { alpha }
}

/// The dual atom `v_a`, stored through its dyadic factors.
#[derive(Debug, Clone, PartialEq)]
pub struct DualAtom {
    alpha: PairIndex,
    a: DVector<f64>,
    b: DVector<f64>,
}

impl DualAtom {
    pub fn alpha(&self) -> PairIndex {
        self.alpha
    }

    /// `J(:, i)`.
    pub fn a(&self) -> &DVector<f64> {
        &self.a
    }

    /// `J(:, j)`.
    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    /// Entry `[v_a]_{r,c}` for 0-based `r`, `c`.
    pub fn entry(&self, r: usize, c: usize) -> f64 {
        -0.5 * (self.a[r] * self.b[c] + self.b[r] * self.a[c])
    }

    /// The dense `n x n` matrix `-1/2 (a b^T + b a^T)`.
    pub fn matrix(&self) -> DMatrix<f64> {
        let ab = &self.a * self.b.transpose();
        (&ab + ab.transpose()) * -0.5
    }

    /// Trace inner product with a basis atom, `<v_a, w_b>`.
    pub fn inner_basis(&self, w: &BasisAtom) -> f64 {
        let (k, l) = w.alpha.rows();
        self.entry(k, k) + self.entry(l, l) - 2.0 * self.entry(k, l)
    }

    /// `<v_a, v_b>` from the dyadic factors:
    /// `1/2 ((a.c)(b.d) + (a.d)(b.c))` for `v_b = -1/2 (c d^T + d c^T)`.
    pub fn inner_dual(&self, other: &DualAtom) -> f64 {
        let ac = self.a.dot(&other.a);
        let bd = self.b.dot(&other.b);
        let ad = self.a.dot(&other.b);
        let bc = self.b.dot(&other.a);
        0.5 * (ac * bd + ad * bc)
    }
}

pub fn dual_atom(alpha: PairIndex) -> DualAtom {
    let (i, j) = alpha.rows();
    let n = alpha.n();
    DualAtom {
        alpha,
        a: centering_column(n, i),
        b: centering_column(n, j),
    }
}

/// The two nonzero eigenpairs of `v_a`: `(1/2, a - b)` and `(-1/2 + 1/n, a + b)`.
///
/// At `n = 2` the second eigenvalue is zero (and `a + b = 0`), so `v_a` has
/// rank one there.
pub fn dual_atom_eigenpairs(alpha: PairIndex) -> [(f64, DVector<f64>); 2] {
    let v = dual_atom(alpha);
    let n = alpha.n() as f64;
    [(0.5, &v.a - &v.b), (-0.5 + 1.0 / n, &v.a + &v.b)]
}

/// The `L x L` inner-product matrix of the basis atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisGram {
    n: usize,
    entries: DMatrix<i64>,
}

impl BasisGram {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &DMatrix<i64> {
        &self.entries
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        self.entries.map(|v| v as f64)
    }
}

// 4 on the diagonal, 0 for disjoint pairs, 1 otherwise.
fn gram_case(alpha: &PairIndex, beta: &PairIndex) -> i64 {
    if alpha == beta {
        4
    } else if alpha.shares_vertex(beta) {
        1
    } else {
        0
    }
}

pub fn basis_gram(n: usize) -> Result<BasisGram> {
    let l = check_dense(n)?;
    let all: Vec<PairIndex> = pairs(n).collect();
    let entries = DMatrix::from_fn(l, l, |r, c| gram_case(&all[r], &all[c]));
    Ok(BasisGram { n, entries })
}

/// `H x` without materializing `H`.
///
/// With `s_v` the sum of `x` over pairs containing vertex `v`,
/// `(H x)_(i,j) = 2 x_(i,j) + s_i + s_j`.
pub fn basis_gram_apply(n: usize, x: &DVector<f64>) -> Result<DVector<f64>> {
    let l = pair_count(n);
    if n < 2 || x.len() != l {
        return domain(format!("vector of length {} does not match L = {l}", x.len()));
    }
    let mut vertex_sums = vec![0.0; n];
    for (p, v) in pairs(n).zip(x.iter()) {
        let (i, j) = p.rows();
        vertex_sums[i] += v;
        vertex_sums[j] += v;
    }
    Ok(DVector::from_iterator(
        l,
        pairs(n).zip(x.iter()).map(|(p, v)| {
            let (i, j) = p.rows();
            2.0 * v + vertex_sums[i] + vertex_sums[j]
        }),
    ))
}

/// Adjacency matrix of the triangular graph `T_n`, built as the line graph of
/// `K_n`: for each vertex of `K_n`, all edges incident to it are joined.
pub fn triangular_graph_adjacency(n: usize) -> Result<DMatrix<i64>> {
    let l = check_dense(n)?;
    let mut adj = DMatrix::zeros(l, l);
    for v in 1..=n {
        let incident: Vec<usize> = pairs(n)
            .filter(|p| p.i() == v || p.j() == v)
            .map(|p| p.pos())
            .collect();
        for &x in &incident {
            for &y in &incident {
                if x != y {
                    adj[(x, y)] = 1;
                }
            }
        }
    }
    Ok(adj)
}

/// Closed-form spectrum of `H`: `[(2, L-n), (n, n-1), (2n, 1)]`.
///
/// Zero multiplicities are dropped and coinciding values merged, which only
/// matters for `n = 2` (`H = [4]`) and `n = 3` (no eigenvalue 2).
pub fn h_spectrum_predicted(n: usize) -> Result<Vec<(f64, usize)>> {
    if n < 2 {
        return domain(format!("need n >= 2, got {n}"));
    }
    let l = pair_count(n) as i64;
    let n_i = n as i64;
    let raw = [(2, l - n_i), (n_i, n_i - 1), (2 * n_i, 1)];
    let mut out: Vec<(i64, i64)> = Vec::new();
    for (value, mult) in raw {
        match out.iter_mut().find(|(v, _)| *v == value) {
            Some(slot) => slot.1 += mult,
            None => out.push((value, mult)),
        }
    }
    Ok(out
        .into_iter()
        .filter(|(_, m)| *m > 0)
        .map(|(v, m)| (v as f64, m as usize))
        .collect())
}

/// `[H^{-1}]_{a,b} = <v_a, v_b>`.
pub fn dual_gram_entry(alpha: PairIndex, beta: PairIndex) -> Result<f64> {
    if alpha.n() != beta.n() {
        return domain(format!(
            "pairs belong to different point counts ({} and {})",
            alpha.n(),
            beta.n()
        ));
    }
    Ok(dual_atom(alpha).inner_dual(&dual_atom(beta)))
}

/// The full matrix of dual inner products, which equals `H^{-1}`.
pub fn dual_gram(n: usize) -> Result<DMatrix<f64>> {
    let l = check_dense(n)?;
    let atoms: Vec<DualAtom> = pairs(n).map(dual_atom).collect();
    Ok(DMatrix::from_fn(l, l, |r, c| atoms[r].inner_dual(&atoms[c])))
}

/// Spectrum check for `H` that never materializes it.
#[derive(Debug, Clone, PartialEq)]
pub struct ImplicitSpectrumCheck {
    pub n: usize,
    /// Largest `||(H - 2)(H - n)(H - 2n) x|| / ||x||` over the random probes.
    pub annihilator_residual: f64,
    /// Multiplicities of `2`, `n`, `2n` recovered from `tr H` and `tr H^2`.
    pub multiplicities: [f64; 3],
}

impl ImplicitSpectrumCheck {
    /// Whether the probes are annihilated and the recovered multiplicities
    /// equal `(L - n, n - 1, 1)`.
    pub fn passes(&self, tol: f64) -> bool {
        let n = self.n as f64;
        let l = pair_count(self.n) as f64;
        let expected = [l - n, n - 1.0, 1.0];
        self.annihilator_residual <= tol * (2.0 * n).powi(3)
            && self
                .multiplicities
                .iter()
                .zip(expected)
                .all(|(m, e)| (m - e).abs() <= 1e-6 * e.max(1.0))
    }
}

/// Checks that `H` has spectrum within `{2, n, 2n}` through its minimal
/// polynomial on random probes, then recovers the multiplicities from
/// `tr H` and `tr H^2` (both counted from the entry rule in `O(L n)`).
pub fn h_spectrum_implicit(n: usize, probes: usize, seed: u64) -> Result<ImplicitSpectrumCheck> {
    if n < 3 {
        return domain(format!("implicit check needs distinct eigenvalues, n >= 3, got {n}"));
    }
    let l = pair_count(n);
    let nf = n as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    for _ in 0..probes.max(1) {
        let x = DVector::from_fn(l, |_, _| rng.random_range(-1.0..1.0));
        let mut y = x.clone();
        for shift in [2.0, nf, 2.0 * nf] {
            y = basis_gram_apply(n, &y)? - &y * shift;
        }
        worst = worst.max(y.norm() / x.norm());
    }

    let mut trace = 0.0;
    let mut frob = 0.0;
    for alpha in pairs(n) {
        // neighbors of (i, j) are {u, i} and {u, j} for u outside the pair
        for v in [alpha.i(), alpha.j()] {
            for u in (1..=n).filter(|&u| u != alpha.i() && u != alpha.j()) {
                let beta = PairIndex::new(u.min(v), u.max(v), n)?;
                let h = gram_case(&alpha, &beta) as f64;
                frob += h * h;
            }
        }
        let d = gram_case(&alpha, &alpha) as f64;
        trace += d;
        frob += d * d;
    }

    // Solve sum m_k = L, sum m_k x_k = tr H, sum m_k x_k^2 = tr H^2.
    let x = [2.0, nf, 2.0 * nf];
    let system = nalgebra::Matrix3::new(
        1.0, 1.0, 1.0, x[0], x[1], x[2], x[0] * x[0], x[1] * x[1], x[2] * x[2],
    );
    let rhs = nalgebra::Vector3::new(l as f64, trace, frob);
    let m = system
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Domain("singular moment system".into()))?;
    Ok(ImplicitSpectrumCheck {
        n,
        annihilator_residual: worst,
        multiplicities: [m[0], m[1], m[2]],
    })
}
