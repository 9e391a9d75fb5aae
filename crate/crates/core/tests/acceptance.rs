//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use dualmds::basis::{basis_atom, basis_gram, dual_atom, dual_gram, triangular_graph_adjacency};
use dualmds::mds::{dual_expansion, embed, procrustes_residual, squared_distances};
use dualmds::nalgebra::{DMatrix, DVector};
use dualmds::nearness::{constraint_matrix, gram_identity_check};
use dualmds::pairspace::{pair_count, pairs, PairIndex, PointConfiguration};
use dualmds::spectral::{singular_values, sym_eig};
use dualmds::stability::{amplification_factor, noise_experiment, NOISE_BOUND};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn centering(n: usize) -> DMatrix<f64> {
    DMatrix::identity(n, n) - DMatrix::from_element(n, n, 1.0 / n as f64)
}

fn ints<const R: usize>(rows: [[i64; R]; R]) -> DMatrix<f64> {
    DMatrix::from_fn(R, R, |r, c| rows[r][c] as f64)
}

/// Counts values within `rel_tol * max(1, |target|)` of each target and
/// checks that nothing is left over.
fn spectrum_matches(values: &[f64], expected: &[(f64, usize)], rel_tol: f64) -> bool {
    let total: usize = expected.iter().map(|e| e.1).sum();
    total == values.len()
        && expected.iter().all(|&(target, mult)| {
            values
                .iter()
                .filter(|v| (*v - target).abs() <= rel_tol * target.abs().max(1.0))
                .count()
                == mult
        })
}

fn random_configuration(rng: &mut ChaCha8Rng) -> PointConfiguration {
    let n = rng.random_range(3..=12);
    let r = rng.random_range(1..=3usize.min(n - 1));
    PointConfiguration::new(DMatrix::from_fn(n, r, |_, _| StandardNormal.sample(rng))).unwrap()
}

fn c1_fixtures() -> Outcome {
    let start = Instant::now();
    let p = PairIndex::new(1, 2, 4).unwrap();
    let w = ints([[1, -1, 0, 0], [-1, 1, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]);
    let v16 = ints([[3, -5, 1, 1], [-5, 3, 1, 1], [1, 1, -1, -1], [1, 1, -1, -1]]);
    let h = ints([
        [4, 1, 1, 1, 1, 0],
        [1, 4, 1, 1, 0, 1],
        [1, 1, 4, 0, 1, 1],
        [1, 1, 0, 4, 1, 1],
        [1, 0, 1, 1, 4, 1],
        [0, 1, 1, 1, 1, 4],
    ]);
    let hinv16 = ints([
        [5, -1, -1, -1, -1, 1],
        [-1, 5, -1, -1, 1, -1],
        [-1, -1, 5, 1, -1, -1],
        [-1, -1, 1, 5, -1, -1],
        [-1, 1, -1, -1, 5, -1],
        [1, -1, -1, -1, -1, 5],
    ]);
    let dw = (basis_atom(p).to_f64() - w).amax();
    let dv = (dual_atom(p).matrix() - v16 / 16.0).amax();
    let dh = (basis_gram(4).unwrap().to_f64() - h).amax();
    let dhi = (dual_gram(4).unwrap() - hinv16 / 16.0).amax();
    let worst = dw.max(dv).max(dh).max(dhi);
    let elapsed = start.elapsed().as_secs_f64();
    outcome(
        worst <= 1e-12 && elapsed < 1.0,
        format!("max deviation {worst:e}, {elapsed:.3}s"),
    )
}

fn c2_h_spectrum() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    for n in 3..=12 {
        let l = pair_count(n);
        let eig = sym_eig(&basis_gram(n).unwrap().to_f64()).unwrap();
        let nf = n as f64;
        ok &= spectrum_matches(
            &eig.eigenvalues,
            &[(2.0, l - n), (nf, n - 1), (2.0 * nf, 1)],
            1e-8,
        );
    }
    let elapsed = start.elapsed().as_secs_f64();
    outcome(ok && elapsed < 60.0, format!("n in [3,12], {elapsed:.2}s"))
}

fn c3_triangular() -> Outcome {
    let mut ok = true;
    for n in 3..=15 {
        let all: Vec<(usize, usize)> = (1..=n)
            .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
            .collect();
        let l = all.len();
        let oracle = DMatrix::from_fn(l, l, |r, c| {
            let (a, b) = (all[r], all[c]);
            let share = a.0 == b.0 || a.0 == b.1 || a.1 == b.0 || a.1 == b.1;
            i64::from(r != c && share)
        });
        let h = basis_gram(n).unwrap();
        let diff = h.entries() - DMatrix::<i64>::identity(l, l) * 4;
        ok &= diff == oracle && triangular_graph_adjacency(n).unwrap() == oracle;
    }
    outcome(ok, "exact equality for n in [3,15]")
}

fn c4_biorthogonality() -> Outcome {
    let mut worst = 0.0_f64;
    for n in 3..=10 {
        let ws: Vec<DMatrix<f64>> = pairs(n).map(|p| basis_atom(p).to_f64()).collect();
        let vs: Vec<DMatrix<f64>> = pairs(n).map(|p| dual_atom(p).matrix()).collect();
        for (a, v) in vs.iter().enumerate() {
            for (b, w) in ws.iter().enumerate() {
                let delta = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((v.dot(w) - delta).abs());
            }
        }
    }
    outcome(worst <= 1e-12, format!("max |<v,w> - delta| = {worst:e}"))
}

fn c5_dual_spectrum() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut ok = true;
    let mut worst_value = 0.0_f64;
    let mut worst_vector = 0.0_f64;
    for n in 3..=12 {
        for _ in 0..6 {
            let i = rng.random_range(1..n);
            let j = rng.random_range(i + 1..=n);
            let v = dual_atom(PairIndex::new(i, j, n).unwrap()).matrix();
            let eig = sym_eig(&v).unwrap();
            let nonzero: Vec<usize> = (0..n).filter(|&k| eig.eigenvalues[k].abs() > 1e-10).collect();
            if nonzero.len() != 2 {
                ok = false;
                continue;
            }
            let jm = centering(n);
            let a: DVector<f64> = jm.column(i - 1).into();
            let b: DVector<f64> = jm.column(j - 1).into();
            // the two eigenvalues are distinct, so descending order is fixed
            let targets = [(0.5, &a - &b), (-0.5 + 1.0 / n as f64, &a + &b)];
            for (k, (lambda, dir)) in nonzero.iter().zip(targets) {
                worst_value = worst_value.max((eig.eigenvalues[*k] - lambda).abs());
                let u = eig.eigenvectors.column(*k);
                let dir = dir.normalize();
                worst_vector = worst_vector.max(1.0 - u.dot(&dir).abs());
            }
        }
    }
    ok &= worst_value <= 1e-10 && worst_vector <= 1e-10;
    outcome(
        ok,
        format!("eigenvalue error {worst_value:e}, 1-|cos| {worst_vector:e}"),
    )
}

fn c6_two_routes() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0_f64;
    let mut ok = true;
    for _ in 0..100 {
        let p = random_configuration(&mut rng);
        let d = squared_distances(&p);
        let j = centering(p.n());
        let direct = &j * d.entries() * &j * -0.5;
        let dev = (dual_expansion(&d).entries() - direct).amax();
        let scale = d.max_abs().max(1.0);
        ok &= dev <= 1e-10 * scale;
        worst = worst.max(dev / scale);
    }
    outcome(ok, format!("max scaled deviation {worst:e}"))
}

fn c7_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0_f64;
    let mut ok = true;
    for _ in 0..100 {
        let p = random_configuration(&mut rng);
        let d = squared_distances(&p);
        let e = embed(&d, Some(p.dim()), 1e-8).unwrap();
        let residual = procrustes_residual(&e.points, &p.centered()).unwrap();
        let rel = residual / p.frobenius_norm();
        // second witness: recovered points reproduce the distances
        let back = squared_distances(&e.points);
        let dist_dev = (back.entries() - d.entries()).amax() / d.max_abs().max(1.0);
        ok &= rel <= 1e-7 && dist_dev <= 1e-9;
        worst = worst.max(rel);
    }
    outcome(ok, format!("max residual / ||P||_F = {worst:e}"))
}

fn brute_amplification(n: usize) -> f64 {
    let j = centering(n);
    let mut best = 0.0_f64;
    for a in 0..n {
        for b in 0..n {
            let mut s = 0.0;
            for i in 0..n {
                for k in i + 1..n {
                    s += (j[(a, i)] * j[(k, b)]).abs();
                }
            }
            best = best.max(s);
        }
    }
    best
}

fn c8_noise() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    for n in 2..=200 {
        ok &= amplification_factor(n).unwrap() < NOISE_BOUND;
    }
    let oracle4 = brute_amplification(4);
    let f4 = amplification_factor(4).unwrap();
    ok &= (f4 - oracle4).abs() < 1e-15 && (oracle4 - 11.0 / 8.0).abs() < 1e-15;
    // the (a,b) = (1,2) row of the same sum
    let j = centering(4);
    let row12: f64 = pairs(4)
        .map(|p| (j[(0, p.i() - 1)] * j[(p.j() - 1, 1)]).abs())
        .sum();
    let mut max_ratios = Vec::new();
    for (k, n) in [4usize, 8, 16].into_iter().enumerate() {
        let report = noise_experiment(n, 2, 1e-3, 1000, 100 + k as u64).unwrap();
        ok &= report.pass && report.max_ratio <= amplification_factor(n).unwrap();
        max_ratios.push(report.max_ratio);
    }
    let elapsed = start.elapsed().as_secs_f64();
    ok &= elapsed < 60.0;
    outcome(
        ok,
        format!(
            "factor(4) = {f4} (brute force {oracle4}; row (1,2) alone = {row12}), \
             max ratios {max_ratios:.4?}, {elapsed:.2}s"
        ),
    )
}

fn c9_identity() -> Outcome {
    let mut ok = true;
    for n in 3..=25 {
        let c = gram_identity_check(n).unwrap();
        let ata = constraint_matrix(n).unwrap().gram().unwrap();
        let diag_ok = ata.diagonal().iter().all(|&d| d == 3 * (n as i64 - 2));
        ok &= c.holds && c.max_deviation == 0 && diag_ok;
    }
    outcome(ok, "zero integer deviation for n in [3,25]")
}

fn c10_singular_values() -> Outcome {
    let mut ok = true;
    for n in 3..=12 {
        let a = constraint_matrix(n).unwrap().to_dense().map(|v| v as f64);
        let sv = singular_values(&a);
        let nf = n as f64;
        ok &= spectrum_matches(
            &sv,
            &[
                ((3.0 * nf - 4.0).sqrt(), n * (n - 3) / 2),
                ((2.0 * nf - 2.0).sqrt(), n - 1),
                ((nf - 2.0).sqrt(), 1),
            ],
            1e-8,
        );
    }
    outcome(ok, "multiplicities (n(n-3)/2, n-1, 1) for n in [3,12]")
}

fn c11_table_rows() -> Outcome {
    let a = constraint_matrix(4).unwrap();
    let expected: [((usize, usize, usize), [i64; 6]); 4] = [
        ((1, 2, 3), [1, -1, 0, -1, 0, 0]),
        ((1, 3, 2), [-1, 1, 0, -1, 0, 0]),
        ((2, 3, 1), [-1, -1, 0, 1, 0, 0]),
        ((2, 3, 4), [0, 0, 0, 1, -1, -1]),
    ];
    let ok = expected.iter().all(|(label, row)| {
        a.row_of_label(*label)
            .and_then(|r| a.dense_row(r))
            .is_some_and(|got| got == row)
    });
    outcome(ok && a.row_of_label((1, 2, 3)) == Some(1), "labelled rows match")
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("1  four-point fixtures", c1_fixtures),
        ("2  H spectrum", c2_h_spectrum),
        ("3  triangular-graph decomposition", c3_triangular),
        ("4  biorthogonality", c4_biorthogonality),
        ("5  dual-atom spectrum", c5_dual_spectrum),
        ("6  two-route Gram equivalence", c6_two_routes),
        ("7  embedding round trip", c7_round_trip),
        ("8  noise bound", c8_noise),
        ("9  metric-nearness identity", c9_identity),
        ("10 constraint singular values", c10_singular_values),
        ("11 constraint rows", c11_table_rows),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let o = run();
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
