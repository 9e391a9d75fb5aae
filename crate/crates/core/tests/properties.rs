use dualmds::basis::{dual_gram_entry, h_spectrum_predicted, basis_gram};
use dualmds::mds::{
    double_center, dual_expansion, embed, expand_coefficients, is_euclidean, measure_coefficients,
    procrustes_residual, squared_distances,
};
use dualmds::nalgebra::DMatrix;
use dualmds::nearness::constraint_matrix;
use dualmds::pairspace::{centering_matrix, pair_count, pairs, GramMatrix, PointConfiguration, SquaredDistanceMatrix};
use dualmds::spectral::{group_spectrum, spectrum, sym_eig};
use dualmds::stability::{amplification_factor, noise_experiment, worst_case_ratio};
use proptest::prelude::*;

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = DMatrix<f64>> {
    proptest::collection::vec(-3.0f64..3.0, rows * cols)
        .prop_map(move |v| DMatrix::from_row_slice(rows, cols, &v))
}

fn points(n: std::ops::RangeInclusive<usize>, r: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = PointConfiguration> {
    (n, r).prop_flat_map(|(n, r)| matrix(n, r.min(n - 1)))
        .prop_map(|m| PointConfiguration::new(m).unwrap())
}

fn distances() -> impl Strategy<Value = SquaredDistanceMatrix> {
    (3usize..=12).prop_flat_map(|n| {
        proptest::collection::vec(0.0f64..100.0, pair_count(n))
            .prop_map(move |v| SquaredDistanceMatrix::from_pair_values(n, &v).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn expansion_equals_double_centering(d in distances()) {
        let dev = (dual_expansion(&d).entries() - double_center(&d).entries()).amax();
        prop_assert!(dev <= 1e-10 * d.max_abs().max(1.0));
    }

    #[test]
    fn coefficients_recover_centered_matrices(s in (3usize..=10).prop_flat_map(|n| matrix(n, n))) {
        let n = s.nrows();
        let j = centering_matrix(n).unwrap();
        let sym = (&s + s.transpose()) * 0.5;
        let x = GramMatrix::new(j.entries() * sym * j.entries()).unwrap();
        let coeffs = measure_coefficients(&x);
        let back = expand_coefficients(n, coeffs.as_slice()).unwrap();
        prop_assert!((back - x.entries()).amax() <= 1e-10);
    }

    #[test]
    fn embedding_round_trip(p in points(4..=20, 1..=3)) {
        let e = embed(&squared_distances(&p), Some(p.dim()), 1e-8).unwrap();
        let residual = procrustes_residual(&e.points, &p.centered()).unwrap();
        prop_assert!(residual <= 1e-7 * p.frobenius_norm().max(1e-300));
    }

    #[test]
    fn euclidean_expansions_are_psd(p in points(3..=12, 1..=4)) {
        let d = squared_distances(&p);
        let eig = sym_eig(dual_expansion(&d).entries()).unwrap();
        let max = eig.eigenvalues[0];
        let min = *eig.eigenvalues.last().unwrap();
        prop_assert!(min >= -1e-9 * max.max(1e-300));
        prop_assert!(is_euclidean(&d, 1e-8).euclidean);
    }

    #[test]
    fn rank_matches_generating_points(p in points(5..=15, 1..=3)) {
        // random continuous coordinates are in general position almost surely
        let e = embed(&squared_distances(&p), None, 1e-8).unwrap();
        prop_assert_eq!(e.rank, p.dim());
    }
}

#[test]
fn constraint_gram_spectrum_transfers_from_h() {
    for n in 3..=12 {
        let ata = constraint_matrix(n).unwrap().gram().unwrap().map(|v| v as f64);
        let report = spectrum(&ata, 1e-8).unwrap();
        let shift = 3.0 * n as f64 - 2.0;
        let expected: Vec<(f64, usize)> = h_spectrum_predicted(n)
            .unwrap()
            .into_iter()
            .map(|(l, m)| (shift - l, m))
            .collect();
        assert!(report.matches(&expected, 1e-8), "n = {n}: {:?}", report.groups);
    }
}

#[test]
fn h_spectrum_groups_for_six_points() {
    let eig = sym_eig(&basis_gram(6).unwrap().to_f64()).unwrap();
    let r = group_spectrum(&eig.eigenvalues, 1e-8);
    assert_eq!(r.groups.len(), 3);
    let expected = [(12.0, 1), (6.0, 5), (2.0, 9)];
    for ((v, m), (ev, em)) in r.groups.iter().zip(expected) {
        assert!((v - ev).abs() < 1e-10);
        assert_eq!(*m, em);
    }
}

#[test]
fn dual_gram_closed_form_by_case() {
    for n in 3..=9 {
        let nf = n as f64;
        for a in pairs(n) {
            for b in pairs(n) {
                let shared = [a.i(), a.j()].iter().filter(|v| **v == b.i() || **v == b.j()).count();
                let expected = match shared {
                    2 => (nf * nf - 2.0 * nf + 2.0) / (2.0 * nf * nf),
                    1 => (2.0 - nf) / (2.0 * nf * nf),
                    _ => 1.0 / (nf * nf),
                };
                assert!((dual_gram_entry(a, b).unwrap() - expected).abs() < 1e-15);
            }
        }
    }
}

#[test]
fn observed_ratios_never_exceed_factor() {
    for n in [3, 5, 9] {
        let report = noise_experiment(n, 2, 0.5, 300, n as u64).unwrap();
        assert!(report.max_ratio <= worst_case_ratio(n).unwrap() + 1e-12);
        assert!(report.max_ratio <= amplification_factor(n).unwrap());
    }
}
