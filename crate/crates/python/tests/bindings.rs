use dualmds_py::{matrix_to_rows, rows_to_matrix};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn run(script: &str) {
    Python::initialize();
    Python::attach(|py| {
        let module = pyo3::wrap_pymodule!(dualmds_py::dualmds_py)(py);
        let globals = PyDict::new(py);
        globals.set_item("m", module).unwrap();
        let code = std::ffi::CString::new(script).unwrap();
        if let Err(err) = py.run(&code, Some(&globals), None) {
            err.print(py);
            panic!("python script failed");
        }
    });
}

#[test]
fn row_conversion_round_trips() {
    let rows = vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]];
    let m = rows_to_matrix(&rows).unwrap();
    assert_eq!(m[(1, 0)], 4.0);
    assert_eq!(matrix_to_rows(&m), rows);
    assert!(rows_to_matrix(&[vec![1.0], vec![1.0, 2.0]]).is_err());
}

#[test]
fn pair_index_class() {
    run(r#"
p = m.PairIndex(2, 4, 5)
assert (p.i, p.j, p.n) == (2, 4, 5)
assert p.linear() == 6
assert m.PairIndex.from_linear(6, 5) == p
assert p.shares_vertex(m.PairIndex(1, 4, 5))
assert not p.shares_vertex(m.PairIndex(1, 3, 5))
try:
    m.PairIndex(3, 3, 5)
    raise AssertionError("expected ValueError")
except ValueError:
    pass
"#);
}

#[test]
fn unit_square_embedding() {
    run(r#"
pts = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]
d = m.squared_distances(pts)
assert d[0][2] == 2.0
a, b = m.double_center(d), m.dual_expansion(d)
assert max(abs(x - y) for r, s in zip(a, b) for x, y in zip(r, s)) < 1e-12
ok, lo, hi = m.is_euclidean(d)
assert ok and abs(hi - 1.0) < 1e-12
e = m.embed(d)
assert e.rank == 2 and e.padded_dims == 0
assert m.procrustes_residual(e.points, pts) < 1e-12
"#);
}

#[test]
fn non_euclidean_input_is_reported() {
    run(r#"
d = [[0, 1, 9], [1, 0, 1], [9, 1, 0]]
ok, lo, hi = m.is_euclidean(d)
assert not ok and lo < 0
try:
    m.double_center([[0, 1], [2, 0]])
    raise AssertionError("expected ValueError")
except ValueError:
    pass
"#);
}

#[test]
fn basis_and_nearness_structure() {
    run(r#"
h = m.basis_gram(4)
assert len(h) == 6 and h[0][0] == 4 and h[0][1] == 1 and h[0][5] == 0
assert m.h_spectrum(4) == [(2.0, 2), (4.0, 3), (8.0, 1)]
g = m.dual_gram(4)
assert abs(g[0][0] - 5 / 16) < 1e-15
t = m.constraint_triplets(4)
assert len(t) == 36 and t[0] == (1, 1, 1)
assert abs(m.amplification_factor(4) - 11 / 8) < 1e-15
assert all(ok for _, ok in m.run_checks(5))
"#);
}

#[test]
fn noise_report_is_deterministic() {
    run(r#"
a = m.noise_experiment(6, dim=2, epsilon=1e-3, trials=50, seed=3)
b = m.noise_experiment(6, dim=2, epsilon=1e-3, trials=50, seed=3)
assert a.max_ratio == b.max_ratio
assert a.passed and a.max_ratio <= a.amplification_factor < a.bound == 4.0
"#);
}
