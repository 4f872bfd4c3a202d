import math
import warnings

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from specframes import graphs, linalg
from specframes.datasets import minnesota
from specframes.errors import ConstructionError, DataError, ParameterError


def eigs(g, kind="combinatorial"):
    return linalg.dense_eigh(graphs.laplacian(g, kind).matrix).eigenvalues


def test_path_two_vertices():
    np.testing.assert_allclose(eigs(graphs.build_path(2)), [0, 2], atol=1e-12)
    L = graphs.laplacian(graphs.build_path(2)).dense()
    np.testing.assert_array_equal(L, [[1, -1], [-1, 1]])


def test_path_closed_form():
    lam = eigs(graphs.build_path(64))
    np.testing.assert_allclose(lam, graphs.expected_path_spectrum(64), atol=1e-9)
    assert lam[-1] == pytest.approx(2 - 2 * math.cos(63 * math.pi / 64), abs=1e-9)
    assert abs(lam[0]) < 1e-12


@pytest.mark.parametrize("n, expected", [(3, [0, 3, 3]), (4, [0, 2, 2, 4])])
def test_small_rings(n, expected):
    np.testing.assert_allclose(eigs(graphs.build_ring(n)), expected, atol=1e-12)


def test_ring_closed_form():
    np.testing.assert_allclose(eigs(graphs.build_ring(50)), graphs.expected_ring_spectrum(50),
                               atol=1e-9)


def test_comet_counts():
    g = graphs.build_comet(64, 30)
    assert g.n_edges == 63
    assert g.degrees.max() == 31
    assert g.is_connected()
    assert abs(eigs(g)[0]) < 1e-12


def test_degenerate_comet_is_path():
    # hub 0 with one leaf and a one-vertex tail: the path 1 - 0 - 2
    g = graphs.build_comet(3, 1)
    assert g.edge_set() == {(0, 1, 1.0), (0, 2, 1.0)}
    np.testing.assert_allclose(eigs(g), [0, 1, 3], atol=1e-12)


def test_sensor_deterministic_and_connected():
    a = graphs.build_sensor(64, seed=1)
    b = graphs.build_sensor(64, seed=1)
    assert a.edge_set() == b.edge_set()
    W = a.adjacency
    assert (W != W.T).nnz == 0
    assert not W.diagonal().any()
    assert eigs(a)[1] > 1e-10


def test_sensor_budget_exhausted():
    with pytest.raises(ConstructionError):
        graphs.build_sensor(50, seed=0, threshold=0.01, max_tries=3)


def test_random_regular_degrees():
    g = graphs.build_random_regular(3000, 3, seed=0)
    assert np.all(g.degrees == 3)
    assert g.degrees.sum() == 9000
    S = linalg.SparseSym.from_matrix(graphs.laplacian(g).matrix)
    assert linalg.estimate_lambda_upper(S) == 6.0


def test_random_regular_small_spectrum_bound():
    g = graphs.build_random_regular(200, 4, seed=3)
    assert eigs(g)[-1] <= 8 + 1e-9


def test_random_regular_odd_product():
    with pytest.raises(ParameterError):
        graphs.build_random_regular(11, 3, seed=0)


def test_random_regular_reproducible():
    a = graphs.build_random_regular(100, 3, seed=9)
    b = graphs.build_random_regular(100, 3, seed=9)
    assert a.edge_set() == b.edge_set()


def test_erdos_renyi_edge_count():
    g = graphs.build_erdos_renyi(3000, 0.05, seed=0)
    lo, hi = graphs.er_edge_count_bounds(3000, 0.05)
    assert lo <= g.n_edges <= hi
    assert g.degrees.mean() == pytest.approx(0.05 * 2999, rel=0.01)
    assert graphs.build_erdos_renyi(300, 0.1, seed=4).edge_set() == \
        graphs.build_erdos_renyi(300, 0.1, seed=4).edge_set()


def test_load_edge_list(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("# comment\n0 1 1\n1 2 1\n")
    g = graphs.load_graph(p)
    assert g.edge_set() == graphs.build_path(3).edge_set()


def test_load_matrix_market_pattern(tmp_path):
    p = tmp_path / "g.mtx"
    p.write_text("%%MatrixMarket matrix coordinate pattern symmetric\n3 3 2\n2 1\n3 2\n")
    g = graphs.load_graph(p)
    assert g.edge_set() == {(0, 1, 1.0), (1, 2, 1.0)}


def test_load_asymmetric_matrix_market_warns(tmp_path):
    p = tmp_path / "g.mtx"
    p.write_text("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 2 1.0\n2 1 3.0\n")
    with pytest.warns(UserWarning):
        g = graphs.load_graph(p)
    assert g.adjacency[0, 1] == 3.0 and g.adjacency[1, 0] == 3.0


def test_edge_list_conflict_takes_max(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("0 1 1\n1 0 2.5\n")
    with pytest.warns(UserWarning):
        g = graphs.load_graph(p)
    assert g.adjacency[0, 1] == 2.5


def test_edge_list_errors(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("0 1\n1 2 -1\n")
    with pytest.raises(DataError, match=":2:"):
        graphs.load_graph(p)
    p.write_text("0 1\nfoo bar\n")
    with pytest.raises(DataError, match=":2:"):
        graphs.load_graph(p)
    with pytest.raises(FileNotFoundError):
        graphs.load_graph(tmp_path / "missing.txt")


def test_minnesota_components():
    raw = minnesota(connected=False)
    assert raw.n == 2642
    assert graphs.component_count(raw) == 2
    assert minnesota().is_connected()


def test_regular_normalized_is_scaled_combinatorial():
    g = graphs.build_random_regular(60, 4, seed=2)
    L = graphs.laplacian(g).matrix
    Ln = graphs.laplacian(g, "normalized").matrix
    assert abs(Ln - L / 4).max() < 1e-15


def test_normalized_isolated_vertex_row_is_zero():
    W = sp.csr_matrix(np.array([[0, 1, 0], [1, 0, 0], [0, 0, 0]], dtype=float))
    L = graphs.laplacian(graphs.Graph(W), "normalized").dense()
    assert not L[2].any()


def test_graph_validation():
    with pytest.raises(DataError):
        graphs.Graph(sp.csr_matrix(np.array([[0, 1], [0, 0]], dtype=float)))
    with pytest.raises(DataError):
        graphs.Graph(sp.csr_matrix(np.array([[0, -1], [-1, 0]], dtype=float)))


@st.composite
def random_weighted_graph(draw):
    n = draw(st.integers(2, 25))
    seed = draw(st.integers(0, 2**31))
    rng = np.random.default_rng(seed)
    W = np.triu(rng.random((n, n)) * (rng.random((n, n)) < 0.3), 1)
    return graphs.Graph(sp.csr_matrix(W + W.T))


@settings(max_examples=40, deadline=None)
@given(random_weighted_graph())
def test_laplacian_properties(g):
    L = graphs.laplacian(g)
    rows = np.asarray(L.matrix.sum(axis=1)).ravel()
    assert np.abs(rows).max() <= 1e-12 * max(1.0, g.degrees.max())
    assert linalg.dense_eigh(L.matrix).eigenvalues[0] >= -1e-10
    ln = linalg.dense_eigh(graphs.laplacian(g, "normalized").matrix).eigenvalues
    assert ln[0] >= -1e-10 and ln[-1] <= 2 + 1e-10
    W = g.adjacency
    assert (W != W.T).nnz == 0 and not W.diagonal().any()


@settings(max_examples=15, deadline=None)
@given(st.integers(4, 40), st.sampled_from([3, 4]), st.integers(0, 1000))
def test_regular_generator_reproducible(n, r, seed):
    if (n * r) % 2 or r >= n:
        return
    a = graphs.build_random_regular(n, r, seed)
    b = graphs.build_random_regular(n, r, seed)
    assert a.edge_set() == b.edge_set()
    assert np.all(a.degrees == r)


def test_no_warnings_for_clean_edge_list(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("0 1\n1 0\n")
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert graphs.load_graph(p).n_edges == 1
