"""CSR storage invariants, degrees, normalizations, component labeling."""

import numpy as np
import pytest

from dropgcn import (SCHEMES, SparseMatrix, connected_components, degrees,
                     normalize)
from conftest import random_adjacency


def triangle():
    return SparseMatrix.from_dense([[0, 1, 1], [1, 0, 1], [1, 1, 0]])


def two_nodes():
    return SparseMatrix.from_dense([[0, 1], [1, 0]])


class TestStorage:
    def test_round_trip_dense(self):
        dense = np.array([[0.0, 2.0, 0.0], [2.0, 0.0, 1.5], [0.0, 1.5, 0.0]])
        m = SparseMatrix.from_dense(dense)
        assert m.nnz == 4
        np.testing.assert_array_equal(m.to_dense(), dense)

    def test_columns_sorted_and_offsets_monotone(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            a = random_adjacency(rng, 12, 0.4)
            assert a.row_offsets[0] == 0
            assert a.row_offsets[-1] == a.nnz
            assert np.all(np.diff(a.row_offsets) >= 0)
            for r in range(a.n_rows):
                cols, _ = a.row(r)
                assert np.all(np.diff(cols) > 0)

    def test_no_explicit_zeros_after_construction(self):
        m = SparseMatrix.from_coo(2, 2, [0, 0, 1], [0, 1, 0], [1.0, -1.0, 0.0])
        assert m.nnz == 2  # the explicit zero is pruned
        with pytest.raises(ValueError):
            SparseMatrix(1, 1, [0, 1], [0], [0.0])

    def test_duplicate_coordinates_summed_by_from_coo(self):
        m = SparseMatrix.from_coo(2, 2, [0, 0], [1, 1], [1.0, 2.0])
        assert m.to_dense()[0, 1] == 3.0

    def test_immutability(self):
        m = two_nodes()
        with pytest.raises(ValueError):
            m.values[0] = 5.0

    def test_bad_offsets_rejected(self):
        with pytest.raises(ValueError):
            SparseMatrix(2, 2, [0, 2, 1], [0, 1, 0], [1.0, 1.0, 1.0])
        with pytest.raises(ValueError):
            SparseMatrix(2, 2, [0, 1], [0], [1.0])

    def test_unsorted_columns_rejected(self):
        with pytest.raises(ValueError):
            SparseMatrix(1, 3, [0, 2], [2, 0], [1.0, 1.0])

    def test_column_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            SparseMatrix(1, 2, [0, 1], [2], [1.0])

    def test_undirected_edges(self):
        u, v = triangle().undirected_edges()
        assert sorted(zip(u, v)) == [(0, 1), (0, 2), (1, 2)]

    def test_equality(self):
        assert triangle() == triangle()
        assert not (triangle() == two_nodes())


class TestDegrees:
    def test_simple(self):
        np.testing.assert_array_equal(degrees(triangle()), [2.0, 2.0, 2.0])

    def test_isolated_node_zero(self):
        m = SparseMatrix.from_dense([[0, 1, 0], [1, 0, 0], [0, 0, 0]])
        np.testing.assert_array_equal(degrees(m), [1.0, 1.0, 0.0])

    def test_weighted(self):
        m = SparseMatrix.from_dense([[0, 0.5, 2.0], [0.5, 0, 0], [2.0, 0, 0]])
        np.testing.assert_array_equal(degrees(m), [2.5, 0.5, 2.0])

    def test_matches_dense_row_sums(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            a = random_adjacency(rng, 10, 0.5)
            np.testing.assert_allclose(degrees(a), a.to_dense().sum(axis=1), atol=0)


class TestNormalize:
    # Closed forms for the three fixtures, per scheme. Degrees: single node
    # d=0; edge pair d=1 each; triangle d=2 each.
    def test_single_node(self):
        m = SparseMatrix(1, 1, [0, 0], [], [])
        want = {"FirstOrderGCN": [[1.0]], "AugNormAdj": [[1.0]],
                "BingGeNormAdj": [[2.0]], "AugRWalk": [[1.0]]}
        for scheme in SCHEMES:
            np.testing.assert_allclose(normalize(m, scheme).to_dense(), want[scheme],
                                       atol=1e-12)

    def test_two_nodes(self):
        want = {
            "FirstOrderGCN": [[1.0, 1.0], [1.0, 1.0]],
            "AugNormAdj": [[0.5, 0.5], [0.5, 0.5]],
            "BingGeNormAdj": [[1.5, 0.5], [0.5, 1.5]],
            "AugRWalk": [[0.5, 0.5], [0.5, 0.5]],
        }
        for scheme in SCHEMES:
            np.testing.assert_allclose(normalize(two_nodes(), scheme).to_dense(),
                                       want[scheme], atol=1e-12)

    def test_triangle(self):
        third = 1.0 / 3.0
        want = {
            "FirstOrderGCN": [[1.0, 0.5, 0.5], [0.5, 1.0, 0.5], [0.5, 0.5, 1.0]],
            "AugNormAdj": [[third] * 3] * 3,
            "BingGeNormAdj": [[1 + third, third, third],
                              [third, 1 + third, third],
                              [third, third, 1 + third]],
            "AugRWalk": [[third] * 3] * 3,
        }
        for scheme in SCHEMES:
            np.testing.assert_allclose(normalize(triangle(), scheme).to_dense(),
                                       want[scheme], atol=1e-12)

    def test_matches_dense_formulas(self):
        # Independent oracle: build each scheme from its dense matrix formula.
        rng = np.random.default_rng(23)
        for _ in range(20):
            a = random_adjacency(rng, 9, 0.45)
            dense = a.to_dense()
            d = dense.sum(axis=1)
            eye = np.eye(9)
            with np.errstate(divide="ignore"):
                dm = np.power(d, -0.5)
            dm[np.isinf(dm)] = 0.0
            da = np.power(d + 1.0, -0.5)
            want = {
                "FirstOrderGCN": eye + np.diag(dm) @ dense @ np.diag(dm),
                "AugNormAdj": np.diag(da) @ (dense + eye) @ np.diag(da),
                "BingGeNormAdj": eye + np.diag(da) @ (dense + eye) @ np.diag(da),
                "AugRWalk": np.diag(np.power(d + 1.0, -1.0)) @ (dense + eye),
            }
            for scheme in SCHEMES:
                np.testing.assert_allclose(normalize(a, scheme).to_dense(),
                                           want[scheme], atol=1e-12)

    def test_symmetric_schemes_exactly_symmetric(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            a = random_adjacency(rng, 11, 0.4)
            for scheme in ("FirstOrderGCN", "AugNormAdj", "BingGeNormAdj"):
                out = normalize(a, scheme).to_dense()
                assert np.array_equal(out, out.T)

    def test_augrwalk_rows_sum_to_one(self):
        rng = np.random.default_rng(17)
        for _ in range(10):
            a = random_adjacency(rng, 10, 0.3)
            rows = normalize(a, "AugRWalk").to_dense().sum(axis=1)
            np.testing.assert_allclose(rows, np.ones(10), atol=1e-12)

    def test_augnormadj_spectrum_bounded_with_top_one(self):
        rng = np.random.default_rng(29)
        for _ in range(15):
            a = random_adjacency(rng, 12, 0.35)
            w = np.linalg.eigvalsh(normalize(a, "AugNormAdj").to_dense())
            assert w.min() >= -1.0 - 1e-10
            assert abs(w.max() - 1.0) < 1e-10

    def test_isolated_node_conventions(self):
        m = SparseMatrix.from_dense([[0, 1, 0], [1, 0, 0], [0, 0, 0]])
        assert normalize(m, "AugNormAdj").to_dense()[2, 2] == 1.0
        np.testing.assert_allclose(normalize(m, "FirstOrderGCN").to_dense()[2],
                                   [0.0, 0.0, 1.0], atol=0)

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            normalize(SparseMatrix.from_dense([[1.0, 0.0], [0.0, 0.0]]), "AugNormAdj")
        with pytest.raises(ValueError):
            normalize(SparseMatrix.from_dense([[0, -1], [-1, 0]]), "AugNormAdj")
        with pytest.raises(ValueError):
            normalize(SparseMatrix.from_dense([[0, 1], [0, 0]]), "AugNormAdj")
        with pytest.raises(ValueError):
            normalize(two_nodes(), "RandomWalk")

    def test_preserves_input(self):
        a = triangle()
        before = a.to_dense().copy()
        normalize(a, "AugNormAdj")
        np.testing.assert_array_equal(a.to_dense(), before)


class TestComponents:
    def test_two_pairs(self):
        m = SparseMatrix.from_dense(
            [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
        labels, count = connected_components(m)
        assert count == 2
        np.testing.assert_array_equal(labels, [0, 0, 1, 1])

    def test_isolated_nodes_are_singletons(self):
        m = SparseMatrix(3, 3, [0, 0, 0, 0], [], [])
        labels, count = connected_components(m)
        assert count == 3
        np.testing.assert_array_equal(labels, [0, 1, 2])

    def test_labels_first_seen_order(self):
        m = SparseMatrix.from_dense(
            [[0, 0, 1], [0, 0, 0], [1, 0, 0]])
        labels, count = connected_components(m)
        assert count == 2
        np.testing.assert_array_equal(labels, [0, 1, 0])

    def test_matches_scipy(self):
        import scipy.sparse.csgraph as csgraph
        rng = np.random.default_rng(31)
        for _ in range(25):
            a = random_adjacency(rng, 14, 0.12)
            _, count = connected_components(a)
            want = csgraph.connected_components(a.to_scipy(), directed=False)[0]
            assert count == want
