"""The dataset converter, exercised on synthetic raw files."""

import importlib.util
import pickle
import sys
from pathlib import Path

import numpy as np
import pytest
import scipy.sparse

from dropgcn import load_graph_dir

_spec = importlib.util.spec_from_file_location(
    "prepare_dataset",
    Path(__file__).resolve().parent.parent / "tools" / "prepare_dataset.py")
prepare_dataset = importlib.util.module_from_spec(_spec)
_spec.loader.exec_module(prepare_dataset)


def write_planetoid(raw, name="cora"):
    """A 12-node fake: 8 labeled nodes, 4 test nodes listed out of order."""
    rng = np.random.default_rng(13)
    n_all, n_test, width, n_classes = 8, 4, 6, 3
    allx = rng.random((n_all, width)) * (rng.random((n_all, width)) < 0.5)
    tx = rng.random((n_test, width)) * (rng.random((n_test, width)) < 0.5)
    tx[0, 0] = 0.625  # marker checked below
    ally = np.eye(n_classes)[rng.integers(0, n_classes, n_all)]
    ty = np.eye(n_classes)[[2, 0, 1, 2]]
    graph = {0: [1, 2], 1: [0], 2: [0, 3], 3: [2], 4: [5], 5: [4], 6: [7],
             7: [6, 8], 8: [7], 9: [10], 10: [9, 11], 11: [10]}
    blobs = {
        "x": scipy.sparse.csr_matrix(allx[:2]),
        "y": ally[:2],
        "tx": scipy.sparse.csr_matrix(tx),
        "ty": ty,
        "allx": scipy.sparse.csr_matrix(allx),
        "ally": ally,
        "graph": graph,
    }
    raw.mkdir(parents=True, exist_ok=True)
    for suffix, blob in blobs.items():
        with open(raw / f"ind.{name}.{suffix}", "wb") as fh:
            pickle.dump(blob, fh)
    test_index = [10, 8, 11, 9]
    (raw / f"ind.{name}.test.index").write_text(
        "\n".join(str(i) for i in test_index) + "\n")
    return allx, tx, ty, test_index


class TestPlanetoid:
    def test_end_to_end(self, tmp_path, capsys):
        allx, tx, ty, test_index = write_planetoid(tmp_path / "raw")
        out = tmp_path / "data"
        code = prepare_dataset.main(["planetoid", "--raw-dir",
                                     str(tmp_path / "raw"), "--name", "cora",
                                     "--out", str(out), "--val-size", "2"])
        assert code == 0
        assert "12 nodes" in capsys.readouterr().out
        g = load_graph_dir(out)
        assert g.n_nodes == 12
        assert g.n_features == 6
        np.testing.assert_array_equal(g.splits["train"], np.arange(6))
        np.testing.assert_array_equal(g.splits["val"], [6, 7])
        np.testing.assert_array_equal(g.splits["test"], [8, 9, 10, 11])
        # tx row k lands at the node named on line k of test.index.
        marked = tx[0] / tx[0].sum()
        np.testing.assert_allclose(g.features[test_index[0]], marked, atol=1e-12)
        assert g.labels[test_index[0]] == 2
        assert g.labels[test_index[1]] == 0
        # Rows are normalized to unit sum (zero rows stay zero).
        sums = g.features.sum(axis=1)
        assert np.all((np.abs(sums - 1.0) < 1e-9) | (sums == 0.0))
        # The 7-8 edge bridges the labeled and test blocks.
        assert g.adjacency.to_dense()[7, 8] == 1.0

    def test_gap_nodes_get_zero_rows(self, tmp_path):
        raw = tmp_path / "raw"
        write_planetoid(raw)
        # Rewrite the index so node 9 is missing: a gap like citeseer has.
        (raw / "ind.cora.test.index").write_text("10\n8\n11\n")
        with open(raw / "ind.cora.tx", "rb") as fh:
            tx = pickle.load(fh).toarray()
        with open(raw / "ind.cora.tx", "wb") as fh:
            pickle.dump(scipy.sparse.csr_matrix(tx[:3]), fh)
        with open(raw / "ind.cora.ty", "rb") as fh:
            ty = pickle.load(fh)
        with open(raw / "ind.cora.ty", "wb") as fh:
            pickle.dump(ty[:3], fh)
        g = prepare_dataset.load_planetoid(raw, "cora", n_val=2)
        assert g.n_nodes == 12
        np.testing.assert_array_equal(g.features[9], np.zeros(6))
        np.testing.assert_array_equal(g.splits["test"], [8, 10, 11])

    def test_val_size_must_fit(self, tmp_path):
        write_planetoid(tmp_path / "raw")
        with pytest.raises(SystemExit):
            prepare_dataset.load_planetoid(tmp_path / "raw", "cora", n_val=500)


class TestLinqs:
    def write_linqs(self, d):
        d.mkdir(parents=True, exist_ok=True)
        content = [
            "paper_a 1 0 1 ai",
            "paper_b 0 1 0 ml",
            "paper_c 1 1 0 ai",
            "paper_d 0 0 1 db",
            "paper_e 1 0 0 ml",
            "paper_f 0 1 1 db",
        ]
        cites = [
            "paper_a paper_b",
            "paper_b paper_a",  # mutual citation collapses to one edge
            "paper_c paper_a",
            "paper_d paper_f",
            "paper_e paper_f",
            "paper_x paper_a",  # unknown id, skipped with a note
        ]
        (d / "toy.content").write_text("\n".join(content) + "\n")
        (d / "toy.cites").write_text("\n".join(cites) + "\n")

    def test_end_to_end(self, tmp_path, capsys):
        self.write_linqs(tmp_path)
        out = tmp_path / "data"
        code = prepare_dataset.main(
            ["linqs", "--content", str(tmp_path / "toy.content"),
             "--cites", str(tmp_path / "toy.cites"), "--out", str(out),
             "--seed", "3", "--val-size", "1", "--test-size", "2"])
        assert code == 0
        captured = capsys.readouterr()
        assert "skipped 1 citation" in captured.err
        g = load_graph_dir(out)
        assert g.n_nodes == 6
        assert g.n_classes == 3
        assert g.adjacency.nnz == 2 * 4  # a-b, a-c, d-f, e-f
        assert {len(g.splits[k]) for k in ("val", "test")} == {1, 2}
        assert len(g.splits["train"]) == 3

    def test_split_sizes_must_fit(self, tmp_path):
        self.write_linqs(tmp_path)
        with pytest.raises(SystemExit):
            prepare_dataset.main(
                ["linqs", "--content", str(tmp_path / "toy.content"),
                 "--cites", str(tmp_path / "toy.cites"),
                 "--out", str(tmp_path / "d"), "--val-size", "3",
                 "--test-size", "3"])

    def test_seed_changes_split(self, tmp_path):
        self.write_linqs(tmp_path)
        g1 = prepare_dataset.load_linqs(tmp_path / "toy.content",
                                        tmp_path / "toy.cites", 0, 1, 2)
        g2 = prepare_dataset.load_linqs(tmp_path / "toy.content",
                                        tmp_path / "toy.cites", 5, 1, 2)
        assert not np.array_equal(g1.splits["test"], g2.splits["test"])
