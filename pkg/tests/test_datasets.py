import os
from itertools import product

import numpy as np
import pytest

from svdgcn.datasets import (
    NodeDataset,
    _bernoulli_positions,
    generate_sbm_digraph,
    load_dataset,
    save_dataset,
    split_masks,
)
from svdgcn.errors import ConfigError, DatasetError
from svdgcn.graph import DirectedGraph

CORA_ML = os.environ.get("SVDGCN_CORA_ML")


class TestSbm:
    def test_full_blocks(self):
        ds = generate_sbm_digraph(4, 2, 1.0, 0.0, feat_dim=2, per_class_train=None)
        expected = sorted((i, j) for i, j in product(range(4), repeat=2)
                          if i != j and ds.labels[i] == ds.labels[j])
        assert ds.graph.edges.tolist() == [list(e) for e in expected]
        assert ds.graph.num_edges == 4

    def test_no_edges(self):
        ds = generate_sbm_digraph(10, 2, 0.0, 0.0, feat_dim=2, per_class_train=None)
        assert ds.graph.num_edges == 0

    def test_edge_count_within_three_sigma(self):
        n, c, p_in, p_out = 300, 3, 0.1, 0.01
        block = n // c
        inside = c * block * (block - 1)
        across = n * (n - 1) - inside
        mean = inside * p_in + across * p_out
        std = np.sqrt(inside * p_in * (1 - p_in) + across * p_out * (1 - p_out))
        for seed in range(3):
            ds = generate_sbm_digraph(n, c, p_in, p_out, seed=seed)
            assert abs(ds.graph.num_edges - mean) <= 3 * std

    def test_no_self_loops_and_block_structure(self):
        ds = generate_sbm_digraph(60, 3, 0.5, 0.0, feat_dim=3, per_class_train=None)
        s, t = ds.graph.sources, ds.graph.targets
        assert np.all(s != t)
        assert np.all(ds.labels[s] == ds.labels[t])

    def test_sampler_is_bernoulli(self):
        rng = np.random.default_rng(0)
        total, p, reps = 50, 0.3, 4000
        hits = np.zeros(total)
        for _ in range(reps):
            hits[_bernoulli_positions(rng, total, p)] += 1
        freq = hits / reps
        assert np.max(np.abs(freq - p)) <= 4 * np.sqrt(p * (1 - p) / reps)

    def test_sampler_edge_cases(self):
        rng = np.random.default_rng(0)
        assert _bernoulli_positions(rng, 10, 0.0).size == 0
        assert _bernoulli_positions(rng, 10, 1.0).tolist() == list(range(10))
        assert _bernoulli_positions(rng, 0, 0.5).size == 0

    def test_deterministic(self):
        a = generate_sbm_digraph(120, 3, 0.1, 0.01, seed=4)
        b = generate_sbm_digraph(120, 3, 0.1, 0.01, seed=4)
        np.testing.assert_array_equal(a.graph.edges, b.graph.edges)
        np.testing.assert_array_equal(a.features, b.features)
        np.testing.assert_array_equal(a.train_mask, b.train_mask)

    def test_labels_and_features(self):
        ds = generate_sbm_digraph(301, 3, 0.1, 0.01, feat_dim=5, feat_noise=0.0)
        assert np.bincount(ds.labels).tolist() == [101, 100, 100]
        np.testing.assert_array_equal(ds.features, np.eye(5)[ds.labels])

    def test_default_split(self):
        ds = generate_sbm_digraph(300, 3, 0.1, 0.01)
        assert (ds.train_mask.sum(), ds.val_mask.sum(), ds.test_mask.sum()) == (60, 60, 180)

    @pytest.mark.parametrize("kw", [{"p_in": 0.1, "p_out": 0.2}, {"p_in": 1.5, "p_out": 0.0},
                                    {"feat_dim": 2}, {"feat_noise": -1.0}])
    def test_invalid(self, kw):
        args = {"p_in": 0.1, "p_out": 0.01, "feat_dim": 8, "feat_noise": 0.5, **kw}
        with pytest.raises(ConfigError):
            generate_sbm_digraph(30, 3, **args)


class TestSplits:
    def test_seven_classes(self):
        labels = np.repeat(np.arange(7), 100)
        train, val, test = split_masks(labels, 20, 500, seed=1)
        assert train.sum() == 140
        assert val.sum() == 500 and test.sum() == 700 - 640
        assert not np.any(train & val) and not np.any(train & test) and not np.any(val & test)
        assert np.all(train | val | test)
        assert all(np.sum(train & (labels == c)) == 20 for c in range(7))

    def test_empty_validation_is_flagged(self):
        labels = np.repeat(np.arange(2), 30)
        with pytest.warns(UserWarning, match="validation"):
            _, val, _ = split_masks(labels, 5, 0)
        assert val.sum() == 0

    def test_small_class(self):
        with pytest.raises(ConfigError):
            split_masks(np.array([0, 0, 1]), per_class_train=2, val_size=0)

    def test_no_test_nodes_left(self):
        with pytest.raises(ConfigError):
            split_masks(np.repeat(np.arange(2), 10), per_class_train=5, val_size=10)


class TestFiles:
    def test_round_trip(self, tmp_path):
        ds = generate_sbm_digraph(90, 3, 0.1, 0.02, seed=2)
        save_dataset(ds, tmp_path / "d")
        back = load_dataset(tmp_path / "d")
        np.testing.assert_array_equal(back.graph.edges, ds.graph.edges)
        np.testing.assert_array_equal(back.features, ds.features)
        np.testing.assert_array_equal(back.labels, ds.labels)
        for a, b in [(back.train_mask, ds.train_mask), (back.val_mask, ds.val_mask),
                     (back.test_mask, ds.test_mask)]:
            np.testing.assert_array_equal(a, b)

    def test_round_trip_without_masks(self, tmp_path):
        ds = generate_sbm_digraph(30, 3, 0.2, 0.02, per_class_train=None)
        save_dataset(ds, tmp_path / "d")
        assert not load_dataset(tmp_path / "d").has_masks

    def test_short_features_file(self, tmp_path):
        ds = generate_sbm_digraph(30, 3, 0.2, 0.02, per_class_train=None)
        save_dataset(ds, tmp_path / "d")
        path = tmp_path / "d" / "features.csv"
        path.write_text("".join(path.read_text().splitlines(keepends=True)[:-1]))
        with pytest.raises(DatasetError, match="29 rows"):
            load_dataset(tmp_path / "d")

    def test_missing_directory(self, tmp_path):
        with pytest.raises(DatasetError):
            load_dataset(tmp_path / "nope")

    def test_missing_file(self, tmp_path):
        ds = generate_sbm_digraph(30, 3, 0.2, 0.02, per_class_train=None)
        save_dataset(ds, tmp_path / "d")
        (tmp_path / "d" / "labels.csv").unlink()
        with pytest.raises(DatasetError, match="labels.csv"):
            load_dataset(tmp_path / "d")


class TestNodeDataset:
    def test_overlapping_masks(self):
        g = DirectedGraph(3, [])
        m = np.array([True, False, False])
        with pytest.raises(DatasetError):
            NodeDataset(g, np.zeros((3, 1)), np.zeros(3, dtype=int), m, m, ~m)

    def test_shape_checks(self):
        g = DirectedGraph(3, [])
        with pytest.raises(DatasetError):
            NodeDataset(g, np.zeros((2, 1)), np.zeros(3, dtype=int))
        with pytest.raises(DatasetError):
            NodeDataset(g, np.zeros((3, 1)), np.zeros(2, dtype=int))


@pytest.mark.skipif(not CORA_ML, reason="set SVDGCN_CORA_ML to a converted cora_ml directory")
def test_cora_ml_statistics():
    ds = load_dataset(CORA_ML)
    assert ds.num_nodes == 2995
    assert ds.graph.num_edges == 8416
    assert ds.num_features == 2879
    assert ds.num_classes == 7
