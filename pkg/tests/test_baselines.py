import numpy as np
import pytest

from _synth import blob_matrix, make_tensor, two_group_tensor
from triview import (
    InputValidationError,
    Mode,
    PipelineConfig,
    Tensor3,
    compare_baselines,
    flat_feature_count,
)
from triview.baselines import cluster_purity, kmeans, purity


class TestKmeans:
    def test_separated_blobs_recovered(self, rng):
        X, labels = blob_matrix(rng, n_per_blob=40, spread=0.3, separation=12.0)
        assign = kmeans(X, 3, seed=0)
        assert purity(assign, labels) == 1.0

    def test_deterministic(self, rng):
        X, _ = blob_matrix(rng, n_per_blob=20)
        assert np.array_equal(kmeans(X, 3, seed=5), kmeans(X, 3, seed=5))

    def test_k_bounds(self):
        with pytest.raises(InputValidationError, match=r"k must be in \[1, 4\]"):
            kmeans(np.zeros((4, 2)), 5)

    def test_k_equals_n(self):
        X = np.arange(8.0).reshape(4, 2)
        assign = kmeans(X, 4, seed=0)
        assert sorted(assign.tolist()) == [0, 1, 2, 3]


class TestPurity:
    def test_perfect(self):
        assert purity([0, 0, 1, 1], ["a", "a", "b", "b"]) == 1.0

    def test_merged_clusters(self):
        # one cluster swallowing two classes scores by its majority
        assert purity([0, 0, 0, 0], ["a", "a", "b", "b"]) == 0.5

    def test_length_mismatch(self):
        with pytest.raises(InputValidationError, match="lengths differ"):
            purity([0, 1], ["a"])

    def test_cluster_purity_uses_label_count(self, rng):
        X, labels = blob_matrix(rng, n_per_blob=30, spread=0.3, separation=15.0)
        assert cluster_purity(X, labels) >= 0.99


class TestFlatFeatureCount:
    def test_reference_shape(self):
        values = np.zeros((3, 864, 1163))
        t = Tensor3(
            values,
            time_labels=[f"t{i}" for i in range(3)],
            instance_labels=[f"n{i}" for i in range(864)],
            variable_labels=[f"v{i}" for i in range(1163)],
            name="wide",
        )
        assert flat_feature_count(t, Mode.TIME) == 864 * 1163
        assert flat_feature_count(t, Mode.TIME) == 1_004_832

    def test_small_counts(self, small_tensor):
        # 6x7x4 tensor
        assert flat_feature_count(small_tensor, Mode.TIME) == 28
        assert flat_feature_count(small_tensor, Mode.INSTANCE) == 24
        assert flat_feature_count(small_tensor, Mode.VARIABLE) == 42


class TestCompareBaselines:
    def test_three_routes_present(self, rng):
        t = make_tensor(rng, 6, 20, 5, name="cmp")
        report = compare_baselines(t, Mode.INSTANCE, PipelineConfig(method2="linear"))
        assert [e.route for e in report.entries] == ["pca", "mean", "flat"]
        pca, mean, flat = report.entries
        assert pca.n_features == 6  # compressed along time
        assert mean.n_features == 6
        assert flat.n_features == 30  # 6 time x 5 variable
        for e in report.entries:
            assert np.asarray(e.embedding.Z).shape == (20, 2)
            assert e.purity is None

    def test_purity_reported_with_labels(self, rng):
        t, groups = two_group_tensor(rng, T=10, N=40, D=4)
        report = compare_baselines(
            t, Mode.INSTANCE, PipelineConfig(method2="linear"), labels=groups
        )
        for e in report.entries:
            assert e.purity is not None
            assert 0.0 < e.purity <= 1.0

    def test_label_length_checked(self, rng):
        t = make_tensor(rng, 5, 8, 3, name="cmp")
        with pytest.raises(InputValidationError, match="expected 8 labels for instance"):
            compare_baselines(t, Mode.INSTANCE, labels=[0, 1])

    def test_column_cap_refusal_names_count(self, rng):
        t = make_tensor(rng, 5, 8, 3, name="cmp")
        with pytest.raises(
            InputValidationError, match="flat unfolding needs 15 columns, above the cap of 10"
        ):
            compare_baselines(t, Mode.INSTANCE, column_cap=10)

    def test_routes_share_standardization_and_seed(self, rng):
        from triview import NeighborParams

        t = make_tensor(rng, 6, 25, 4, name="cmp")
        cfg = PipelineConfig(method2="neighbor")
        r1 = compare_baselines(t, Mode.INSTANCE, cfg)
        r2 = compare_baselines(t, Mode.INSTANCE, cfg)
        for a, b in zip(r1.entries, r2.entries):
            assert a.embedding.seed == b.embedding.seed == 0
            np.testing.assert_array_equal(np.asarray(a.embedding.Z), np.asarray(b.embedding.Z))
        reseeded = PipelineConfig(method2="neighbor", neighbor=NeighborParams(seed=4))
        r3 = compare_baselines(t, Mode.INSTANCE, reseeded)
        assert any(
            not np.array_equal(np.asarray(a.embedding.Z), np.asarray(b.embedding.Z))
            for a, b in zip(r1.entries, r3.entries)
        )

    def test_doc_round_serializable(self, rng):
        import json

        t = make_tensor(rng, 5, 9, 3, name="cmp")
        report = compare_baselines(t, Mode.INSTANCE, PipelineConfig(method2="linear"))
        doc = report.to_doc()
        assert doc["point_mode"] == "instance"
        assert {e["route"] for e in doc["entries"]} == {"pca", "mean", "flat"}
        json.dumps(doc)  # must be plain JSON types
