import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from src.analyzers import (
    CorrelogramAnalyzer,
    VarianceProfileAnalyzer,
    correlogram,
    correlogram_to_frame,
    default_bin_edges,
    layer_variance_profile,
    profile_to_frame,
)
from src.config.experiment import BasisConfig, StackConfig
from src.convolution import stack_forward
from src.core.errors import InvalidArgumentError
from src.core.models.data_models import (
    Correlogram,
    FeatureMatrix,
    InitPlan,
    PointCloud,
    VarianceEntry,
    VarianceProfile,
)
from src.experiments.stack_builder import build_stack
from src.geometry import generate_uniform_cloud
from src.initialization import GaussianFeatureModel, init_fan_in


def _single(values, depth=1):
    return [[FeatureMatrix(np.asarray(values, dtype=np.float64), layer_index=depth)]]


class TestVarianceProfile:
    def test_constant(self):
        profile = layer_variance_profile(_single(np.full((10, 2), 3.0)))
        assert profile.entries[0].variance == 0.0
        assert profile.entries[0].n == 20

    def test_two_values(self):
        assert layer_variance_profile(_single([[-1.0], [1.0]])).variances[0] == pytest.approx(2.0)

    def test_gaussian(self):
        values = np.random.default_rng(3).normal(0.0, 0.5, (10000, 1))
        assert layer_variance_profile(_single(values)).variances[0] == pytest.approx(0.25, rel=0.05)

    def test_pooled_over_clouds(self):
        activations = [
            [FeatureMatrix(np.array([[-1.0]]), 1)],
            [FeatureMatrix(np.array([[1.0]]), 1)],
        ]
        profile = layer_variance_profile(activations)
        assert profile.entries[0] == VarianceEntry(depth=1, variance=2.0, n=2)

    def test_insufficient_samples(self):
        with pytest.raises(InvalidArgumentError):
            layer_variance_profile(_single([[1.0]]))

    def test_mismatched_depths(self):
        with pytest.raises(InvalidArgumentError):
            layer_variance_profile([[FeatureMatrix(np.ones((2, 1)))], []])

    def test_frame(self):
        profile = VarianceProfile((VarianceEntry(1, 0.5, 10), VarianceEntry(2, 0.25, 10)))
        frame = profile_to_frame(profile)
        assert list(frame.columns) == ["layer", "variance", "n"]
        assert frame["variance"].tolist() == [0.5, 0.25]

    def test_analyzer(self):
        analyzer = VarianceProfileAnalyzer()
        analyzer.update(VarianceProfile((VarianceEntry(1, 1.0, 4), VarianceEntry(2, 2.0, 4))))
        analyzer.update(VarianceProfile((VarianceEntry(1, 3.0, 4), VarianceEntry(2, 0.5, 4))))
        result = analyzer.analyze()
        assert_allclose(result.variances, [2.0, 1.25])
        assert [e.n for e in result.entries] == [8, 8]
        assert analyzer.max_deviation(1.0) == pytest.approx(2.0)

    def test_analyzer_depth_mismatch(self):
        analyzer = VarianceProfileAnalyzer()
        analyzer.update(VarianceProfile((VarianceEntry(1, 1.0, 4),)))
        with pytest.raises(InvalidArgumentError):
            analyzer.update(VarianceProfile((VarianceEntry(2, 1.0, 4),)))


class TestCorrelogram:
    def test_bin_edges(self):
        edges = default_bin_edges(0.05, 20)
        assert edges.size == 21
        assert edges[-1] == pytest.approx(0.2)
        with pytest.raises(InvalidArgumentError):
            default_bin_edges(0.0)

    def test_constant_features_undefined(self, cloud_1d):
        result = correlogram(cloud_1d, FeatureMatrix(np.ones((cloud_1d.n, 1))), default_bin_edges(0.05, 5))
        assert all(value is None for value in result.r)

    def test_sparse_bin_undefined(self):
        cloud = PointCloud(np.array([0.0, 0.1, 5.0]))
        features = FeatureMatrix(np.array([1.0, 2.0, 3.0]))
        result = correlogram(cloud, features, np.array([0.0, 0.5, 1.0]))
        assert_array_equal(result.pair_counts, [1, 0])
        assert result.r == (None, None)

    def test_half_open_bins(self):
        cloud = PointCloud(np.array([0.0, 0.5, 1.5]))
        features = FeatureMatrix(np.array([1.0, 2.0, 4.0]))
        result = correlogram(cloud, features, np.array([0.0, 0.5, 1.0, 2.0]))
        # 0.5 masuk bin [0.5, 1.0), 1.0 masuk [1.0, 2.0)
        assert_array_equal(result.pair_counts, [0, 1, 2])

    def test_smooth_field(self):
        cloud = generate_uniform_cloud(1, 300, (0.0, 1.0), seed=1)
        features = FeatureMatrix(np.sin(2 * np.pi * cloud.positions))
        result = correlogram(cloud, features, default_bin_edges(0.01, 10))
        assert result.r[0] > 0.95

    def test_independent_features(self):
        cloud = generate_uniform_cloud(1, 1000, (0.0, 1.0), seed=2)
        features = GaussianFeatureModel().sample(cloud.n, 1, 2)
        result = correlogram(cloud, features, default_bin_edges(0.05, 20))
        defined = np.array([value for value in result.r if value is not None])
        assert np.all(np.abs(defined) < 0.1)

    def test_layer_depth_from_features(self, cloud_1d):
        features = FeatureMatrix(np.random.default_rng(0).standard_normal((cloud_1d.n, 1)), layer_index=4)
        assert correlogram(cloud_1d, features, default_bin_edges(0.05, 3)).layer_depth == 4

    def test_frame_null(self, cloud_1d):
        result = correlogram(cloud_1d, FeatureMatrix(np.ones((cloud_1d.n, 1))), default_bin_edges(0.05, 3), 2)
        frame = correlogram_to_frame(result)
        assert list(frame.columns) == ["layer", "bin_lo", "bin_hi", "pairs", "r"]
        assert frame["r"].isna().all()
        assert frame["layer"].tolist() == [2, 2, 2]

    def test_analyzer_skips_undefined(self):
        edges = np.array([0.0, 1.0, 2.0])
        analyzer = CorrelogramAnalyzer(1)
        analyzer.update(correlogram_result(edges, [0.2, None], [5, 1]))
        analyzer.update(correlogram_result(edges, [0.4, None], [5, 0]))
        result = analyzer.analyze()
        assert result.r[0] == pytest.approx(0.3)
        assert result.r[1] is None
        assert_array_equal(result.pair_counts, [10, 1])

    def test_invalid_edges(self, cloud_1d):
        with pytest.raises(InvalidArgumentError):
            correlogram(cloud_1d, FeatureMatrix(np.ones((cloud_1d.n, 1))), np.array([0.0, 0.0, 1.0]))


def correlogram_result(edges, r, counts):
    return Correlogram(edges, np.array(counts), tuple(r), 1)


@pytest.mark.slow
def test_correlation_grows_with_depth():
    config = StackConfig(
        dim=1,
        depth=20,
        channels=1,
        radius=0.075,
        estimator="sum",
        basis=BasisConfig(family="box", size=3, layout="grid", kernel_radius=0.05),
    )
    edges = default_bin_edges(0.05, 20)
    model = GaussianFeatureModel(0.1)
    nearest = {0: [], 5: [], 20: []}
    for seed in range(20):
        stack = init_fan_in(build_stack(config, seed), InitPlan("standard", seed=seed))
        cloud = generate_uniform_cloud(1, 1000, (0.0, 1.0), seed)
        activations = stack_forward(stack, cloud, model.sample(cloud.n, 1, seed))
        for depth in nearest:
            nearest[depth].append(correlogram(cloud, activations[depth], edges).r[0])

    r_input, r5, r20 = (float(np.mean(nearest[d])) for d in (0, 5, 20))
    assert abs(r_input) < 0.1
    assert r5 - r_input >= 0.05
    assert r20 - r5 >= 0.05
