import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from src.convolution import (
    StackContext,
    apply_nonlinearity,
    basis_accumulation,
    basis_operator,
    conv_forward,
    discrete_conv_reference,
    discrete_kernel_to_layer,
    image_to_point_features,
    point_conv_image,
    project,
    stack_forward,
)
from src.convolution.layer import accumulate
from src.convolution.stack import operator_fingerprint
from src.core.errors import InvalidArgumentError, NumericOverflowError
from src.core.models.data_models import ConvLayer, ConvStack, EstimatorSpec, FeatureMatrix, PointCloud
from src.estimators import make_estimator
from src.geometry import estimate_density, generate_uniform_cloud, radius_neighbors
from src.kernels import make_basis
from src.kernels.basis import eval_basis, make_box_basis, make_gaussian_basis

from tests.conftest import triple_loop_conv


def _layer(rng, dim=1, radius=0.1, mode="avg", c_in=2, c_out=2, nonlinearity="none", family="gaussian"):
    bandwidth = radius / 2 if family == "linear" else (radius / 2) ** 2
    basis = make_basis(family, dim, radius, 3, seed=1, layout="grid", bandwidth=bandwidth)
    weights = rng.standard_normal((c_in, basis.size, c_out))
    return ConvLayer(
        basis=basis,
        estimator=make_estimator(mode, seed=7),
        radius=radius,
        in_channels=c_in,
        out_channels=c_out,
        weights=weights,
        nonlinearity=nonlinearity,
    )


def _forward(layer, features, cloud, density=None):
    return conv_forward(layer, features, cloud, cloud, radius_neighbors(cloud, cloud, layer.radius), density)


class TestConvForward:
    def test_single_point(self):
        cloud = PointCloud(np.array([[0.0]]))
        layer = ConvLayer(
            basis=make_box_basis(np.zeros((1, 1)), 1.0),
            estimator=EstimatorSpec("sum"),
            radius=1.0,
            in_channels=1,
            out_channels=1,
            weights=np.full((1, 1, 1), 2.0),
        )
        output = _forward(layer, FeatureMatrix(np.array([[3.0]])), cloud)
        assert output.values[0, 0] == 6.0
        assert output.layer_index == 1

    def test_zero_input(self, rng, cloud_1d):
        layer = _layer(rng)
        output = _forward(layer, FeatureMatrix(np.zeros((cloud_1d.n, 2))), cloud_1d)
        assert_array_equal(output.values, 0.0)

    @pytest.mark.parametrize("mode", ["sum", "avg", "mc", "nn"])
    @pytest.mark.parametrize("seed", range(25))
    def test_matches_triple_loop(self, mode, seed):
        rng = np.random.default_rng(seed)
        cloud = PointCloud(rng.random((32, 1)))
        layer = _layer(rng, mode=mode)
        features = FeatureMatrix(rng.standard_normal((32, 2)))
        density = estimate_density(cloud, 0.05) if layer.estimator.needs_density else None

        output = _forward(layer, features, cloud, density)
        expected = triple_loop_conv(layer, features, cloud, cloud, density)
        assert_allclose(output.values, expected, rtol=1e-12, atol=1e-12 * np.abs(expected).max())

    @pytest.mark.parametrize("family", ["gaussian", "box", "linear", "dot", "mlp"])
    def test_families_match_triple_loop(self, family, rng):
        cloud = PointCloud(rng.random((40, 2)))
        layer = _layer(rng, dim=2, radius=0.3, mode="sum", family=family, nonlinearity="relu")
        features = FeatureMatrix(rng.standard_normal((40, 2)))
        output = _forward(layer, features, cloud)
        expected = triple_loop_conv(layer, features, cloud, cloud)
        assert_allclose(output.values, expected, rtol=1e-12, atol=1e-12 * max(np.abs(expected).max(), 1.0))

    def test_linearity(self, rng, cloud_1d):
        layer = _layer(rng, mode="mc")
        first = rng.standard_normal((cloud_1d.n, 2))
        second = rng.standard_normal((cloud_1d.n, 2))
        combined = _forward(layer, FeatureMatrix(1.5 * first - 2.0 * second), cloud_1d).values
        separate = (
            1.5 * _forward(layer, FeatureMatrix(first), cloud_1d).values
            - 2.0 * _forward(layer, FeatureMatrix(second), cloud_1d).values
        )
        assert_allclose(combined, separate, rtol=1e-12, atol=1e-12)

    def test_translation_equivariance(self, rng, cloud_3d):
        layer = _layer(rng, dim=3, radius=0.3)
        features = FeatureMatrix(rng.standard_normal((cloud_3d.n, 2)))
        original = _forward(layer, features, cloud_3d).values
        moved = _forward(layer, features, cloud_3d.translated([3.0, -1.0, 0.5])).values
        assert_allclose(moved, original, rtol=1e-10, atol=1e-12)

    def test_weight_scaling(self, rng, cloud_1d):
        layer = _layer(rng)
        features = FeatureMatrix(rng.standard_normal((cloud_1d.n, 2)))
        scaled = layer.with_weights(layer.weights * 3.0)
        assert_allclose(
            _forward(scaled, features, cloud_1d).values,
            3.0 * _forward(layer, features, cloud_1d).values,
            rtol=1e-13,
            atol=1e-13,
        )

    def test_uninitialized_layer(self, rng, cloud_1d):
        layer = _layer(rng).with_weights(None)
        with pytest.raises(InvalidArgumentError):
            _forward(layer, FeatureMatrix(np.zeros((cloud_1d.n, 2))), cloud_1d)

    def test_channel_mismatch(self, rng, cloud_1d):
        with pytest.raises(InvalidArgumentError):
            _forward(_layer(rng), FeatureMatrix(np.zeros((cloud_1d.n, 3))), cloud_1d)

    def test_radius_mismatch(self, rng, cloud_1d):
        layer = _layer(rng)
        neighbors = radius_neighbors(cloud_1d, cloud_1d, 0.2)
        with pytest.raises(InvalidArgumentError):
            conv_forward(layer, FeatureMatrix(np.zeros((cloud_1d.n, 2))), cloud_1d, cloud_1d, neighbors)

    def test_overflow(self, rng, cloud_1d):
        layer = _layer(rng)
        layer = layer.with_weights(np.full(layer.weights.shape, 1e300))
        with pytest.raises(NumericOverflowError) as excinfo:
            _forward(layer, FeatureMatrix(np.full((cloud_1d.n, 2), 1e300)), cloud_1d)
        assert excinfo.value.layer_index == 1

    def test_basis_accumulation_shape(self, rng, cloud_1d):
        layer = _layer(rng)
        features = FeatureMatrix(rng.standard_normal((cloud_1d.n, 2)))
        neighbors = radius_neighbors(cloud_1d, cloud_1d, layer.radius)
        accumulated = basis_accumulation(layer.basis, layer.estimator, features, cloud_1d, cloud_1d, neighbors)
        assert accumulated.shape == (cloud_1d.n, 2, 3)
        # Σ_c Σ_i acc[c, i] w[c, i, o] sama dengan output linear
        output = np.einsum("mck,cko->mo", accumulated, layer.weights)
        assert_allclose(output, _forward(layer, features, cloud_1d).values, rtol=1e-12, atol=1e-12)

    def test_basis_operator_rows(self, rng, cloud_1d):
        layer = _layer(rng, mode="sum")
        neighbors = radius_neighbors(cloud_1d, cloud_1d, layer.radius)
        operator = basis_operator(layer.basis, layer.estimator, cloud_1d, cloud_1d, neighbors)
        assert operator.shape == (cloud_1d.n * 3, cloud_1d.n)
        assert operator.nnz == neighbors.pair_count * 3

        # baris m*K + i = b_i(y - x_m) untuk setiap neighbor y
        q = 10
        dense = operator.toarray()
        for i in range(3):
            expected = np.zeros(cloud_1d.n)
            for j in neighbors.lists[q]:
                expected[j] = eval_basis(layer.basis, cloud_1d.positions[j] - cloud_1d.positions[q])[i]
            assert_allclose(dense[q * 3 + i], expected, rtol=1e-12, atol=1e-15)

    def test_project_matches_forward(self, rng, cloud_1d):
        layer = _layer(rng, mode="mc", nonlinearity="relu")
        features = FeatureMatrix(rng.standard_normal((cloud_1d.n, 2)))
        neighbors = radius_neighbors(cloud_1d, cloud_1d, layer.radius)
        operator = basis_operator(layer.basis, layer.estimator, cloud_1d, cloud_1d, neighbors)
        projected = project(layer, accumulate(operator, features, layer.kernel_size), 1)
        assert_array_equal(projected.values, _forward(layer, features, cloud_1d).values)
        assert projected.layer_index == 1

    def test_basis_operator_neighbor_mismatch(self, rng, cloud_1d):
        layer = _layer(rng)
        other = PointCloud(rng.random((10, 1)))
        neighbors = radius_neighbors(other, cloud_1d, layer.radius)
        with pytest.raises(InvalidArgumentError):
            basis_operator(layer.basis, layer.estimator, cloud_1d, cloud_1d, neighbors)


class TestNonlinearity:
    def test_relu_negative(self):
        assert_array_equal(apply_nonlinearity(-np.arange(1.0, 5.0), "relu"), 0.0)

    def test_relu_idempotent(self, rng):
        x = rng.standard_normal(100)
        once = apply_nonlinearity(x, "relu")
        assert_array_equal(apply_nonlinearity(once, "relu"), once)

    def test_relu_halves_second_moment(self):
        z = np.random.default_rng(0).standard_normal(100000)
        ratio = np.mean(apply_nonlinearity(z, "relu") ** 2) / np.mean(z * z)
        assert ratio == pytest.approx(0.5, abs=0.02)

    def test_unknown(self):
        with pytest.raises(InvalidArgumentError):
            apply_nonlinearity(np.zeros(2), "tanh")


class TestStackForward:
    def test_empty_stack(self, cloud_1d):
        features = FeatureMatrix(np.ones((cloud_1d.n, 1)))
        activations = stack_forward(ConvStack(), cloud_1d, features)
        assert len(activations) == 1
        assert activations[0] is features

    def test_two_layer_composition(self, rng, cloud_1d):
        first = _layer(rng, c_in=1, c_out=3, nonlinearity="relu")
        second = _layer(rng, radius=0.15, c_in=3, c_out=2)
        features = FeatureMatrix(rng.standard_normal((cloud_1d.n, 1)))
        activations = stack_forward(ConvStack((first, second)), cloud_1d, features)

        manual = _forward(second, _forward(first, features, cloud_1d), cloud_1d)
        assert len(activations) == 3
        assert [a.layer_index for a in activations] == [0, 1, 2]
        assert_allclose(activations[2].values, manual.values, rtol=1e-12, atol=1e-12)

    def test_error_carries_layer_index(self, rng, cloud_1d):
        first = _layer(rng, c_in=1, c_out=2)
        second = _layer(rng)
        second = second.with_weights(np.full(second.weights.shape, 1e308))
        features = FeatureMatrix(np.full((cloud_1d.n, 1), 1e10))
        with pytest.raises(NumericOverflowError) as excinfo:
            stack_forward(ConvStack((first, second)), cloud_1d, features)
        assert excinfo.value.layer_index == 2

    def test_operator_shared_by_fixed_basis(self, rng, cloud_1d):
        first = _layer(rng)
        second = first.with_weights(rng.standard_normal(first.weights.shape))
        context = StackContext(cloud_1d)
        assert operator_fingerprint(first) == operator_fingerprint(second)
        assert context.operator(first) is context.operator(second)

    def test_operator_rebuilt_for_new_mlp(self, cloud_1d):
        first = _layer(np.random.default_rng(0), mode="nn", family="mlp")
        basis = make_basis("mlp", 1, 0.1, 3, seed=2, layout="grid")
        second = ConvLayer(basis, make_estimator("nn", seed=8), 0.1, 2, 2, weights=first.weights)
        context = StackContext(cloud_1d)
        cached = context.operator(first)
        assert operator_fingerprint(first) != operator_fingerprint(second)
        assert context.operator(second) is not cached

        features = FeatureMatrix(np.random.default_rng(1).standard_normal((cloud_1d.n, 2)))
        assert_allclose(context.forward(second, features).values, _forward(second, features, cloud_1d).values)

    def test_levels(self, rng):
        cloud = generate_uniform_cloud(2, 300, (0.0, 1.0), seed=4)
        down = ConvLayer(
            basis=make_gaussian_basis(np.zeros((1, 2)), 0.01, 0.3),
            estimator=EstimatorSpec("avg"),
            radius=0.3,
            in_channels=1,
            out_channels=1,
            weights=np.ones((1, 1, 1)),
            level_in=0,
            level_out=1,
        )
        stack = ConvStack((down,), level_radii=(0.1,), level_seed=3)
        context = StackContext.for_stack(stack, cloud)
        activations = stack_forward(stack, cloud, FeatureMatrix(np.ones((cloud.n, 1))), context)
        assert activations[1].n == context.levels[1].n
        assert context.levels[1].n < cloud.n


class TestDiscreteReduction:
    def test_identity_kernel(self, rng):
        image = rng.standard_normal((6, 7))
        kernel = np.zeros((3, 3))
        kernel[1, 1] = 1.0
        assert_allclose(discrete_conv_reference(image, kernel), image)

    def test_all_ones(self):
        image = np.full((5, 5, 2), 0.5)
        output = discrete_conv_reference(image, np.ones((3, 3, 2)))
        assert_allclose(output[1:-1, 1:-1], 9 * 0.5 * 2)

    def test_pixel_mapping(self):
        image = np.arange(12.0).reshape(3, 4)
        cloud, features = image_to_point_features(image)
        assert_allclose(cloud.positions[5], [1.0, 1.0])
        assert features.values[5, 0] == 5.0

    def test_layer_weights(self, rng):
        kernel = rng.standard_normal((3, 3, 2))
        layer = discrete_kernel_to_layer(kernel)
        assert layer.weights[1, 3 * 2 + 0, 0] == kernel[2, 0, 1]

    @pytest.mark.parametrize("seed", range(5))
    def test_point_conv_matches_reference(self, seed):
        rng = np.random.default_rng(seed)
        image = rng.standard_normal((8, 8, 3))
        kernel = rng.standard_normal((3, 3, 3))
        reference = discrete_conv_reference(image, kernel)[1:-1, 1:-1]
        computed = point_conv_image(image, kernel)[1:-1, 1:-1]
        assert_allclose(computed, reference, rtol=1e-12, atol=1e-12 * np.abs(reference).max())

    def test_bad_kernel_shape(self, rng):
        with pytest.raises(InvalidArgumentError):
            point_conv_image(rng.standard_normal((4, 4, 2)), np.ones((3, 3, 3)))
