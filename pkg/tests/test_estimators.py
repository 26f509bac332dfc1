import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.core.errors import InvalidArgumentError
from src.core.models.data_models import EstimatorSpec, PointCloud
from src.estimators import corrected_density, estimate, init_density_mlp, make_estimator, pair_weights
from src.geometry import radius_neighbors

SUM = EstimatorSpec("sum")
AVG = EstimatorSpec("avg")
MC = EstimatorSpec("mc")


def test_sum():
    assert estimate(SUM, [0.5, 0.25]) == 0.75


def test_avg():
    assert estimate(AVG, [0.5, 0.25]) == 0.375


def test_mc():
    assert estimate(MC, [1.0, 1.0], [0.5, 0.5]) == 2.0


@pytest.mark.parametrize("mode", ["sum", "avg", "mc", "nn"])
def test_empty_neighborhood(mode):
    assert estimate(make_estimator(mode), []) == 0.0


def test_avg_times_count_equals_sum(rng):
    a = rng.standard_normal(17)
    assert estimate(AVG, a) * 17 == pytest.approx(estimate(SUM, a), rel=1e-14)


def test_constant_density(rng):
    a = rng.standard_normal(9)
    assert estimate(MC, a, np.full(9, 4.0)) == pytest.approx(estimate(AVG, a) / 4.0, rel=1e-14)


@pytest.mark.parametrize("mode", ["sum", "avg", "mc", "nn"])
def test_linearity(mode, rng):
    spec = make_estimator(mode, seed=3)
    a, b = rng.standard_normal(12), rng.standard_normal(12)
    p = rng.uniform(0.5, 2.0, 12)
    combined = estimate(spec, 2.0 * a - 0.5 * b, p)
    assert combined == pytest.approx(2.0 * estimate(spec, a, p) - 0.5 * estimate(spec, b, p), rel=1e-12, abs=1e-12)


@pytest.mark.parametrize(
    "sampler,density,integrand",
    [
        # p(y) = 2y, f(y) = 3y^2
        (lambda u: np.sqrt(u), lambda y: 2.0 * y, lambda y: 3.0 * y * y),
        # p(y) = 3y^2, f(y) = 2y
        (lambda u: np.cbrt(u), lambda y: 3.0 * y * y, lambda y: 2.0 * y),
    ],
)
def test_mc_unbiased(sampler, density, integrand):
    # ∫_0^1 f = 1, sampel dari p non-uniform
    rng = np.random.default_rng(0)
    values = []
    for _ in range(1000):
        y = sampler(rng.random(32))
        values.append(estimate(MC, integrand(y), density(y)))
    values = np.array(values)
    error = values.std(ddof=1) / np.sqrt(values.size)
    assert error > 0
    assert abs(values.mean() - 1.0) <= 3 * error


@pytest.mark.parametrize("mode", ["mc", "nn"])
def test_requires_positive_density(mode):
    spec = make_estimator(mode)
    with pytest.raises(InvalidArgumentError):
        estimate(spec, [1.0, 2.0], [1.0, 0.0])
    with pytest.raises(InvalidArgumentError):
        estimate(spec, [1.0, 2.0])
    with pytest.raises(InvalidArgumentError):
        estimate(spec, [1.0, 2.0], [1.0])


def test_corrected_density_positive():
    params = init_density_mlp(seed=5)
    values = corrected_density(params, np.array([1e-9, 0.1, 1.0, 100.0]))
    assert np.all(values > 0)
    assert np.all(np.diff(values) >= 0)


def test_nn_requires_params():
    with pytest.raises(InvalidArgumentError):
        EstimatorSpec("nn")
    with pytest.raises(InvalidArgumentError):
        EstimatorSpec("unknown")


@pytest.mark.parametrize("mode", ["sum", "avg", "mc", "nn"])
def test_pair_weights_match_estimate(mode, rng):
    spec = make_estimator(mode, seed=2)
    cloud = PointCloud(rng.random((40, 2)))
    density = rng.uniform(0.5, 3.0, cloud.n)
    neighbors = radius_neighbors(cloud, cloud, 0.25)
    values = rng.standard_normal(cloud.n)

    weights = pair_weights(spec, neighbors, density)
    for q, members in enumerate(neighbors.lists):
        start, end = neighbors.indptr[q], neighbors.indptr[q + 1]
        expected = estimate(spec, values[members], density[members])
        assert_allclose(np.sum(weights[start:end] * values[members]), expected, rtol=1e-12, atol=1e-14)


def test_pair_weights_missing_density(rng):
    cloud = PointCloud(rng.random((5, 1)))
    neighbors = radius_neighbors(cloud, cloud, 0.5)
    with pytest.raises(InvalidArgumentError):
        pair_weights(MC, neighbors)
