import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from src.convolution.layer import apply_nonlinearity  # noqa: E402
from src.core.models.data_models import PointCloud  # noqa: E402
from src.estimators.integral import estimate  # noqa: E402
from src.kernels.basis import eval_basis  # noqa: E402


def brute_neighbors(queries: PointCloud, support: PointCloud, radius: float):
    """Daftar neighbor O(N^2), urut index support"""
    result = []
    for x in queries.positions:
        found = [j for j, y in enumerate(support.positions) if np.sqrt(np.sum((y - x) ** 2)) <= radius]
        result.append(np.array(found, dtype=np.int64))
    return result


def triple_loop_conv(layer, features, cloud_in, cloud_out, density=None):
    """Konvolusi acuan: loop titik output, channel output, channel input"""
    lists = brute_neighbors(cloud_out, cloud_in, layer.radius)
    output = np.zeros((cloud_out.n, layer.out_channels))
    for q, x in enumerate(cloud_out.positions):
        neighbors = lists[q]
        dens = None if density is None else density[neighbors]
        bases = [eval_basis(layer.basis, cloud_in.positions[j] - x) for j in neighbors]
        for o in range(layer.out_channels):
            total = 0.0
            for c in range(layer.in_channels):
                contributions = [
                    features.values[j, c] * float(np.dot(b, layer.weights[c, :, o]))
                    for j, b in zip(neighbors, bases)
                ]
                total += estimate(layer.estimator, contributions, dens)
            output[q, o] = total
    return apply_nonlinearity(output, layer.nonlinearity)


def double_loop_z(basis, estimator, features, cloud_in, cloud_out, radius, density=None):
    """mean_x Σ_c Σ_i (Σ_y F b_i)(Σ_y' F b_i) / C dengan estimator eksplisit"""
    lists = brute_neighbors(cloud_out, cloud_in, radius)
    total = 0.0
    for q, x in enumerate(cloud_out.positions):
        neighbors = lists[q]
        dens = None if density is None else density[neighbors]
        bases = [eval_basis(basis, cloud_in.positions[j] - x) for j in neighbors]
        for c in range(features.channels):
            for i in range(basis.size):
                first = estimate(estimator, [features.values[j, c] * b[i] for j, b in zip(neighbors, bases)], dens)
                second = estimate(estimator, [features.values[j, c] * b[i] for j, b in zip(neighbors, bases)], dens)
                total += first * second
    return total / cloud_out.n / features.channels


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def cloud_1d(rng):
    return PointCloud(rng.random((64, 1)))


@pytest.fixture
def cloud_3d(rng):
    return PointCloud(rng.random((120, 3)))


@pytest.fixture
def output_dir(tmp_path, monkeypatch):
    monkeypatch.delenv("VARINIT_OUTPUT_DIR", raising=False)
    return str(tmp_path / "output")
