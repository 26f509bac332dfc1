# src/convolution/layer.py
import logging
from typing import Optional

import numpy as np
from scipy import sparse

from src.config.defaults import InitDefaults
from src.core.errors import InvalidArgumentError, NumericOverflowError
from src.core.models.data_models import (
    BasisSpec,
    ConvLayer,
    EstimatorSpec,
    FeatureMatrix,
    NeighborhoodSet,
    PointCloud,
)
from src.estimators.integral import pair_weights
from src.geometry.density import estimate_density
from src.kernels.basis import eval_basis_batch

logger = logging.getLogger(__name__)


def apply_nonlinearity(values: np.ndarray, kind: str) -> np.ndarray:
    """relu -> max(0, x), none -> identitas"""
    if kind == "relu":
        return np.maximum(values, 0.0)
    if kind == "none":
        return values
    raise InvalidArgumentError(f"nonlinearity tidak dikenal: {kind}")


def resolve_density(
    estimator: EstimatorSpec,
    cloud_in: PointCloud,
    radius: float,
    density: Optional[np.ndarray] = None,
) -> Optional[np.ndarray]:
    """Densitas support: argumen, kolom density cloud, atau KDE bandwidth r/3"""
    if not estimator.needs_density:
        return None
    if density is not None:
        return density
    if cloud_in.density is not None:
        return cloud_in.density
    return estimate_density(cloud_in, InitDefaults.kde_bandwidth(radius))


def _check_inputs(
    basis: BasisSpec,
    in_channels: int,
    features: FeatureMatrix,
    cloud_in: PointCloud,
    cloud_out: PointCloud,
    neighbors: NeighborhoodSet,
) -> None:
    if cloud_in.dim != basis.dim or cloud_out.dim != basis.dim:
        raise InvalidArgumentError(
            f"dimensi cloud ({cloud_in.dim}, {cloud_out.dim}) tidak sesuai basis ({basis.dim})"
        )
    if features.n != cloud_in.n:
        raise InvalidArgumentError(f"fitur berisi {features.n} titik, cloud input {cloud_in.n}")
    if features.channels != in_channels:
        raise InvalidArgumentError(f"fitur memiliki {features.channels} channel, layer butuh {in_channels}")
    if neighbors.query_count != cloud_out.n or neighbors.support_count != cloud_in.n:
        raise InvalidArgumentError("neighborhood tidak dibangun untuk pasangan cloud ini")


def basis_operator(
    basis: BasisSpec,
    estimator: EstimatorSpec,
    cloud_in: PointCloud,
    cloud_out: PointCloud,
    neighbors: NeighborhoodSet,
    density: Optional[np.ndarray] = None,
) -> sparse.csr_matrix:
    """
    Operator sparse (M*K) x N dengan baris m*K + i berisi ω(x_m, y) b_i(y - x_m).

    Operator ini tidak bergantung pada fitur maupun weights, sehingga bisa
    dipakai ulang oleh semua layer dengan basis, estimator dan cloud yang sama.
    """
    if cloud_in.dim != basis.dim or cloud_out.dim != basis.dim:
        raise InvalidArgumentError(
            f"dimensi cloud ({cloud_in.dim}, {cloud_out.dim}) tidak sesuai basis ({basis.dim})"
        )
    if neighbors.query_count != cloud_out.n or neighbors.support_count != cloud_in.n:
        raise InvalidArgumentError("neighborhood tidak dibangun untuk pasangan cloud ini")
    density = resolve_density(estimator, cloud_in, neighbors.radius, density)
    omega = pair_weights(estimator, neighbors, density)
    offsets = cloud_in.positions[neighbors.indices] - cloud_out.positions[neighbors.query_ids]
    B = eval_basis_batch(basis, offsets)

    # baris (m, i) menempati blok query m, urut basis lalu neighbor
    K = basis.size
    counts = neighbors.counts
    query_ids = neighbors.query_ids
    starts = neighbors.indptr[:-1] * K
    local = np.arange(neighbors.pair_count, dtype=np.int64) - neighbors.indptr[query_ids]
    slots = (
        starts[query_ids][:, None]
        + np.arange(K, dtype=np.int64)[None, :] * counts[query_ids][:, None]
        + local[:, None]
    )
    values = np.empty(neighbors.pair_count * K)
    columns = np.empty(neighbors.pair_count * K, dtype=np.int64)
    values[slots.ravel()] = (omega[:, None] * B).ravel()
    columns[slots.ravel()] = np.repeat(neighbors.indices, K)
    row_starts = (starts[:, None] + np.arange(K, dtype=np.int64)[None, :] * counts[:, None]).ravel()
    indptr = np.append(row_starts, neighbors.pair_count * K)
    return sparse.csr_matrix(
        (values, columns, indptr),
        shape=(neighbors.query_count * K, neighbors.support_count),
    )


def accumulate(operator: sparse.csr_matrix, features: FeatureMatrix, kernel_size: int) -> np.ndarray:
    """Akumulasi M x C x K dari operator basis_operator"""
    stacked = np.asarray(operator @ features.values)
    return stacked.reshape(-1, kernel_size, features.channels).transpose(0, 2, 1)


def basis_accumulation(
    basis: BasisSpec,
    estimator: EstimatorSpec,
    features: FeatureMatrix,
    cloud_in: PointCloud,
    cloud_out: PointCloud,
    neighbors: NeighborhoodSet,
    density: Optional[np.ndarray] = None,
    operator: Optional[sparse.csr_matrix] = None,
) -> np.ndarray:
    """
    Akumulasi per basis c_{c,i}(x) = estimator atas {F_c(y) b_i(y - x)}.

    Returns:
        Array M x C x K
    """
    _check_inputs(basis, features.channels, features, cloud_in, cloud_out, neighbors)
    if operator is None:
        operator = basis_operator(basis, estimator, cloud_in, cloud_out, neighbors, density)
    return accumulate(operator, features, basis.size)


def project(layer: ConvLayer, accumulated: np.ndarray, layer_index: int) -> FeatureMatrix:
    """
    F_o(x) = act( Σ_c Σ_i c_{c,i}(x) w[c,i,o] ) dari akumulasi M x C x K.

    Raises:
        NumericOverflowError: jika output tidak finite
    """
    C, K, O = layer.weights.shape
    with np.errstate(over="ignore", invalid="ignore"):
        output = accumulated.reshape(-1, C * K) @ layer.weights.reshape(C * K, O)
        output = apply_nonlinearity(output, layer.nonlinearity)

    if not np.all(np.isfinite(output)):
        logger.error(f"Output layer {layer_index} tidak finite")
        raise NumericOverflowError(f"output tidak finite di layer {layer_index}", layer_index=layer_index)
    return FeatureMatrix(output, layer_index=layer_index)


def conv_forward(
    layer: ConvLayer,
    features_in: FeatureMatrix,
    cloud_in: PointCloud,
    cloud_out: PointCloud,
    neighbors: NeighborhoodSet,
    density: Optional[np.ndarray] = None,
    operator: Optional[sparse.csr_matrix] = None,
) -> FeatureMatrix:
    """
    Konvolusi kontinu satu layer.

    F_o(x) = act( Σ_y ω(x,y) Σ_c F_c(y) Σ_i b_i(y - x) w[c,i,o] ), dengan
    ω bobot estimator per pasangan. Estimator dijumlahkan per basis dulu
    (urut neighbor), lalu dikontraksi dengan weights atas channel dan basis.
    """
    if not layer.is_initialized:
        raise InvalidArgumentError("layer belum memiliki weights")
    _check_inputs(layer.basis, layer.in_channels, features_in, cloud_in, cloud_out, neighbors)
    if not np.isclose(neighbors.radius, layer.radius, rtol=1e-12, atol=0.0):
        raise InvalidArgumentError(f"neighborhood radius {neighbors.radius} != radius layer {layer.radius}")

    if operator is None:
        operator = basis_operator(layer.basis, layer.estimator, cloud_in, cloud_out, neighbors, density)
    with np.errstate(over="ignore", invalid="ignore"):
        accumulated = accumulate(operator, features_in, layer.kernel_size)
    return project(layer, accumulated, features_in.layer_index + 1)
