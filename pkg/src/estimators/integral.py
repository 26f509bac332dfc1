# src/estimators/integral.py
from typing import Optional, Sequence

import numpy as np

from src.config.defaults import InitDefaults
from src.core.errors import InvalidArgumentError
from src.core.models.data_models import EstimatorSpec, DensityMLPParams, NeighborhoodSet
from src.utils.rng import make_rng, STREAM_DENSITY_MLP


def init_density_mlp(hidden: int = InitDefaults.DENSITY_MLP_HIDDEN, seed: int = 0) -> DensityMLPParams:
    """
    Parameter π 1 -> H -> 1.

    Bobot diambil half-normal (layer pertama |N(0,1)|, layer kedua
    |N(0, 2/H)|) dengan bias nol, sehingga π awalnya monoton naik dan
    sebanding dengan densitas yang diestimasi.
    """
    if hidden < 1:
        raise InvalidArgumentError("hidden density_mlp harus >= 1")
    rng = make_rng(seed, STREAM_DENSITY_MLP)
    w1 = np.abs(rng.standard_normal(hidden))
    w2 = np.abs(rng.standard_normal(hidden)) * np.sqrt(2.0 / hidden)
    return DensityMLPParams(w1=w1, b1=np.zeros(hidden), w2=w2, b2=0.0)


def corrected_density(params: DensityMLPParams, densities: np.ndarray) -> np.ndarray:
    """π(p) = softplus(MLP(p)) + eps, selalu positif"""
    p = np.asarray(densities, dtype=np.float64)
    hidden = np.maximum(p[:, None] * params.w1[None, :] + params.b1[None, :], 0.0)
    output = np.sum(hidden * params.w2[None, :], axis=1) + params.b2
    return np.logaddexp(0.0, output) + InitDefaults.SOFTPLUS_EPSILON


def _check_densities(densities: Optional[Sequence[float]], count: int, mode: str) -> np.ndarray:
    if densities is None:
        raise InvalidArgumentError(f"estimator {mode} membutuhkan densitas")
    p = np.asarray(densities, dtype=np.float64)
    if p.shape != (count,):
        raise InvalidArgumentError(f"jumlah densitas ({p.shape}) tidak sama dengan kontribusi ({count})")
    if not np.all(np.isfinite(p)) or np.any(p <= 0):
        raise InvalidArgumentError(f"densitas untuk estimator {mode} harus positif dan finite")
    return p


def estimate(
    spec: EstimatorSpec,
    contributions: Sequence[float],
    densities: Optional[Sequence[float]] = None,
) -> float:
    """
    Estimasi integral konvolusi dari kontribusi a(y) per neighbor.

    sum: Σa, avg: Σa/|N|, mc: Σa/(p|N|), nn: Σa/π(p).
    Neighborhood kosong menghasilkan 0 untuk semua mode.
    """
    a = np.asarray(contributions, dtype=np.float64).reshape(-1)
    count = a.shape[0]
    if spec.needs_density and count:
        p = _check_densities(densities, count, spec.mode)
    if count == 0:
        return 0.0

    if spec.mode == "sum":
        return float(np.sum(a))
    if spec.mode == "avg":
        return float(np.sum(a) / count)
    if spec.mode == "mc":
        return float(np.sum(a / p) / count)
    return float(np.sum(a / corrected_density(spec.density_mlp, p)))


def pair_weights(
    spec: EstimatorSpec,
    neighbors: NeighborhoodSet,
    support_density: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    Bobot estimator per pasangan (query, support), urut seperti neighbors.indices.

    Untuk setiap query, estimate(a) = Σ bobot * a atas pasangannya.
    """
    counts = neighbors.counts
    pair_counts = np.repeat(counts, counts).astype(np.float64)
    if spec.mode == "sum":
        return np.ones(neighbors.pair_count)
    if spec.mode == "avg":
        return 1.0 / pair_counts

    if support_density is None:
        raise InvalidArgumentError(f"estimator {spec.mode} membutuhkan densitas")
    p = np.asarray(support_density, dtype=np.float64)
    if p.shape != (neighbors.support_count,):
        raise InvalidArgumentError("densitas harus tersedia untuk setiap titik support")
    if not np.all(np.isfinite(p)) or np.any(p <= 0):
        raise InvalidArgumentError(f"densitas untuk estimator {spec.mode} harus positif dan finite")
    pair_density = p[neighbors.indices]
    if spec.mode == "mc":
        return 1.0 / (pair_density * pair_counts)
    return 1.0 / corrected_density(spec.density_mlp, pair_density)


def make_estimator(mode: str, seed: int = 0) -> EstimatorSpec:
    """EstimatorSpec siap pakai; mode nn mendapat π ber-seed"""
    if mode == "nn":
        return EstimatorSpec("nn", density_mlp=init_density_mlp(seed=seed))
    return EstimatorSpec(mode)
