# src/geometry/generators.py
import logging
from typing import Dict, Any, Optional, Sequence, Tuple, Union

import numpy as np

from src.core.errors import InvalidArgumentError
from src.core.interfaces.generator import ICloudGenerator
from src.core.models.data_models import PointCloud
from src.utils.rng import make_rng, STREAM_CLOUD

Extent = Union[Tuple[float, float], Sequence[Tuple[float, float]]]

DENSITY_MODES = ("kde", "exact")


def _check_dim(dim: int) -> int:
    if dim not in (1, 2, 3):
        raise InvalidArgumentError(f"dim harus 1, 2 atau 3, didapat {dim}")
    return int(dim)


def _check_density_mode(mode: str) -> str:
    if mode not in DENSITY_MODES:
        raise InvalidArgumentError(f"mode densitas harus salah satu dari {list(DENSITY_MODES)}, didapat {mode}")
    return mode


def normalize_extent(extent: Extent, dim: int) -> np.ndarray:
    """
    Mengubah extent menjadi array dim x 2.

    Satu interval (lo, hi) dipakai untuk semua sumbu.
    """
    bounds = np.array(extent, dtype=np.float64)
    if bounds.shape == (2,):
        bounds = np.tile(bounds, (dim, 1))
    if bounds.shape != (dim, 2):
        raise InvalidArgumentError(f"extent harus (lo, hi) atau {dim} interval, didapat shape {bounds.shape}")
    if not np.all(np.isfinite(bounds)) or np.any(bounds[:, 1] <= bounds[:, 0]):
        raise InvalidArgumentError(f"extent memiliki volume nol atau tidak finite: {bounds.tolist()}")
    return bounds


def generate_uniform_cloud(dim: int, n: int, extent: Extent, seed: int, with_density: bool = False) -> PointCloud:
    """
    n titik i.i.d. uniform di dalam box extent.

    with_density menyertakan densitas sampling n / volume per titik.
    """
    dim = _check_dim(dim)
    if n < 1:
        raise InvalidArgumentError(f"n harus >= 1, didapat {n}")
    bounds = normalize_extent(extent, dim)
    rng = make_rng(seed, STREAM_CLOUD)
    unit = rng.random((n, dim))
    positions = bounds[:, 0] + unit * (bounds[:, 1] - bounds[:, 0])
    if not with_density:
        return PointCloud(positions)
    volume = float(np.prod(bounds[:, 1] - bounds[:, 0]))
    return PointCloud(positions, np.full(n, n / volume))


def _balanced_labels(n: int, cluster_count: int) -> np.ndarray:
    """n // k titik per cluster, sisa dibagi ke cluster awal"""
    sizes = np.full(cluster_count, n // cluster_count, dtype=np.int64)
    sizes[: n % cluster_count] += 1
    return np.repeat(np.arange(cluster_count), sizes)


def mixture_density(positions: np.ndarray, centers: np.ndarray, spread: float, n: int) -> np.ndarray:
    """n x rata-rata pdf Gaussian isotropik di setiap posisi (titik per satuan volume)"""
    dim = positions.shape[1]
    squared = np.sum((positions[:, None, :] - centers[None, :, :]) ** 2, axis=2)
    pdf = np.exp(-squared / (2.0 * spread * spread)) / (2.0 * np.pi * spread * spread) ** (dim / 2.0)
    return n * np.mean(pdf, axis=1)


def generate_clustered_cloud(
    dim: int,
    n: int,
    cluster_count: int,
    spread: float,
    seed: int,
    extent: Extent = (0.0, 1.0),
    centers: Optional[np.ndarray] = None,
    with_density: bool = False,
) -> PointCloud:
    """
    Sampel campuran Gaussian isotropik.

    Pusat cluster diambil uniform di extent kecuali diberikan eksplisit.
    Ukuran cluster seimbang: n // k titik, sisa dibagi ke cluster awal.
    """
    dim = _check_dim(dim)
    if cluster_count < 1:
        raise InvalidArgumentError(f"cluster_count harus >= 1, didapat {cluster_count}")
    if not np.isfinite(spread) or spread <= 0:
        raise InvalidArgumentError(f"spread harus > 0, didapat {spread}")
    if n < cluster_count:
        raise InvalidArgumentError(f"n ({n}) lebih kecil dari cluster_count ({cluster_count})")

    rng = make_rng(seed, STREAM_CLOUD)
    if centers is None:
        bounds = normalize_extent(extent, dim)
        centers = bounds[:, 0] + rng.random((cluster_count, dim)) * (bounds[:, 1] - bounds[:, 0])
    else:
        centers = np.array(centers, dtype=np.float64).reshape(-1, dim)
        if centers.shape[0] != cluster_count:
            raise InvalidArgumentError("jumlah centers harus sama dengan cluster_count")

    labels = _balanced_labels(n, cluster_count)
    positions = centers[labels] + spread * rng.standard_normal((n, dim))
    if not with_density:
        return PointCloud(positions)
    return PointCloud(positions, mixture_density(positions, centers, spread, n))


def _unit_directions(rng: np.random.Generator, count: int) -> np.ndarray:
    directions = rng.standard_normal((count, 3))
    return directions / np.linalg.norm(directions, axis=1, keepdims=True)


def _von_mises_fisher(rng: np.random.Generator, mean: np.ndarray, kappa: float) -> np.ndarray:
    """Sampel von Mises-Fisher di S^2, satu per baris mean (inversi CDF cos θ)"""
    count = mean.shape[0]
    u = rng.random(count)
    w = 1.0 + np.log(u + (1.0 - u) * np.exp(-2.0 * kappa)) / kappa
    tangent = rng.standard_normal((count, 3))
    tangent -= np.sum(tangent * mean, axis=1, keepdims=True) * mean
    tangent /= np.linalg.norm(tangent, axis=1, keepdims=True)
    return w[:, None] * mean + np.sqrt(np.clip(1.0 - w * w, 0.0, None))[:, None] * tangent


def von_mises_fisher_pdf(directions: np.ndarray, means: np.ndarray, kappa: float) -> np.ndarray:
    """pdf vMF di S^2 per titik x cluster, bentuk stabil κ exp(κ(μ·u - 1)) / (2π(1 - e^{-2κ}))"""
    cosine = directions @ means.T
    return kappa * np.exp(kappa * (cosine - 1.0)) / (2.0 * np.pi * (1.0 - np.exp(-2.0 * kappa)))


def generate_sphere_cloud(
    n: int,
    seed: int,
    center: Sequence[float] = (0.5, 0.5, 0.5),
    radius: float = 0.5,
    cluster_count: int = 0,
    spread: float = 0.1,
    background: float = 0.0,
    with_density: bool = False,
) -> PointCloud:
    """
    n titik pada permukaan bola 3D.

    cluster_count = 0 menghasilkan sampel uniform per luas. cluster_count > 0
    mencampur cluster von Mises-Fisher (spread = simpangan tangensial,
    κ = (radius / spread)^2) dengan fraksi background uniform. Ukuran
    komponen seimbang seperti generate_clustered_cloud.

    with_density menyertakan densitas sampling dalam titik per satuan luas.
    """
    if n < 1:
        raise InvalidArgumentError(f"n harus >= 1, didapat {n}")
    if not np.isfinite(radius) or radius <= 0:
        raise InvalidArgumentError(f"radius bola harus > 0, didapat {radius}")
    if cluster_count < 0:
        raise InvalidArgumentError(f"cluster_count harus >= 0, didapat {cluster_count}")
    if not 0.0 <= background <= 1.0:
        raise InvalidArgumentError(f"background harus di [0, 1], didapat {background}")
    center = np.array(center, dtype=np.float64).reshape(-1)
    if center.shape != (3,) or not np.all(np.isfinite(center)):
        raise InvalidArgumentError("center bola harus 3 koordinat finite")

    rng = make_rng(seed, STREAM_CLOUD)
    area = 4.0 * np.pi * radius * radius
    if cluster_count == 0:
        directions = _unit_directions(rng, n)
        density = np.full(n, n / area)
    else:
        if not np.isfinite(spread) or spread <= 0:
            raise InvalidArgumentError(f"spread harus > 0, didapat {spread}")
        background_count = int(round(background * n))
        if n - background_count < cluster_count:
            raise InvalidArgumentError(f"n ({n}) terlalu kecil untuk {cluster_count} cluster")
        kappa = (radius / spread) ** 2
        means = _unit_directions(rng, cluster_count)
        labels = _balanced_labels(n - background_count, cluster_count)
        clustered = _von_mises_fisher(rng, means[labels], kappa)
        directions = np.concatenate([clustered, _unit_directions(rng, background_count)])
        cluster_pdf = von_mises_fisher_pdf(directions, means, kappa)
        fraction = (n - background_count) / n
        pdf = fraction * np.mean(cluster_pdf, axis=1) + (1.0 - fraction) / (4.0 * np.pi)
        density = n * pdf / (radius * radius)

    positions = center + radius * directions
    return PointCloud(positions, density) if with_density else PointCloud(positions)


def generate_grid_cloud(dim: int, per_axis: int, spacing: float = 1.0, origin: float = 0.0) -> PointCloud:
    """Lattice reguler per_axis^dim titik, urutan indexing 'ij'"""
    dim = _check_dim(dim)
    if per_axis < 1:
        raise InvalidArgumentError(f"per_axis harus >= 1, didapat {per_axis}")
    if spacing <= 0:
        raise InvalidArgumentError(f"spacing harus > 0, didapat {spacing}")
    axis = origin + spacing * np.arange(per_axis, dtype=np.float64)
    mesh = np.meshgrid(*([axis] * dim), indexing="ij")
    return PointCloud(np.stack([m.ravel() for m in mesh], axis=1))


class UniformCloudGenerator(ICloudGenerator):
    """Generator cloud uniform di dalam box"""
    def __init__(self, dim: int, n: int, extent: Extent = (0.0, 1.0), density: str = "kde"):
        self.dim = _check_dim(dim)
        self.n = int(n)
        self.extent = normalize_extent(extent, self.dim)
        self.density = _check_density_mode(density)
        if self.n < 1:
            raise InvalidArgumentError(f"n harus >= 1, didapat {n}")

    def generate(self, seed: int) -> PointCloud:
        return generate_uniform_cloud(
            self.dim, self.n, self.extent, seed, with_density=self.density == "exact"
        )

    def describe(self) -> Dict[str, Any]:
        return {
            "kind": "uniform",
            "dim": self.dim,
            "n": self.n,
            "extent": self.extent.tolist(),
            "density": self.density,
        }


class ClusteredCloudGenerator(ICloudGenerator):
    """Generator cloud campuran Gaussian"""
    def __init__(
        self,
        dim: int,
        n: int,
        cluster_count: int,
        spread: float,
        extent: Extent = (0.0, 1.0),
        density: str = "kde",
    ):
        self.dim = _check_dim(dim)
        self.n = int(n)
        self.cluster_count = int(cluster_count)
        self.spread = float(spread)
        self.extent = normalize_extent(extent, self.dim)
        self.density = _check_density_mode(density)
        if self.cluster_count < 1 or self.n < self.cluster_count or self.spread <= 0:
            raise InvalidArgumentError("parameter clustered generator tidak valid")

    def generate(self, seed: int) -> PointCloud:
        return generate_clustered_cloud(
            self.dim,
            self.n,
            self.cluster_count,
            self.spread,
            seed,
            extent=self.extent,
            with_density=self.density == "exact",
        )

    def describe(self) -> Dict[str, Any]:
        return {
            "kind": "clustered",
            "dim": self.dim,
            "n": self.n,
            "cluster_count": self.cluster_count,
            "spread": self.spread,
            "extent": self.extent.tolist(),
            "density": self.density,
        }


class SphereCloudGenerator(ICloudGenerator):
    """Generator cloud pada permukaan bola (3D, tanpa batas domain)"""
    def __init__(
        self,
        n: int,
        center: Sequence[float] = (0.5, 0.5, 0.5),
        radius: float = 0.5,
        cluster_count: int = 0,
        spread: float = 0.1,
        background: float = 0.0,
        density: str = "kde",
    ):
        self.dim = 3
        self.n = int(n)
        self.center = [float(c) for c in center]
        self.radius = float(radius)
        self.cluster_count = int(cluster_count)
        self.spread = float(spread)
        self.background = float(background)
        self.density = _check_density_mode(density)
        if self.n < 1 or self.radius <= 0 or self.cluster_count < 0 or self.spread <= 0:
            raise InvalidArgumentError("parameter sphere generator tidak valid")
        if not 0.0 <= self.background <= 1.0:
            raise InvalidArgumentError(f"background harus di [0, 1], didapat {background}")

    def generate(self, seed: int) -> PointCloud:
        return generate_sphere_cloud(
            self.n,
            seed,
            center=self.center,
            radius=self.radius,
            cluster_count=self.cluster_count,
            spread=self.spread,
            background=self.background,
            with_density=self.density == "exact",
        )

    def describe(self) -> Dict[str, Any]:
        return {
            "kind": "sphere",
            "dim": 3,
            "n": self.n,
            "center": self.center,
            "radius": self.radius,
            "cluster_count": self.cluster_count,
            "spread": self.spread,
            "background": self.background,
            "density": self.density,
        }


class GridCloudGenerator(ICloudGenerator):
    """Lattice tetap; seed diabaikan karena posisinya deterministik"""
    def __init__(self, dim: int, per_axis: int, spacing: float = 1.0):
        self.dim = _check_dim(dim)
        self.per_axis = int(per_axis)
        self.spacing = float(spacing)
        self._cloud = generate_grid_cloud(self.dim, self.per_axis, self.spacing)

    def generate(self, seed: int) -> PointCloud:
        return self._cloud

    def describe(self) -> Dict[str, Any]:
        return {"kind": "grid", "dim": self.dim, "per_axis": self.per_axis, "spacing": self.spacing}


def make_generator(spec: Dict[str, Any]) -> ICloudGenerator:
    """Membuat generator dari deskripsi dict (config atau meta ZTable)"""
    kind = spec.get("kind")
    density = spec.get("density", "kde")
    try:
        if kind == "uniform":
            return UniformCloudGenerator(spec["dim"], spec["n"], spec.get("extent", (0.0, 1.0)), density)
        if kind == "clustered":
            return ClusteredCloudGenerator(
                spec["dim"],
                spec["n"],
                spec["cluster_count"],
                spec["spread"],
                spec.get("extent", (0.0, 1.0)),
                density,
            )
        if kind == "sphere":
            if spec.get("dim", 3) != 3:
                raise InvalidArgumentError("generator sphere hanya untuk dim 3")
            return SphereCloudGenerator(
                spec["n"],
                center=spec.get("center", (0.5, 0.5, 0.5)),
                radius=spec.get("radius", 0.5),
                cluster_count=spec.get("cluster_count", 0),
                spread=spec.get("spread", 0.1),
                background=spec.get("background", 0.0),
                density=density,
            )
        if kind == "grid":
            return GridCloudGenerator(spec["dim"], spec["per_axis"], spec.get("spacing", 1.0))
    except KeyError as e:
        logging.getLogger(__name__).error(f"Generator spec tidak lengkap: {str(e)}")
        raise InvalidArgumentError(f"generator {kind} membutuhkan field {e}")
    raise InvalidArgumentError(f"jenis generator tidak dikenal: {kind}")
