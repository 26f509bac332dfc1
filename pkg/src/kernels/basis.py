# src/kernels/basis.py
import numpy as np

from src.config.defaults import InitDefaults
from src.core.errors import InvalidArgumentError
from src.core.models.data_models import BasisSpec, MLPParams
from src.kernels.kernel_points import make_kernel_points, make_spherical_kernel_points
from src.utils.rng import make_rng, STREAM_BASIS


def to_spherical(offsets: np.ndarray, radius: float) -> np.ndarray:
    """
    Offset kartesian 3D ke (rho, theta, phi) ternormalisasi ke [0,1].

    rho di [0, r], theta di [0, pi], phi di [-pi, pi); offset nol
    dipetakan ke theta = 0, phi = 0.
    """
    rho = np.sqrt(np.sum(offsets * offsets, axis=1))
    safe = np.where(rho > 0, rho, 1.0)
    theta = np.where(rho > 0, np.arccos(np.clip(offsets[:, 2] / safe, -1.0, 1.0)), 0.0)
    phi = np.arctan2(offsets[:, 1], offsets[:, 0])
    phi = np.where(phi >= np.pi, -np.pi, phi)
    return np.stack([rho / radius, theta / np.pi, (phi + np.pi) / (2.0 * np.pi)], axis=1)


def _squared_distances(offsets: np.ndarray, kernel_points: np.ndarray) -> np.ndarray:
    diff = kernel_points[None, :, :] - offsets[:, None, :]
    return np.sum(diff * diff, axis=2)


def eval_basis_batch(spec: BasisSpec, offsets: np.ndarray) -> np.ndarray:
    """Evaluasi basis untuk M offset sekaligus, hasil M x K"""
    offsets = np.asarray(offsets, dtype=np.float64)
    if offsets.ndim != 2 or offsets.shape[1] != spec.dim:
        raise InvalidArgumentError(f"offsets harus M x {spec.dim}, didapat shape {offsets.shape}")
    if offsets.shape[0] == 0:
        return np.zeros((0, spec.size))

    if spec.family == "gaussian":
        return np.exp(-_squared_distances(offsets, spec.kernel_points) / spec.bandwidth)

    if spec.family == "box":
        if spec.coordinates == "spherical":
            offsets = to_spherical(offsets, spec.radius)
        nearest = np.argmin(_squared_distances(offsets, spec.kernel_points), axis=1)
        values = np.zeros((offsets.shape[0], spec.size))
        values[np.arange(offsets.shape[0]), nearest] = 1.0
        return values

    if spec.family == "linear":
        distance = np.sqrt(_squared_distances(offsets, spec.kernel_points))
        return np.maximum(1.0 - distance / spec.bandwidth, 0.0)

    if spec.family == "dot":
        projection = np.sum(offsets[:, None, :] * spec.vectors[None, :, :], axis=2)
        return projection + spec.dot_bias

    # mlp
    params = spec.mlp
    hidden = np.sum(offsets[:, None, :] * params.w1[None, :, :], axis=2) + params.b1
    hidden = np.maximum(hidden, 0.0)
    return np.sum(hidden[:, None, :] * params.w2[None, :, :], axis=2) + params.b2


def eval_basis(spec: BasisSpec, offset: np.ndarray) -> np.ndarray:
    """Evaluasi basis untuk satu offset δ, hasil K"""
    offset = np.asarray(offset, dtype=np.float64).reshape(1, -1)
    if not np.all(np.isfinite(offset)):
        raise InvalidArgumentError("offset harus finite")
    return eval_basis_batch(spec, offset)[0]


def init_mlp_basis(dim: int, radius: float, hidden: int, K: int, seed: int) -> MLPParams:
    """
    Parameter mlp basis.

    Layer pertama ~ Normal(0, 1/(d r^2)) supaya pre-aktivasi berorde satu
    untuk offset di dalam receptive field, layer kedua ~ Normal(0, 2/H),
    bias nol.
    """
    if hidden < 1 or K < 1:
        raise InvalidArgumentError("hidden dan K harus >= 1")
    if radius <= 0:
        raise InvalidArgumentError(f"radius harus > 0, didapat {radius}")
    rng = make_rng(seed, STREAM_BASIS)
    w1 = rng.standard_normal((hidden, dim)) * np.sqrt(1.0 / (dim * radius * radius))
    w2 = rng.standard_normal((K, hidden)) * np.sqrt(2.0 / hidden)
    return MLPParams(w1=w1, b1=np.zeros(hidden), w2=w2, b2=np.zeros(K))


def init_dot_basis(dim: int, radius: float, K: int, seed: int):
    """Vektor proyeksi ~ Normal(0, 1/(d r^2)) dan bias nol"""
    if K < 1:
        raise InvalidArgumentError("K harus >= 1")
    rng = make_rng(seed, STREAM_BASIS)
    vectors = rng.standard_normal((K, dim)) * np.sqrt(1.0 / (dim * radius * radius))
    return vectors, np.zeros(K)


def make_gaussian_basis(kernel_points: np.ndarray, bandwidth: float, radius: float) -> BasisSpec:
    points = np.asarray(kernel_points, dtype=np.float64)
    return BasisSpec("gaussian", points.shape[1], radius, kernel_points=points, bandwidth=bandwidth)


def make_box_basis(kernel_points: np.ndarray, radius: float) -> BasisSpec:
    points = np.asarray(kernel_points, dtype=np.float64)
    return BasisSpec("box", points.shape[1], radius, kernel_points=points)


def make_linear_basis(kernel_points: np.ndarray, bandwidth: float, radius: float) -> BasisSpec:
    points = np.asarray(kernel_points, dtype=np.float64)
    return BasisSpec("linear", points.shape[1], radius, kernel_points=points, bandwidth=bandwidth)


def make_dot_basis(dim: int, K: int, radius: float, seed: int) -> BasisSpec:
    vectors, bias = init_dot_basis(dim, radius, K, seed)
    return BasisSpec("dot", dim, radius, vectors=vectors, dot_bias=bias)


def make_mlp_basis(dim: int, K: int, radius: float, seed: int, hidden: int = InitDefaults.MLP_HIDDEN) -> BasisSpec:
    return BasisSpec("mlp", dim, radius, mlp=init_mlp_basis(dim, radius, hidden, K, seed))


def make_spherical_box_basis(n_rho: int, n_theta: int, n_phi: int, radius: float) -> BasisSpec:
    """Basis box pada koordinat spherical (SPHConv)"""
    points = make_spherical_kernel_points(n_rho, n_theta, n_phi)
    return BasisSpec("box", 3, radius, kernel_points=points, coordinates="spherical")


def make_basis(
    family: str,
    dim: int,
    radius: float,
    size: int,
    seed: int = 0,
    layout: str = "sphere",
    kernel_radius: float = None,
    bandwidth: float = None,
    hidden: int = InitDefaults.MLP_HIDDEN,
) -> BasisSpec:
    """
    Membangun BasisSpec dari parameter datar (dipakai builder stack).

    size adalah K untuk sphere/mlp/dot, titik per sumbu untuk grid, dan
    jumlah total bin untuk layout spherical.
    """
    if family in ("mlp", "dot"):
        if family == "mlp":
            return make_mlp_basis(dim, size, radius, seed, hidden=hidden)
        return make_dot_basis(dim, size, radius, seed)

    if layout == "spherical":
        if family != "box":
            raise InvalidArgumentError("layout spherical hanya untuk family box")
        # 2 bin radial x 2 bin polar x sisa bin azimuth
        return make_spherical_box_basis(2, 2, max(1, size // 4), radius)

    kernel_radius = radius if kernel_radius is None else kernel_radius
    points = make_kernel_points(layout, dim, size, kernel_radius)
    if family == "box":
        return make_box_basis(points, radius)
    if bandwidth is None:
        raise InvalidArgumentError(f"family {family} membutuhkan bandwidth")
    if family == "gaussian":
        return make_gaussian_basis(points, bandwidth, radius)
    if family == "linear":
        return make_linear_basis(points, bandwidth, radius)
    raise InvalidArgumentError(f"family basis tidak dikenal: {family}")
