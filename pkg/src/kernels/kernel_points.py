# src/kernels/kernel_points.py
import numpy as np

from src.core.errors import InvalidArgumentError

GOLDEN_RATIO = (1.0 + np.sqrt(5.0)) / 2.0


def _icosahedron_vertices() -> np.ndarray:
    """12 vertex icosahedron reguler pada bola satuan"""
    phi = GOLDEN_RATIO
    vertices = []
    for a in (-1.0, 1.0):
        for b in (-phi, phi):
            vertices.append((0.0, a, b))
            vertices.append((a, b, 0.0))
            vertices.append((b, 0.0, a))
    vertices = np.array(vertices)
    return vertices / np.linalg.norm(vertices, axis=1, keepdims=True)


def _fibonacci_sphere(count: int) -> np.ndarray:
    """count titik hampir merata pada bola satuan (spiral Fibonacci)"""
    index = np.arange(count, dtype=np.float64) + 0.5
    z = 1.0 - 2.0 * index / count
    rho = np.sqrt(1.0 - z * z)
    angle = 2.0 * np.pi * index / GOLDEN_RATIO
    return np.stack([rho * np.cos(angle), rho * np.sin(angle), z], axis=1)


def make_kernel_points(layout: str, dim: int, per_axis_or_count: int, radius: float) -> np.ndarray:
    """
    Membuat kernel points K x d.

    Args:
        layout: 'grid' (lattice per_axis^d di [-radius, radius]) atau
            'sphere' (titik pusat + vertex icosahedron bila count=13,
            selain itu pusat + count-1 titik spiral Fibonacci)
        dim: dimensi ruang offset
        per_axis_or_count: titik per sumbu (grid) atau total titik (sphere)
        radius: skala layout

    Returns:
        Array K x d
    """
    if dim not in (1, 2, 3):
        raise InvalidArgumentError(f"dim harus 1, 2 atau 3, didapat {dim}")
    if not np.isfinite(radius) or radius <= 0:
        raise InvalidArgumentError(f"radius harus > 0, didapat {radius}")

    if layout == "grid":
        per_axis = int(per_axis_or_count)
        if per_axis < 1:
            raise InvalidArgumentError(f"per_axis harus >= 1, didapat {per_axis}")
        axis = np.zeros(1) if per_axis == 1 else np.linspace(-radius, radius, per_axis)
        mesh = np.meshgrid(*([axis] * dim), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    if layout == "sphere":
        if dim != 3:
            raise InvalidArgumentError("layout sphere hanya untuk dim 3")
        count = int(per_axis_or_count)
        if count < 2:
            raise InvalidArgumentError(f"count sphere harus >= 2, didapat {count}")
        shell = _icosahedron_vertices() if count == 13 else _fibonacci_sphere(count - 1)
        return np.vstack([np.zeros((1, 3)), radius * shell])

    raise InvalidArgumentError(f"layout kernel points tidak dikenal: {layout}")


def make_spherical_kernel_points(n_rho: int, n_theta: int, n_phi: int) -> np.ndarray:
    """Pusat bin grid reguler pada koordinat spherical ternormalisasi [0,1]^3"""
    if min(n_rho, n_theta, n_phi) < 1:
        raise InvalidArgumentError("jumlah bin spherical harus >= 1")
    axes = [(np.arange(n, dtype=np.float64) + 0.5) / n for n in (n_rho, n_theta, n_phi)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)
