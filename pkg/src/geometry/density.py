# src/geometry/density.py
import logging

import numpy as np
from sklearn.neighbors import KernelDensity

from src.core.errors import InvalidArgumentError
from src.core.models.data_models import PointCloud

logger = logging.getLogger(__name__)


def estimate_density(cloud: PointCloud, bandwidth: float) -> np.ndarray:
    """
    KDE Gaussian per titik, termasuk self term.

    Hasil dalam titik per satuan volume:
    p(y_j) = sum_k exp(-|y_j - y_k|^2 / (2 h^2)) / (2 pi h^2)^(d/2).
    KernelDensity menormalisasi dengan 1/N, jadi hasilnya dikali N.
    """
    if not np.isfinite(bandwidth) or bandwidth <= 0:
        raise InvalidArgumentError(f"bandwidth harus > 0, didapat {bandwidth}")

    kde = KernelDensity(kernel="gaussian", bandwidth=bandwidth, atol=0.0, rtol=0.0)
    kde.fit(cloud.positions)
    log_density = kde.score_samples(cloud.positions)
    density = cloud.n * np.exp(log_density)

    if not np.all(np.isfinite(density)) or np.any(density <= 0):
        raise InvalidArgumentError(f"KDE menghasilkan densitas tidak valid (bandwidth {bandwidth})")
    logger.debug(f"Densitas {cloud.n} titik: min {density.min():.4g}, max {density.max():.4g}")
    return density
