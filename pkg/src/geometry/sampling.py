# src/geometry/sampling.py
import logging
from typing import Dict, List, Sequence, Tuple

import numpy as np

from src.core.errors import InvalidArgumentError
from src.core.models.data_models import PointCloud
from src.utils.rng import make_rng, STREAM_POISSON, STREAM_LEVELS, derive_seed

logger = logging.getLogger(__name__)


def poisson_disk_subsample(cloud: PointCloud, radius: float, seed: int) -> PointCloud:
    """
    Dart throwing greedy di atas permutasi acak ber-seed.

    Titik diterima bila tidak ada titik terpilih dengan jarak < radius.
    Titik terpilih dicatat di hash grid dengan sel sebesar radius, jadi
    pengecekan cukup di 3^d sel tetangga. Output urut index asli.
    """
    if not np.isfinite(radius) or radius <= 0:
        raise InvalidArgumentError(f"radius harus > 0, didapat {radius}")

    positions = cloud.positions
    origin = positions.min(axis=0)
    cells = np.floor((positions - origin) / radius).astype(np.int64)
    offsets = [np.array(o) for o in np.ndindex(*([3] * cloud.dim))]
    grid: Dict[Tuple[int, ...], List[int]] = {}
    accepted = []

    order = make_rng(seed, STREAM_POISSON).permutation(cloud.n)
    for index in order:
        cell = cells[index]
        point = positions[index]
        rejected = False
        for offset in offsets:
            for other in grid.get(tuple(cell + offset - 1), ()):
                diff = positions[other] - point
                if np.sqrt(np.sum(diff * diff)) < radius:
                    rejected = True
                    break
            if rejected:
                break
        if not rejected:
            grid.setdefault(tuple(cell), []).append(int(index))
            accepted.append(int(index))

    kept = np.sort(np.array(accepted, dtype=np.int64))
    logger.debug(f"Poisson disk r={radius}: {kept.size} dari {cloud.n} titik")
    return cloud.subset(kept).without_density()


def build_levels(cloud: PointCloud, level_radii: Sequence[float], seed: int) -> List[PointCloud]:
    """Hierarki level: level 0 cloud asli, level k subsample level k-1"""
    levels = [cloud]
    for k, radius in enumerate(level_radii, start=1):
        level_seed = derive_seed(seed, STREAM_LEVELS, k)
        levels.append(poisson_disk_subsample(levels[-1], radius, level_seed))
    return levels
