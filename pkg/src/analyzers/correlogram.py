# src/analyzers/correlogram.py
"""
Correlogram: korelasi Pearson fitur pada pasangan titik per bin jarak.

Setiap pasangan tak berurut (i, j) menyumbang nilai (F_c(x_i), F_c(x_j))
untuk semua channel, dalam dua urutan sehingga r simetris. Bin half-open
[lo, hi). Bin dengan < 2 pasangan atau variance nol memberi r = None.
"""
from typing import List, Optional

import numpy as np
import pandas as pd
from scipy.spatial.distance import pdist

from src.config.defaults import ExperimentDefaults
from src.core.errors import InvalidArgumentError
from src.core.interfaces.analyzer import IAnalyzer
from src.core.models.data_models import Correlogram, FeatureMatrix, PointCloud


def default_bin_edges(
    spacing: float,
    bins: int = ExperimentDefaults.CORRELOGRAM_BINS,
    span: float = ExperimentDefaults.CORRELOGRAM_SPAN,
) -> np.ndarray:
    """bins bin seragam di [0, span * spacing]"""
    if not np.isfinite(spacing) or spacing <= 0:
        raise InvalidArgumentError(f"spacing harus > 0, didapat {spacing}")
    if bins < 1:
        raise InvalidArgumentError(f"bins harus >= 1, didapat {bins}")
    return np.linspace(0.0, span * spacing, bins + 1)


def _pearson(first: np.ndarray, second: np.ndarray) -> Optional[float]:
    x = np.concatenate([first, second])
    y = np.concatenate([second, first])
    if np.ptp(x) == 0.0:
        return None
    r = float(np.corrcoef(x, y)[0, 1])
    if not np.isfinite(r):
        return None
    return float(np.clip(r, -1.0, 1.0))


def correlogram(
    cloud: PointCloud,
    features: FeatureMatrix,
    bin_edges: np.ndarray,
    layer_depth: Optional[int] = None,
) -> Correlogram:
    if cloud.n < 2:
        raise InvalidArgumentError("correlogram membutuhkan >= 2 titik")
    if features.n != cloud.n:
        raise InvalidArgumentError(f"fitur berisi {features.n} titik, cloud {cloud.n}")
    edges = np.asarray(bin_edges, dtype=np.float64)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
        raise InvalidArgumentError("bin_edges harus naik tegas dengan >= 2 elemen")

    distances = pdist(cloud.positions)
    first, second = np.triu_indices(cloud.n, k=1)
    bins = np.searchsorted(edges, distances, side="right") - 1
    inside = (bins >= 0) & (bins < edges.size - 1)

    pair_counts = np.zeros(edges.size - 1, dtype=np.int64)
    r: List[Optional[float]] = []
    for b in range(edges.size - 1):
        selected = inside & (bins == b)
        count = int(np.count_nonzero(selected))
        pair_counts[b] = count
        if count < 2:
            r.append(None)
            continue
        r.append(
            _pearson(
                features.values[first[selected]].reshape(-1),
                features.values[second[selected]].reshape(-1),
            )
        )

    depth = features.layer_index if layer_depth is None else layer_depth
    return Correlogram(bin_edges=edges, pair_counts=pair_counts, r=tuple(r), layer_depth=depth)


def correlogram_to_frame(result: Correlogram) -> pd.DataFrame:
    """Skema CSV: layer,bin_lo,bin_hi,pairs,r (r kosong ditulis null)"""
    return pd.DataFrame(
        {
            "layer": np.full(result.bins, result.layer_depth, dtype=np.int64),
            "bin_lo": result.bin_edges[:-1],
            "bin_hi": result.bin_edges[1:],
            "pairs": result.pair_counts,
            "r": [np.nan if value is None else value for value in result.r],
        }
    )


class CorrelogramAnalyzer(IAnalyzer):
    """Rata-rata r atas repeat; hanya nilai terdefinisi yang dirata-ratakan"""

    def __init__(self, layer_depth: int):
        self.layer_depth = layer_depth
        self.results: List[Correlogram] = []

    def update(self, result: Correlogram) -> None:
        if self.results and not np.array_equal(result.bin_edges, self.results[0].bin_edges):
            raise InvalidArgumentError("bin_edges berbeda antar repeat")
        self.results.append(result)

    def analyze(self) -> Correlogram:
        if not self.results:
            raise InvalidArgumentError("belum ada correlogram")
        bins = self.results[0].bins
        r = []
        for b in range(bins):
            defined = [c.r[b] for c in self.results if c.r[b] is not None]
            r.append(float(np.mean(defined)) if defined else None)
        pair_counts = np.sum([c.pair_counts for c in self.results], axis=0)
        return Correlogram(self.results[0].bin_edges, pair_counts, tuple(r), self.layer_depth)
