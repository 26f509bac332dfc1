# src/geometry/neighbors.py
"""
Pencarian neighbor radius dengan spatial hash grid uniform.

Ukuran sel sama dengan radius, jadi neighbor bola tertutup (jarak <= r)
selalu berada di sel query atau salah satu dari 3^d sel tetangganya.
Support diurutkan per key sel; setiap offset sel menghasilkan kandidat
pasangan secara vektor, lalu difilter dengan jarak dan diurutkan
(query, index support) supaya hasilnya deterministik.
"""
import itertools

import numpy as np

from src.core.errors import InvalidArgumentError
from src.core.models.data_models import PointCloud, NeighborhoodSet

_MAX_CELLS = 2 ** 62


def _expand_ranges(starts: np.ndarray, ends: np.ndarray):
    """Mengembalikan (owner, position) untuk setiap elemen di range [start, end)"""
    counts = ends - starts
    total = int(counts.sum())
    owner = np.repeat(np.arange(starts.shape[0], dtype=np.int64), counts)
    if total == 0:
        return owner, np.zeros(0, dtype=np.int64)
    offsets = np.cumsum(counts) - counts
    position = np.arange(total, dtype=np.int64) - np.repeat(offsets, counts) + np.repeat(starts, counts)
    return owner, position


def radius_neighbors(queries: PointCloud, support: PointCloud, radius: float) -> NeighborhoodSet:
    """Neighbor bola tertutup untuk setiap titik query, urut index support"""
    if queries.dim != support.dim:
        raise InvalidArgumentError(f"dimensi query ({queries.dim}) dan support ({support.dim}) berbeda")
    if not np.isfinite(radius) or radius <= 0:
        raise InvalidArgumentError(f"radius harus > 0, didapat {radius}")

    q_pos = queries.positions
    s_pos = support.positions
    origin = np.minimum(q_pos.min(axis=0), s_pos.min(axis=0))

    # +1 memberi ruang untuk offset sel -1
    q_cells = np.floor((q_pos - origin) / radius).astype(np.int64) + 1
    s_cells = np.floor((s_pos - origin) / radius).astype(np.int64) + 1
    shape = np.maximum(q_cells.max(axis=0), s_cells.max(axis=0)) + 2
    if float(np.prod(shape.astype(np.float64))) >= _MAX_CELLS:
        raise InvalidArgumentError(f"radius {radius} terlalu kecil untuk extent cloud")
    shape = tuple(int(s) for s in shape)

    s_keys = np.ravel_multi_index(tuple(s_cells.T), shape)
    order = np.argsort(s_keys, kind="stable")
    sorted_keys = s_keys[order]

    query_parts = []
    support_parts = []
    for offset in itertools.product((-1, 0, 1), repeat=queries.dim):
        cells = q_cells + np.array(offset, dtype=np.int64)
        keys = np.ravel_multi_index(tuple(cells.T), shape)
        starts = np.searchsorted(sorted_keys, keys, side="left")
        ends = np.searchsorted(sorted_keys, keys, side="right")
        owner, position = _expand_ranges(starts, ends)
        if owner.size == 0:
            continue
        candidates = order[position]
        diff = s_pos[candidates] - q_pos[owner]
        distance = np.sqrt(np.sum(diff * diff, axis=1))
        keep = distance <= radius
        query_parts.append(owner[keep])
        support_parts.append(candidates[keep])

    if query_parts:
        query_ids = np.concatenate(query_parts)
        support_ids = np.concatenate(support_parts)
    else:
        query_ids = np.zeros(0, dtype=np.int64)
        support_ids = np.zeros(0, dtype=np.int64)

    pair_order = np.lexsort((support_ids, query_ids))
    query_ids = query_ids[pair_order]
    support_ids = support_ids[pair_order]
    indptr = np.zeros(queries.n + 1, dtype=np.int64)
    np.cumsum(np.bincount(query_ids, minlength=queries.n), out=indptr[1:])

    return NeighborhoodSet(
        query_count=queries.n,
        support_count=support.n,
        radius=float(radius),
        indptr=indptr,
        indices=support_ids,
    )
