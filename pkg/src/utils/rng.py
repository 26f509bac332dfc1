# src/utils/rng.py
"""
Generator acak deterministik untuk seluruh paket.

Semua operasi stokastik menerima seed eksplisit. Stream dipisah per
kegunaan dengan SeedSequence([seed, stream, *keys]) di atas PCG64, jadi
menambah draw di satu stream tidak menggeser stream lain. Variat Gaussian
memakai standard_normal (ziggurat) dari numpy.Generator.
"""
from typing import Sequence

import numpy as np

from src.core.errors import InvalidArgumentError

# Stream id
STREAM_CLOUD = 1
STREAM_FEATURES = 2
STREAM_WEIGHTS = 3
STREAM_BASIS = 4
STREAM_DENSITY_MLP = 5
STREAM_POISSON = 6
STREAM_LEVELS = 7
STREAM_EVAL = 8
STREAM_IMAGES = 9


def _check_key(value: int, name: str) -> int:
    if isinstance(value, (bool, np.bool_)) or not isinstance(value, (int, np.integer)):
        raise InvalidArgumentError(f"{name} harus integer, didapat {value!r}")
    if value < 0:
        raise InvalidArgumentError(f"{name} harus >= 0, didapat {value}")
    return int(value)


def make_rng(seed: int, *keys: int) -> np.random.Generator:
    """Membuat Generator PCG64 dari seed dan key stream"""
    entropy = [_check_key(seed, "seed")]
    entropy.extend(_check_key(k, "key") for k in keys)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def derive_seed(seed: int, *keys: int) -> int:
    """Menurunkan seed integer baru (63 bit) dari seed dan key"""
    rng = make_rng(seed, *keys)
    return int(rng.integers(0, 2**63 - 1))


def seed_list(seed: int, repeats: int) -> Sequence[int]:
    """Seed berurutan untuk eksperimen berulang"""
    return [int(seed) + k for k in range(int(repeats))]
