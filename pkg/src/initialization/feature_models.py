# src/initialization/feature_models.py
from typing import Any, Dict

import numpy as np

from src.core.errors import InvalidArgumentError
from src.core.models.data_models import FeatureMatrix
from src.utils.rng import make_rng, STREAM_FEATURES


class GaussianFeatureModel:
    """Fitur input i.i.d. Normal(0, variance) per titik dan channel"""

    def __init__(self, variance: float = 1.0):
        if not np.isfinite(variance) or variance <= 0:
            raise InvalidArgumentError(f"variance fitur harus > 0, didapat {variance}")
        self.variance = float(variance)

    def sample(self, n: int, channels: int, seed: int, *keys: int) -> FeatureMatrix:
        rng = make_rng(seed, STREAM_FEATURES, *keys)
        return FeatureMatrix(rng.standard_normal((n, channels)) * np.sqrt(self.variance))

    def describe(self) -> Dict[str, Any]:
        return {"kind": "gaussian", "variance": self.variance}


class ConstantFeatureModel:
    """Semua fitur bernilai sama (mis. 1.0 untuk input tanpa atribut)"""

    def __init__(self, value: float = 1.0):
        if not np.isfinite(value):
            raise InvalidArgumentError("nilai fitur konstan harus finite")
        self.value = float(value)

    def sample(self, n: int, channels: int, seed: int, *keys: int) -> FeatureMatrix:
        return FeatureMatrix(np.full((n, channels), self.value))

    def describe(self) -> Dict[str, Any]:
        return {"kind": "constant", "value": self.value}


def make_feature_model(spec: Dict[str, Any]):
    kind = spec.get("kind", "gaussian")
    if kind == "gaussian":
        return GaussianFeatureModel(float(spec.get("variance", 1.0)))
    if kind == "constant":
        return ConstantFeatureModel(float(spec.get("value", 1.0)))
    raise InvalidArgumentError(f"model fitur tidak dikenal: {kind}")
