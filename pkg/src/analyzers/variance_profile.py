# src/analyzers/variance_profile.py
from typing import List, Sequence

import numpy as np
import pandas as pd

from src.core.errors import InvalidArgumentError
from src.core.interfaces.analyzer import IAnalyzer
from src.core.models.data_models import FeatureMatrix, VarianceEntry, VarianceProfile


def _pooled_variance(matrices: Sequence[FeatureMatrix]) -> VarianceEntry:
    values = np.concatenate([m.values.reshape(-1) for m in matrices])
    if values.size < 2:
        raise InvalidArgumentError(f"butuh >= 2 sampel per layer, didapat {values.size}")
    return VarianceEntry(depth=matrices[0].layer_index, variance=float(np.var(values, ddof=1)), n=int(values.size))


def layer_variance_profile(activations: Sequence[Sequence[FeatureMatrix]]) -> VarianceProfile:
    """
    Variance sampel tak bias per layer, dipool atas titik, channel dan cloud.

    Args:
        activations: per cloud, list FeatureMatrix per layer (hasil stack_forward)
    """
    if not activations:
        raise InvalidArgumentError("activations kosong")
    layer_count = len(activations[0])
    if any(len(per_cloud) != layer_count for per_cloud in activations):
        raise InvalidArgumentError("jumlah layer berbeda antar cloud")
    entries = [_pooled_variance([per_cloud[l] for per_cloud in activations]) for l in range(layer_count)]
    return VarianceProfile(tuple(entries))


def profile_to_frame(profile: VarianceProfile) -> pd.DataFrame:
    """Skema CSV: layer,variance,n"""
    return pd.DataFrame(
        {
            "layer": [e.depth for e in profile.entries],
            "variance": [e.variance for e in profile.entries],
            "n": [e.n for e in profile.entries],
        }
    )


class VarianceProfileAnalyzer(IAnalyzer):
    """Mengumpulkan profil per seed dan merata-ratakan variance-nya"""

    def __init__(self):
        self.profiles: List[VarianceProfile] = []

    def update(self, profile: VarianceProfile) -> None:
        if self.profiles and profile.depths != self.profiles[0].depths:
            raise InvalidArgumentError("kedalaman profil berbeda antar repeat")
        self.profiles.append(profile)

    def analyze(self) -> VarianceProfile:
        if not self.profiles:
            raise InvalidArgumentError("belum ada profil")
        variances = np.mean([p.variances for p in self.profiles], axis=0)
        counts = np.sum([[e.n for e in p.entries] for p in self.profiles], axis=0)
        depths = self.profiles[0].depths
        return VarianceProfile(
            tuple(VarianceEntry(d, float(v), int(n)) for d, v, n in zip(depths, variances, counts))
        )

    def max_deviation(self, target: float) -> float:
        """Faktor deviasi terbesar max(v/target, target/v); inf bila ada variance nol"""
        variances = self.analyze().variances
        if np.any(variances <= 0):
            return float("inf")
        return float(np.max(np.maximum(variances / target, target / variances)))
