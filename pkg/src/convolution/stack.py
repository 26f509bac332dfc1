# src/convolution/stack.py
import hashlib
import json
import logging
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy import sparse

from src.config.defaults import InitDefaults
from src.convolution.layer import basis_accumulation, basis_operator, conv_forward
from src.core.errors import InvalidArgumentError, VarInitError, with_layer
from src.core.models.data_models import ConvLayer, ConvStack, FeatureMatrix, NeighborhoodSet, PointCloud
from src.geometry.density import estimate_density
from src.geometry.neighbors import radius_neighbors
from src.geometry.sampling import build_levels

logger = logging.getLogger(__name__)

LevelKey = Tuple[int, int, float]


def operator_fingerprint(layer: ConvLayer) -> str:
    """Hash isi basis + estimator; layer dengan fingerprint sama berbagi operator"""
    payload = json.dumps(
        {"basis": layer.basis.to_dict(), "estimator": layer.estimator.to_dict()},
        sort_keys=True,
    )
    return hashlib.sha1(payload.encode("utf-8")).hexdigest()


class StackContext:
    """
    Level hierarchy satu cloud beserta cache neighbor, densitas dan operator.

    Neighbor di-cache per (level_in, level_out, radius), densitas per
    (level, bandwidth). Operator basis disimpan satu per (level_in,
    level_out, radius) bersama fingerprint-nya: layer berbasis tetap
    (gaussian, box, linear) memakai ulang operator yang sama di setiap
    kedalaman, basis acak per layer (mlp, dot) menggantinya.
    """

    def __init__(self, cloud: PointCloud, level_radii=(), level_seed: int = 0):
        self.levels: List[PointCloud] = build_levels(cloud, level_radii, level_seed)
        self._neighbors: Dict[LevelKey, NeighborhoodSet] = {}
        self._density: Dict[Tuple[int, float], np.ndarray] = {}
        self._operators: Dict[LevelKey, Tuple[str, sparse.csr_matrix]] = {}

    @classmethod
    def for_stack(cls, stack: ConvStack, cloud: PointCloud) -> "StackContext":
        return cls(cloud, stack.level_radii, stack.level_seed)

    def _level(self, index: int) -> PointCloud:
        if index >= len(self.levels):
            raise InvalidArgumentError(f"level {index} tidak tersedia ({len(self.levels)} level)")
        return self.levels[index]

    @staticmethod
    def _key(layer: ConvLayer) -> LevelKey:
        return (layer.level_in, layer.level_out, float(layer.radius))

    def neighbors(self, layer: ConvLayer) -> NeighborhoodSet:
        key = self._key(layer)
        if key not in self._neighbors:
            self._neighbors[key] = radius_neighbors(
                self._level(layer.level_out), self._level(layer.level_in), layer.radius
            )
        return self._neighbors[key]

    def density(self, layer: ConvLayer) -> Optional[np.ndarray]:
        if not layer.estimator.needs_density:
            return None
        cloud = self._level(layer.level_in)
        if cloud.density is not None:
            return cloud.density
        bandwidth = InitDefaults.kde_bandwidth(layer.radius)
        key = (layer.level_in, float(bandwidth))
        if key not in self._density:
            self._density[key] = estimate_density(cloud, bandwidth)
        return self._density[key]

    def operator(self, layer: ConvLayer) -> sparse.csr_matrix:
        key = self._key(layer)
        fingerprint = operator_fingerprint(layer)
        cached = self._operators.get(key)
        if cached is None or cached[0] != fingerprint:
            matrix = basis_operator(
                layer.basis,
                layer.estimator,
                self._level(layer.level_in),
                self._level(layer.level_out),
                self.neighbors(layer),
                density=self.density(layer),
            )
            self._operators[key] = (fingerprint, matrix)
            return matrix
        return cached[1]

    def forward(self, layer: ConvLayer, features: FeatureMatrix) -> FeatureMatrix:
        return conv_forward(
            layer,
            features,
            self._level(layer.level_in),
            self._level(layer.level_out),
            self.neighbors(layer),
            operator=self.operator(layer),
        )

    def accumulation(self, layer: ConvLayer, features: FeatureMatrix) -> np.ndarray:
        """Akumulasi per basis M x C x K untuk layer yang belum punya weights"""
        return basis_accumulation(
            layer.basis,
            layer.estimator,
            features,
            self._level(layer.level_in),
            self._level(layer.level_out),
            self.neighbors(layer),
            operator=self.operator(layer),
        )


def stack_forward(
    stack: ConvStack,
    cloud: PointCloud,
    features_in: FeatureMatrix,
    context: Optional[StackContext] = None,
) -> List[FeatureMatrix]:
    """
    Menjalankan seluruh layer secara berurutan.

    Returns:
        List aktivasi, elemen pertama adalah input itu sendiri
    """
    context = context or StackContext.for_stack(stack, cloud)
    activations = [features_in]
    for depth, layer in enumerate(stack.layers, start=1):
        try:
            activations.append(context.forward(layer, activations[-1]))
        except VarInitError as e:
            logger.error(f"stack_forward gagal di layer {depth}: {str(e)}")
            raise with_layer(e, depth) from e
    return activations
