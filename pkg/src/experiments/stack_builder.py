# src/experiments/stack_builder.py
import logging
from typing import List, Optional

from src.config.defaults import ExperimentDefaults
from src.config.experiment import BasisConfig, StackConfig
from src.core.models.data_models import BasisSpec, ConvLayer, ConvStack
from src.estimators.integral import make_estimator
from src.kernels.basis import make_basis
from src.utils.rng import derive_seed, STREAM_BASIS, STREAM_DENSITY_MLP, STREAM_LEVELS

logger = logging.getLogger(__name__)


def default_bandwidth(family: str, radius: float, kernel_radius: float) -> Optional[float]:
    """gaussian: s = kernel_radius^2, linear: s = 0.4 r, family lain tanpa bandwidth"""
    if family == "gaussian":
        return kernel_radius * kernel_radius
    if family == "linear":
        return ExperimentDefaults.LINEAR_BANDWIDTH_RATIO * radius
    return None


def build_basis(config: BasisConfig, dim: int, radius: float, seed: int) -> BasisSpec:
    kernel_radius = config.kernel_radius or radius * ExperimentDefaults.KERNEL_RADIUS_RATIO
    bandwidth = config.bandwidth or default_bandwidth(config.family, radius, kernel_radius)
    return make_basis(
        config.family,
        dim,
        radius,
        config.size,
        seed=seed,
        layout=config.layout,
        kernel_radius=kernel_radius,
        bandwidth=bandwidth,
        hidden=config.hidden,
    )


def build_stack(config: StackConfig, seed: int = 0) -> ConvStack:
    """
    Stack tanpa weights dari konfigurasi.

    Layer level 0 memakai stack.radius. Setiap level Poisson k dimulai
    dengan layer transisi level k-1 -> k, sisanya k -> k, dengan receptive
    radius = faktor x radius Poisson level tersebut.
    """
    # (radius, level_in, level_out, out_channels)
    plan = []
    channels = config.channels
    for _ in range(config.depth):
        plan.append((config.radius, 0, 0, channels))
    for k, level in enumerate(config.levels, start=1):
        receptive = ExperimentDefaults.RECEPTIVE_FACTOR * level.radius
        channels = level.channels or channels
        for index in range(level.layers):
            plan.append((receptive, k - 1 if index == 0 else k, k, channels))

    layers: List[ConvLayer] = []
    in_channels = config.in_channels or config.channels
    for depth, (radius, level_in, level_out, out_channels) in enumerate(plan, start=1):
        basis = build_basis(config.basis, config.dim, radius, derive_seed(seed, STREAM_BASIS, depth))
        layers.append(
            ConvLayer(
                basis=basis,
                estimator=make_estimator(config.estimator, seed=derive_seed(seed, STREAM_DENSITY_MLP, depth)),
                radius=radius,
                in_channels=in_channels,
                out_channels=out_channels,
                nonlinearity=config.nonlinearity,
                level_in=level_in,
                level_out=level_out,
            )
        )
        in_channels = out_channels

    stack = ConvStack(
        layers=tuple(layers),
        level_radii=tuple(level.radius for level in config.levels),
        level_seed=derive_seed(seed, STREAM_LEVELS),
    )
    logger.debug(f"Stack dibangun: {stack.depth} layer, {len(stack.level_radii)} level Poisson")
    return stack
