# src/initialization/schemes.py
"""Skema inisialisasi berbasis fan-in: he, standard, channels_only"""
import logging
from typing import Optional, Tuple

import numpy as np

from src.convolution.stack import StackContext
from src.core.errors import InvalidArgumentError
from src.core.interfaces.generator import ICloudGenerator
from src.core.models.data_models import ConvLayer, ConvStack, InitPlan
from src.utils.rng import make_rng, derive_seed, STREAM_WEIGHTS, STREAM_CLOUD

logger = logging.getLogger(__name__)


def _check_positive(value: float, name: str) -> None:
    if not np.isfinite(value) or value < 1:
        raise InvalidArgumentError(f"{name} harus >= 1, didapat {value}")


def he_variance(kernel_size: float, channels: int) -> float:
    """2 / (N * C)"""
    _check_positive(kernel_size, "kernel_size")
    _check_positive(channels, "channels")
    return 2.0 / (kernel_size * channels)


def standard_variance(basis_count: int, channels: int) -> float:
    """2 / (B * C), B jumlah basis"""
    _check_positive(basis_count, "basis_count")
    _check_positive(channels, "channels")
    return 2.0 / (basis_count * channels)


def channel_variance(channels: int) -> float:
    """2 / C, mengabaikan basis dan neighborhood"""
    _check_positive(channels, "channels")
    return 2.0 / channels


def sample_weights(variance: float, shape: Tuple[int, int, int], seed: int, depth: int = 0) -> np.ndarray:
    """Weights i.i.d. Normal(0, variance); stream (seed, WEIGHTS, depth)"""
    if not np.isfinite(variance) or variance <= 0:
        raise InvalidArgumentError(f"variance weights harus > 0, didapat {variance}")
    rng = make_rng(seed, STREAM_WEIGHTS, depth)
    return rng.standard_normal(shape) * np.sqrt(variance)


def mean_neighbor_count(stack: ConvStack, layer: ConvLayer, generator: ICloudGenerator, seed: int) -> float:
    """Rata-rata |N(x)| layer pada satu cloud ber-seed (N untuk skema he)"""
    cloud = generator.generate(derive_seed(seed, STREAM_CLOUD, 0))
    context = StackContext.for_stack(stack, cloud)
    return float(np.mean(context.neighbors(layer).counts))


def _layer_variance(
    stack: ConvStack,
    layer: ConvLayer,
    plan: InitPlan,
    generator: Optional[ICloudGenerator],
) -> float:
    if plan.scheme == "standard":
        return standard_variance(layer.kernel_size, layer.in_channels)
    if plan.scheme == "channels_only":
        return channel_variance(layer.in_channels)
    if generator is None:
        raise InvalidArgumentError("skema he membutuhkan generator cloud untuk mengukur |N|")
    count = mean_neighbor_count(stack, layer, generator, plan.seed)
    if count < 1:
        raise InvalidArgumentError(f"neighborhood rata-rata kosong pada radius {layer.radius}")
    return he_variance(count, layer.in_channels)


def init_fan_in(stack: ConvStack, plan: InitPlan, generator: Optional[ICloudGenerator] = None) -> ConvStack:
    """Inisialisasi stack dengan skema he, standard atau channels_only"""
    if plan.scheme not in ("he", "standard", "channels_only"):
        raise InvalidArgumentError(f"skema {plan.scheme} bukan skema fan-in")
    for depth, layer in enumerate(stack.layers, start=1):
        variance = _layer_variance(stack, layer, plan, generator)
        shape = (layer.in_channels, layer.kernel_size, layer.out_channels)
        stack = stack.replace_layer(depth - 1, layer.with_weights(sample_weights(variance, shape, plan.seed, depth), variance))
        logger.debug(f"[{plan.scheme}] layer {depth}: Var[w]={variance:.6g}")
    return stack
