# src/initialization/variance_aware.py
"""
Inisialisasi variance-aware.

Untuk setiap layer l, z_l = E[Σ_c Σ_i c_{c,i}(x)^2] / C_in diestimasi dari
N cloud acak yang dilewatkan ke prefix yang sudah terinisialisasi, lalu
Var[w] = gain * Var[F] / (C_in * z_l). Perhitungan berjalan per layer
karena z_l bergantung pada weights layer sebelumnya.
"""
import logging
import warnings
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from src.config.defaults import InitDefaults
from src.convolution.layer import project
from src.convolution.stack import StackContext, stack_forward
from src.core.errors import DegenerateEstimateError, InvalidArgumentError, TransferWarning
from src.core.interfaces.generator import ICloudGenerator
from src.core.models.data_models import ConvLayer, ConvStack, FeatureMatrix, InitPlan, PointCloud, ZEntry, ZTable
from src.initialization.feature_models import GaussianFeatureModel
from src.initialization.schemes import sample_weights
from src.utils.rng import derive_seed, STREAM_CLOUD
from src.utils.ztable_validator import ZTableValidator

logger = logging.getLogger(__name__)


def weight_variance(gain: float, target_variance: float, in_channels: int, z: float) -> float:
    """Var[w] = gain * target / (C_in * z)"""
    return gain * target_variance / (in_channels * z)


def _squared_term(accumulated: np.ndarray) -> float:
    """Rata-rata Σ_c Σ_i c_{c,i}(x)^2 atas titik output"""
    return float(np.mean(np.sum(accumulated * accumulated, axis=(1, 2))))


def _accumulation_term(
    context: StackContext, layer: ConvLayer, features: FeatureMatrix
) -> Tuple[np.ndarray, Tuple[float, bool]]:
    nonempty = bool(np.any(context.neighbors(layer).counts > 0))
    accumulated = context.accumulation(layer, features)
    return accumulated, (_squared_term(accumulated), nonempty)


def _squared_accumulation(context: StackContext, layer: ConvLayer, features: FeatureMatrix) -> Tuple[float, bool]:
    """(rata-rata Σ_c Σ_i c_{c,i}(x)^2 atas titik output, ada neighborhood non-kosong)"""
    return _accumulation_term(context, layer, features)[1]


def _cloud_term(
    prefix: ConvStack,
    layer: ConvLayer,
    cloud: PointCloud,
    features: FeatureMatrix,
) -> Tuple[float, bool]:
    context = StackContext.for_stack(prefix, cloud)
    last = stack_forward(prefix, cloud, features, context)[-1]
    return _squared_accumulation(context, layer, last)


def _reduce_z(terms: Sequence[Tuple[float, bool]], layer: ConvLayer, depth: int) -> float:
    if not any(nonempty for _, nonempty in terms):
        raise DegenerateEstimateError(
            f"semua neighborhood kosong pada radius {layer.radius}", layer_index=depth
        )
    # urutan reduksi mengikuti urutan cloud
    z = float(np.mean([value for value, _ in terms])) / layer.in_channels
    if not np.isfinite(z) or z < InitDefaults.Z_THRESHOLD:
        raise DegenerateEstimateError(f"z_{depth} = {z:.3g} terlalu kecil", layer_index=depth)
    return z


def _input_channels(prefix: ConvStack, layer: ConvLayer) -> int:
    return prefix.layers[0].in_channels if prefix.layers else layer.in_channels


def estimate_z(
    stack_prefix: ConvStack,
    layer: ConvLayer,
    sample_clouds: Sequence[PointCloud],
    feature_model=None,
    seed: int = 0,
    n_jobs: int = 1,
) -> float:
    """
    Estimasi z untuk layer berikutnya setelah stack_prefix.

    Args:
        stack_prefix: layer 1..l-1 yang sudah memiliki weights
        layer: layer l (weights tidak dipakai)
        sample_clouds: cloud sampel, minimal satu
        feature_model: model fitur input (default Gaussian variance 1)
        seed: seed fitur; cloud k memakai stream (seed, FEATURES, l, k)
        n_jobs: jumlah worker joblib atas cloud

    Returns:
        z_l > 0
    """
    if not stack_prefix.is_initialized:
        raise InvalidArgumentError("prefix stack belum terinisialisasi")
    if not sample_clouds:
        raise InvalidArgumentError("sample_clouds kosong")
    feature_model = feature_model or GaussianFeatureModel()
    depth = stack_prefix.depth + 1
    channels = _input_channels(stack_prefix, layer)

    features = [feature_model.sample(cloud.n, channels, seed, depth, k) for k, cloud in enumerate(sample_clouds)]
    terms = Parallel(n_jobs=n_jobs)(
        delayed(_cloud_term)(stack_prefix, layer, cloud, feats)
        for cloud, feats in zip(sample_clouds, features)
    )
    return _reduce_z(terms, layer, depth)


def build_meta(
    stack: ConvStack,
    generator: ICloudGenerator,
    sample_count: int,
    plan: InitPlan,
    feature_model,
) -> Dict[str, Any]:
    """Metadata estimasi yang disimpan bersama ZTable"""
    layers = stack.layers
    return {
        "basis_family": sorted({layer.basis.family for layer in layers}),
        "estimator": sorted({layer.estimator.mode for layer in layers}),
        "nonlinearity": sorted({layer.nonlinearity for layer in layers}),
        "radius_schedule": [layer.radius for layer in layers],
        "level_radii": list(stack.level_radii),
        "channels": [layer.in_channels for layer in layers],
        "generator": generator.describe(),
        "feature_model": feature_model.describe(),
        "sample_count": int(sample_count),
        "seed": int(plan.seed),
        "target_variance": float(plan.target_variance),
        "resample_clouds": bool(plan.resample_clouds),
    }


def _draw_clouds(generator: ICloudGenerator, seed: int, depth: int, count: int) -> List[PointCloud]:
    return [generator.generate(derive_seed(seed, STREAM_CLOUD, depth, k)) for k in range(count)]


def _initialize_layer(stack: ConvStack, depth: int, z: float, plan: InitPlan) -> ConvStack:
    layer = stack.layers[depth - 1]
    variance = weight_variance(plan.gain_for(layer.nonlinearity), plan.target_variance, layer.in_channels, z)
    shape = (layer.in_channels, layer.kernel_size, layer.out_channels)
    weights = sample_weights(variance, shape, plan.seed, depth)
    logger.info(f"Layer {depth}: z={z:.6g}, Var[w]={variance:.6g}")
    return stack.replace_layer(depth - 1, layer.with_weights(weights, variance))


def _init_resampled(stack, generator, sample_count, plan, feature_model) -> Tuple[ConvStack, List[ZEntry]]:
    entries = []
    for depth in range(1, stack.depth + 1):
        clouds = _draw_clouds(generator, plan.seed, depth, sample_count)
        z = estimate_z(stack.prefix(depth - 1), stack.layers[depth - 1], clouds, feature_model, plan.seed, plan.n_jobs)
        entries.append(ZEntry(depth, z))
        stack = _initialize_layer(stack, depth, z, plan)
    return stack, entries


def _init_cached(stack, generator, sample_count, plan, feature_model) -> Tuple[ConvStack, List[ZEntry]]:
    """Cloud diambil sekali; aktivasinya dimajukan satu layer setiap iterasi"""
    clouds = _draw_clouds(generator, plan.seed, 0, sample_count)
    contexts = [StackContext.for_stack(stack, cloud) for cloud in clouds]
    channels = stack.layers[0].in_channels
    activations = [feature_model.sample(cloud.n, channels, plan.seed, 0, k) for k, cloud in enumerate(clouds)]
    # context dimutasi (cache), jadi worker berbagi memori lewat thread
    parallel = Parallel(n_jobs=plan.n_jobs, prefer="threads")

    entries = []
    for depth in range(1, stack.depth + 1):
        layer = stack.layers[depth - 1]
        results = parallel(delayed(_accumulation_term)(ctx, layer, feats) for ctx, feats in zip(contexts, activations))
        z = _reduce_z([term for _, term in results], layer, depth)
        entries.append(ZEntry(depth, z))
        stack = _initialize_layer(stack, depth, z, plan)
        layer = stack.layers[depth - 1]
        # akumulasi tidak bergantung pada weights, jadi dipakai ulang untuk forward
        activations = [project(layer, accumulated, depth) for accumulated, _ in results]
    return stack, entries


def variance_aware_init(
    stack: ConvStack,
    cloud_generator: ICloudGenerator,
    sample_count: int = InitDefaults.SAMPLE_COUNT,
    plan: Optional[InitPlan] = None,
    feature_model=None,
) -> Tuple[ConvStack, ZTable]:
    """
    Inisialisasi variance-aware mode direct, layer demi layer.

    Returns:
        Tuple (stack terinisialisasi, ZTable lengkap)
    """
    plan = plan or InitPlan("variance_aware_direct")
    if plan.scheme != "variance_aware_direct":
        raise InvalidArgumentError(f"variance_aware_init membutuhkan skema variance_aware_direct, didapat {plan.scheme}")
    if sample_count < 1:
        raise InvalidArgumentError(f"sample_count harus >= 1, didapat {sample_count}")
    if stack.depth == 0:
        raise InvalidArgumentError("stack tidak memiliki layer")
    feature_model = feature_model or GaussianFeatureModel()

    logger.info(
        f"Inisialisasi variance-aware: {stack.depth} layer, {sample_count} cloud, "
        f"resample={plan.resample_clouds}"
    )
    init = _init_resampled if plan.resample_clouds else _init_cached
    try:
        stack, entries = init(stack, cloud_generator, sample_count, plan, feature_model)
    except DegenerateEstimateError as e:
        logger.error(f"Estimasi z gagal di layer {e.layer_index}: {str(e)}")
        raise

    table = ZTable(tuple(entries), build_meta(stack, cloud_generator, sample_count, plan, feature_model))
    return stack, table


def _transfer_warning(message: str) -> None:
    logger.warning(message)
    warnings.warn(message, TransferWarning, stacklevel=3)


def transfer_init(stack: ConvStack, table: ZTable, plan: Optional[InitPlan] = None) -> ConvStack:
    """
    Inisialisasi dari tabel z yang sudah dihitung.

    Kedalaman yang tidak ada di tabel memakai kedalaman lebih rendah
    terdekat. Untuk l >= 2, z diskalakan dengan target plan / target tabel
    karena prefix menghasilkan fitur dengan variance target yang baru.
    """
    plan = plan or InitPlan("variance_aware_transfer")
    if not table.entries:
        raise InvalidArgumentError("ZTable kosong")

    is_valid, message, _ = ZTableValidator(table).validate_stack(stack)
    if not is_valid:
        _transfer_warning(message)

    table_target = float(table.meta.get("target_variance", plan.target_variance))
    for depth in range(1, stack.depth + 1):
        z, used_depth = table.lookup(depth)
        if used_depth != depth:
            _transfer_warning(f"ZTable tidak memiliki kedalaman {depth}, memakai kedalaman {used_depth}")
        if depth >= 2:
            z = z * (plan.target_variance / table_target)
        stack = _initialize_layer(stack, depth, z, plan)
    return stack
