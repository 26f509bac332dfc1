from .feature_models import GaussianFeatureModel, ConstantFeatureModel, make_feature_model
from .schemes import (
    he_variance,
    standard_variance,
    channel_variance,
    sample_weights,
    mean_neighbor_count,
    init_fan_in,
)
from .variance_aware import estimate_z, variance_aware_init, transfer_init, weight_variance, build_meta

__all__ = [
    "GaussianFeatureModel",
    "ConstantFeatureModel",
    "make_feature_model",
    "he_variance",
    "standard_variance",
    "channel_variance",
    "sample_weights",
    "mean_neighbor_count",
    "init_fan_in",
    "estimate_z",
    "variance_aware_init",
    "transfer_init",
    "weight_variance",
    "build_meta",
]
