from .variance_profile import layer_variance_profile, profile_to_frame, VarianceProfileAnalyzer
from .correlogram import correlogram, correlogram_to_frame, default_bin_edges, CorrelogramAnalyzer

__all__ = [
    "layer_variance_profile",
    "profile_to_frame",
    "VarianceProfileAnalyzer",
    "correlogram",
    "correlogram_to_frame",
    "default_bin_edges",
    "CorrelogramAnalyzer",
]
