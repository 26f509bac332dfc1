# src/config/__init__.py
from .defaults import InitDefaults, ExperimentDefaults, OPERATOR_PRESETS

__all__ = ["InitDefaults", "ExperimentDefaults", "OPERATOR_PRESETS"]
