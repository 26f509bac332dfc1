"""Continuous point convolution with variance-aware weight initialization."""

__version__ = "1.0.0"
