# src/core/errors.py
from typing import Optional


class VarInitError(Exception):
    """Base error untuk seluruh paket"""

    def __init__(self, message: str, layer_index: Optional[int] = None):
        self.layer_index = layer_index
        super().__init__(message)


class InvalidArgumentError(VarInitError, ValueError):
    """Argumen tidak valid (dimensi, radius, channel, skema file)"""


class ConfigValidationError(InvalidArgumentError):
    """Konfigurasi eksperimen tidak valid"""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class NumericOverflowError(VarInitError, ArithmeticError):
    """Hasil layer tidak finite"""


class DegenerateEstimateError(VarInitError, ArithmeticError):
    """Estimasi z_l tidak bisa dipakai"""


class TransferWarning(UserWarning):
    """Fallback kedalaman atau mismatch meta saat transfer tabel z"""


def with_layer(error: VarInitError, layer_index: int) -> VarInitError:
    """Membuat ulang error dengan kelas yang sama dan index layer terlampir"""
    if error.layer_index is not None or isinstance(error, ConfigValidationError):
        return error
    return type(error)(f"layer {layer_index}: {error}", layer_index=layer_index)
