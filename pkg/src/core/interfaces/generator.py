from abc import ABC, abstractmethod
from typing import Dict, Any

from src.core.models.data_models import PointCloud


class ICloudGenerator(ABC):
    """Interface untuk generator point cloud ber-seed"""
    @abstractmethod
    def generate(self, seed: int) -> PointCloud:
        """Membuat satu point cloud secara deterministik dari seed"""
        pass

    @abstractmethod
    def describe(self) -> Dict[str, Any]:
        """Deskripsi generator untuk metadata ZTable dan manifest"""
        pass
