from abc import ABC, abstractmethod
from typing import Any


class IAnalyzer(ABC):
    """Interface untuk analisis statistik aktivasi"""
    @abstractmethod
    def update(self, *args: Any) -> None:
        """Menambahkan hasil satu repeat (satu seed)"""
        pass

    @abstractmethod
    def analyze(self) -> Any:
        """Menghitung hasil akhir dari semua repeat"""
        pass
