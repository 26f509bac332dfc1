from abc import ABC, abstractmethod
from typing import Dict, Any, List

import pandas as pd

from src.core.models.data_models import ConvStack, ZTable, RunManifest, OutputRecord


class IStorage(ABC):
    """Interface untuk penyimpanan hasil eksperimen"""

    @abstractmethod
    def save_frame(self, frame: pd.DataFrame, name: str) -> str:
        """Menyimpan tabel sebagai CSV"""
        pass

    @abstractmethod
    def save_json(self, data: Dict[str, Any], name: str) -> str:
        """Menyimpan dokumen JSON"""
        pass

    @abstractmethod
    def save_ztable(self, table: ZTable, name: str = "ztable.json") -> str:
        """Menyimpan ZTable"""
        pass

    @abstractmethod
    def load_ztable(self, path: str) -> ZTable:
        """Memuat ZTable"""
        pass

    @abstractmethod
    def save_stack(self, stack: ConvStack, name: str = "stack.json") -> str:
        """Menyimpan arsitektur dan bobot"""
        pass

    @abstractmethod
    def output_records(self) -> List[OutputRecord]:
        """Daftar file output beserta checksum"""
        pass

    @abstractmethod
    def write_manifest(self, manifest: RunManifest) -> str:
        """Menulis manifest secara atomik"""
        pass
