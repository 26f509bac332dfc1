# src/storage/file_storage.py
import os
import json
import hashlib
import logging
from datetime import datetime
from typing import Dict, Any, List, Optional, Sequence

import numpy as np
import pandas as pd

from src.core.errors import InvalidArgumentError
from src.core.interfaces.storage import IStorage
from src.core.models.data_models import (
    ConvStack,
    FeatureMatrix,
    OutputRecord,
    PointCloud,
    RunManifest,
    ZTable,
)

AXES = ("x", "y", "z")
CSV_FLOAT_FORMAT = "%.17g"
CSV_NULL = "null"


class FileStorage(IStorage):
    def __init__(self, base_path: str = "output"):
        """
        Inisialisasi dengan path yang absolut
        """
        self.base_path = os.path.abspath(base_path)
        self.logs_path = os.path.join(self.base_path, "logs")
        self._outputs: List[str] = []

        self._create_directories()
        self._setup_storage_logging()

    def _create_directories(self):
        for directory in (self.base_path, self.logs_path):
            os.makedirs(directory, exist_ok=True)

    def _setup_storage_logging(self):
        """Setup logging khusus untuk storage"""
        log_file = os.path.join(self.logs_path, f'storage_{datetime.now().strftime("%Y%m%d")}.log')

        self.logger = logging.getLogger('storage')
        self.logger.setLevel(logging.INFO)
        # satu handler per file log, walaupun FileStorage dibuat berulang
        if not any(getattr(h, "baseFilename", None) == log_file for h in self.logger.handlers):
            file_handler = logging.FileHandler(log_file)
            file_handler.setFormatter(logging.Formatter('%(asctime)s - %(levelname)s - %(message)s'))
            self.logger.addHandler(file_handler)

        self.logger.info(f"Storage initialized at {self.base_path}")

    def path(self, name: str) -> str:
        return os.path.join(self.base_path, name)

    def record(self, full_path: str) -> str:
        if full_path not in self._outputs:
            self._outputs.append(full_path)
        return full_path

    def _prepare_for_save(self, data: Any) -> Any:
        """
        Mempersiapkan data untuk disimpan ke JSON.
        """
        if isinstance(data, dict):
            return {str(k): self._prepare_for_save(v) for k, v in data.items()}
        elif isinstance(data, (list, tuple)):
            return [self._prepare_for_save(item) for item in data]
        elif isinstance(data, np.ndarray):
            return self._prepare_for_save(data.tolist())
        elif isinstance(data, np.integer):
            return int(data)
        elif isinstance(data, np.floating):
            return float(data)
        elif isinstance(data, datetime):
            return data.isoformat()
        else:
            return data

    def save_frame(self, frame: pd.DataFrame, name: str) -> str:
        """Menyimpan tabel sebagai CSV dengan float presisi penuh"""
        full_path = self.path(name)
        try:
            frame.to_csv(
                full_path,
                index=False,
                float_format=CSV_FLOAT_FORMAT,
                na_rep=CSV_NULL,
                lineterminator="\n",
            )
            self.logger.info(f"CSV saved to {full_path}")
            return self.record(full_path)
        except Exception as e:
            self.logger.error(f"Failed to save CSV {name}: {str(e)}")
            raise

    def load_frame(self, path: str, columns: Optional[Sequence[str]] = None) -> pd.DataFrame:
        """Memuat CSV; bila columns diberikan, header harus sama persis"""
        try:
            frame = pd.read_csv(path, na_values=[CSV_NULL], keep_default_na=False, float_precision="round_trip")
        except (OSError, ValueError) as e:
            self.logger.error(f"Failed to read CSV {path}: {str(e)}")
            raise InvalidArgumentError(f"gagal membaca CSV {path}: {str(e)}")
        if columns is not None and list(frame.columns) != list(columns):
            raise InvalidArgumentError(
                f"kolom CSV {path} tidak sesuai: diharapkan {list(columns)}, didapat {list(frame.columns)}"
            )
        return frame

    def save_text(self, text: str, name: str) -> str:
        full_path = self.path(name)
        with open(full_path, "w", newline="\n") as f:
            f.write(text)
        self.logger.info(f"Text saved to {full_path}")
        return self.record(full_path)

    def save_json(self, data: Dict[str, Any], name: str) -> str:
        full_path = self.path(name)
        try:
            with open(full_path, 'w') as f:
                json.dump(self._prepare_for_save(data), f, indent=2, sort_keys=True)
                f.write("\n")
            self.logger.info(f"JSON saved to {full_path}")
            return self.record(full_path)
        except Exception as e:
            self.logger.error(f"Failed to save JSON {name}: {str(e)}")
            raise

    def load_json(self, path: str) -> Dict[str, Any]:
        try:
            with open(path, 'r') as f:
                data = json.load(f)
        except (OSError, ValueError) as e:
            self.logger.error(f"Failed to load JSON {path}: {str(e)}")
            raise InvalidArgumentError(f"gagal membaca JSON {path}: {str(e)}")
        if not isinstance(data, dict):
            raise InvalidArgumentError(f"{path} harus berisi object JSON")
        return data

    def save_ztable(self, table: ZTable, name: str = "ztable.json") -> str:
        return self.save_json(table.to_dict(), name)

    def load_ztable(self, path: str) -> ZTable:
        table = ZTable.from_dict(self.load_json(path))
        self.logger.info(f"ZTable loaded from {path} ({len(table.entries)} entries)")
        return table

    def save_stack(self, stack: ConvStack, name: str = "stack.json") -> str:
        return self.save_json(stack.to_dict(), name)

    def load_stack(self, path: str) -> ConvStack:
        return ConvStack.from_dict(self.load_json(path))

    def save_point_cloud(self, cloud: PointCloud, name: str) -> str:
        """CSV kolom x[,y[,z]][,density]"""
        frame = pd.DataFrame(cloud.positions, columns=list(AXES[: cloud.dim]))
        if cloud.density is not None:
            frame["density"] = cloud.density
        return self.save_frame(frame, name)

    def load_point_cloud(self, path: str) -> PointCloud:
        frame = self.load_frame(path)
        axes = [c for c in AXES if c in frame.columns]
        expected = list(AXES[: len(axes)]) + (["density"] if "density" in frame.columns else [])
        if not axes or list(frame.columns) != expected:
            raise InvalidArgumentError(f"kolom point cloud tidak valid: {list(frame.columns)}")
        density = frame["density"].to_numpy(dtype=np.float64) if "density" in frame.columns else None
        return PointCloud(frame[axes].to_numpy(dtype=np.float64), density)

    def save_features(self, features: FeatureMatrix, name: str) -> str:
        """CSV panjang point_index,channel,value"""
        n, channels = features.values.shape
        frame = pd.DataFrame(
            {
                "point_index": np.repeat(np.arange(n), channels),
                "channel": np.tile(np.arange(channels), n),
                "value": features.values.reshape(-1),
            }
        )
        return self.save_frame(frame, name)

    def load_features(self, path: str, layer_index: int = 0) -> FeatureMatrix:
        frame = self.load_frame(path, ["point_index", "channel", "value"])
        n = int(frame["point_index"].max()) + 1 if len(frame) else 0
        channels = int(frame["channel"].max()) + 1 if len(frame) else 0
        if len(frame) != n * channels:
            raise InvalidArgumentError("CSV fitur tidak lengkap")
        values = np.zeros((n, channels))
        values[frame["point_index"].to_numpy(), frame["channel"].to_numpy()] = frame["value"].to_numpy()
        return FeatureMatrix(values, layer_index=layer_index)

    def output_records(self) -> List[OutputRecord]:
        records = []
        for full_path in self._outputs:
            with open(full_path, "rb") as f:
                content = f.read()
            records.append(
                OutputRecord(
                    path=os.path.relpath(full_path, self.base_path),
                    sha256=hashlib.sha256(content).hexdigest(),
                    bytes=len(content),
                )
            )
        return records

    def write_manifest(self, manifest: RunManifest, name: str = "manifest.json") -> str:
        """Menulis manifest ke file sementara lalu os.replace"""
        full_path = self.path(name)
        tmp_path = full_path + ".tmp"
        try:
            with open(tmp_path, 'w') as f:
                json.dump(self._prepare_for_save(manifest.to_dict()), f, indent=2, sort_keys=True)
                f.write("\n")
            os.replace(tmp_path, full_path)
            self.logger.info(f"Manifest written to {full_path}")
            return full_path
        except Exception as e:
            self.logger.error(f"Failed to write manifest: {str(e)}")
            if os.path.exists(tmp_path):
                os.remove(tmp_path)
            raise
