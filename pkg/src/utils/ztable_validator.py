# src/utils/ztable_validator.py
import json
import logging
from typing import Any, Dict, List, Optional, Tuple

from src.core.errors import VarInitError
from src.core.models.data_models import ConvStack, ZTable


class ZTableValidator:
    """
    Memvalidasi tabel z sebelum dipakai pada mode transfer.

    Mismatch meta (family basis, estimator, nonlinearity, cakupan kedalaman)
    tidak fatal: pemanggil memutuskan apakah cukup diberi warning.
    """

    def __init__(self, table: ZTable):
        self.logger = logging.getLogger(__name__)
        self.table = table

    @classmethod
    def load_and_validate(cls, path: str) -> Tuple[bool, str, Optional[ZTable]]:
        """Memuat dokumen ZTable; mengembalikan (is_valid, message, table)"""
        try:
            with open(path, "r") as f:
                data = json.load(f)
        except (OSError, ValueError) as e:
            return False, f"Gagal membaca ZTable: {str(e)}", None

        if not isinstance(data, dict):
            return False, "Format ZTable tidak valid: diharapkan object JSON", None
        try:
            table = ZTable.from_dict(data)
        except (VarInitError, KeyError, TypeError, ValueError) as e:
            return False, f"ZTable tidak valid: {str(e)}", None
        if not table.entries:
            return False, "ZTable tidak memiliki entry", None
        return True, "ZTable valid", table

    def _stack_meta(self, stack: ConvStack) -> Dict[str, Any]:
        layers = stack.layers
        return {
            "basis_family": sorted({layer.basis.family for layer in layers}),
            "estimator": sorted({layer.estimator.mode for layer in layers}),
            "nonlinearity": sorted({layer.nonlinearity for layer in layers}),
        }

    def validate_stack(self, stack: ConvStack) -> Tuple[bool, str, List[str]]:
        """
        Membandingkan meta tabel dengan stack.

        Returns:
            Tuple (is_valid, message, daftar field yang tidak cocok)
        """
        mismatches = []
        meta = self.table.meta
        for key, expected in self._stack_meta(stack).items():
            recorded = meta.get(key)
            if recorded is None:
                continue
            recorded = sorted(recorded) if isinstance(recorded, list) else [recorded]
            if recorded != expected:
                mismatches.append(key)
        if stack.depth > self.table.depth:
            mismatches.append("depth")

        if mismatches:
            message = f"Meta ZTable tidak cocok dengan stack: {', '.join(mismatches)}"
            return False, message, mismatches
        return True, "Meta ZTable cocok dengan stack", mismatches
