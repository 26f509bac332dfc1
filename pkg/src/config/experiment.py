# src/config/experiment.py
"""
Konfigurasi eksperimen dari satu dokumen JSON.

Setiap bagian dokumen dipetakan ke dataclass; semua validasi melempar
ConfigValidationError dengan path field bertitik (mis. 'stack.radius').
"""
import json
import os
from dataclasses import dataclass, field, asdict
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from src.config.defaults import ExperimentDefaults, InitDefaults, OPERATOR_PRESETS
from src.core.errors import ConfigValidationError
from src.core.models.data_models import BASIS_FAMILIES, ESTIMATOR_MODES, INIT_SCHEMES, NONLINEARITIES

EXPERIMENTS = ("variance_profile", "correlogram", "compute_ztable", "transfer_check", "discrete_equivalence")
LAYOUTS = ("sphere", "grid", "spherical")
GENERATOR_KINDS = ("uniform", "clustered", "sphere", "grid")
DENSITY_MODES = ("kde", "exact")
FEATURE_KINDS = ("gaussian", "constant")


def _section(data: Dict[str, Any], key: str, prefix: str = "") -> Dict[str, Any]:
    value = data.get(key, {})
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigValidationError(prefix + key, "harus berupa object")
    return value


def _positive(value: Any, name: str) -> float:
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise ConfigValidationError(name, f"harus berupa angka, didapat {value!r}")
    if not np.isfinite(number) or number <= 0:
        raise ConfigValidationError(name, f"harus > 0, didapat {value!r}")
    return number


def _optional_positive(value: Any, name: str) -> Optional[float]:
    return None if value is None else _positive(value, name)


def _count(value: Any, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise ConfigValidationError(name, f"harus berupa integer, didapat {value!r}")
    if value < minimum:
        raise ConfigValidationError(name, f"harus >= {minimum}, didapat {value}")
    return int(value)


def _choice(value: Any, options: Tuple[str, ...], name: str) -> str:
    if value not in options:
        raise ConfigValidationError(name, f"harus salah satu dari {list(options)}, didapat {value!r}")
    return value


def _feature_model(data: Dict[str, Any], name: str) -> Dict[str, Any]:
    kind = _choice(data.get("kind", "gaussian"), FEATURE_KINDS, f"{name}.kind")
    if kind == "gaussian":
        return {"kind": kind, "variance": _positive(data.get("variance", 1.0), f"{name}.variance")}
    value = data.get("value", 1.0)
    if not isinstance(value, (int, float)) or not np.isfinite(value):
        raise ConfigValidationError(f"{name}.value", "harus berupa angka finite")
    return {"kind": kind, "value": float(value)}


def _fraction(value: Any, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not 0.0 <= value <= 1.0:
        raise ConfigValidationError(name, f"harus angka di [0, 1], didapat {value!r}")
    return float(value)


def _generator(data: Dict[str, Any], name: str, dim: int) -> Dict[str, Any]:
    kind = _choice(data.get("kind", "uniform"), GENERATOR_KINDS, f"{name}.kind")
    spec: Dict[str, Any] = {"kind": kind, "dim": _count(data.get("dim", dim), f"{name}.dim")}
    if spec["dim"] not in (1, 2, 3):
        raise ConfigValidationError(f"{name}.dim", "harus 1, 2 atau 3")
    if kind == "grid":
        spec["per_axis"] = _count(data.get("per_axis", 10), f"{name}.per_axis")
        spec["spacing"] = _positive(data.get("spacing", 1.0), f"{name}.spacing")
        return spec
    spec["n"] = _count(data.get("n", ExperimentDefaults.POINTS), f"{name}.n")
    if kind == "sphere":
        if spec["dim"] != 3:
            raise ConfigValidationError(f"{name}.dim", "generator sphere hanya untuk dim 3")
        center = data.get("center", [0.5, 0.5, 0.5])
        numeric = isinstance(center, list) and all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in center)
        if not numeric or len(center) != 3 or not np.all(np.isfinite(center)):
            raise ConfigValidationError(f"{name}.center", f"harus 3 koordinat finite, didapat {center!r}")
        spec["center"] = [float(c) for c in center]
        spec["radius"] = _positive(data.get("radius", 0.5), f"{name}.radius")
        spec["cluster_count"] = _count(data.get("cluster_count", 0), f"{name}.cluster_count", 0)
        spec["spread"] = _positive(data.get("spread", 0.1), f"{name}.spread")
        background = _fraction(data.get("background", 0.0), f"{name}.background")
        spec["background"] = background
        if spec["cluster_count"] > spec["n"] * (1.0 - background):
            raise ConfigValidationError(f"{name}.n", "terlalu kecil untuk cluster_count")
    else:
        extent = data.get("extent", [0.0, 1.0])
        bounds = np.array(extent, dtype=np.float64) if isinstance(extent, list) else np.zeros(0)
        if bounds.shape not in ((2,), (spec["dim"], 2)) or np.any(bounds[..., 1] <= bounds[..., 0]):
            raise ConfigValidationError(f"{name}.extent", f"harus [lo, hi] dengan hi > lo, didapat {extent!r}")
        spec["extent"] = extent
    if kind == "clustered":
        spec["cluster_count"] = _count(data.get("cluster_count", 8), f"{name}.cluster_count")
        spec["spread"] = _positive(data.get("spread", 0.05), f"{name}.spread")
        if spec["n"] < spec["cluster_count"]:
            raise ConfigValidationError(f"{name}.n", "harus >= cluster_count")
    spec["density"] = _choice(data.get("density", "kde"), DENSITY_MODES, f"{name}.density")
    return spec


@dataclass
class BasisConfig:
    family: str = "gaussian"
    size: int = ExperimentDefaults.KERNEL_SIZE
    layout: str = "sphere"
    kernel_radius: Optional[float] = None
    bandwidth: Optional[float] = None
    hidden: int = InitDefaults.MLP_HIDDEN

    @classmethod
    def from_dict(cls, data: Dict[str, Any], name: str = "stack.basis") -> "BasisConfig":
        config = cls(
            family=_choice(data.get("family", cls.family), BASIS_FAMILIES, f"{name}.family"),
            size=_count(data.get("size", cls.size), f"{name}.size"),
            layout=_choice(data.get("layout", cls.layout), LAYOUTS, f"{name}.layout"),
            kernel_radius=_optional_positive(data.get("kernel_radius"), f"{name}.kernel_radius"),
            bandwidth=_optional_positive(data.get("bandwidth"), f"{name}.bandwidth"),
            hidden=_count(data.get("hidden", cls.hidden), f"{name}.hidden"),
        )
        if config.layout == "spherical" and config.family != "box":
            raise ConfigValidationError(f"{name}.layout", "layout spherical hanya untuk family box")
        return config


@dataclass
class LevelConfig:
    """Satu level Poisson-disk; receptive radius = faktor x radius level"""
    radius: float
    layers: int = 1
    channels: Optional[int] = None

    @classmethod
    def from_dict(cls, data: Dict[str, Any], name: str) -> "LevelConfig":
        channels = data.get("channels")
        return cls(
            radius=_positive(data.get("radius"), f"{name}.radius"),
            layers=_count(data.get("layers", 1), f"{name}.layers"),
            channels=None if channels is None else _count(channels, f"{name}.channels"),
        )


@dataclass
class StackConfig:
    dim: int = 3
    depth: int = ExperimentDefaults.DEPTH
    channels: int = ExperimentDefaults.CHANNELS
    in_channels: Optional[int] = None
    radius: float = ExperimentDefaults.RADIUS
    estimator: str = "mc"
    nonlinearity: str = "none"
    preset: Optional[str] = None
    basis: BasisConfig = field(default_factory=BasisConfig)
    levels: List[LevelConfig] = field(default_factory=list)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "StackConfig":
        basis_data = dict(_section(data, "basis", "stack."))
        estimator = data.get("estimator", cls.estimator)
        preset = data.get("preset")
        if preset is not None:
            preset_spec = OPERATOR_PRESETS.get(preset)
            if preset_spec is None:
                raise ConfigValidationError("stack.preset", f"harus salah satu dari {sorted(OPERATOR_PRESETS)}")
            basis_data.setdefault("family", preset_spec["family"])
            if preset_spec["layout"] is not None:
                basis_data.setdefault("layout", preset_spec["layout"])
            estimator = data.get("estimator", preset_spec["estimator"])

        levels_data = data.get("levels", [])
        if not isinstance(levels_data, list):
            raise ConfigValidationError("stack.levels", "harus berupa list")
        depth_minimum = 0 if levels_data else 1
        in_channels = data.get("in_channels")
        config = cls(
            dim=_count(data.get("dim", cls.dim), "stack.dim"),
            depth=_count(data.get("depth", cls.depth), "stack.depth", depth_minimum),
            channels=_count(data.get("channels", cls.channels), "stack.channels"),
            in_channels=None if in_channels is None else _count(in_channels, "stack.in_channels"),
            radius=_positive(data.get("radius", cls.radius), "stack.radius"),
            estimator=_choice(estimator, ESTIMATOR_MODES, "stack.estimator"),
            nonlinearity=_choice(data.get("nonlinearity", cls.nonlinearity), NONLINEARITIES, "stack.nonlinearity"),
            preset=preset,
            basis=BasisConfig.from_dict(basis_data),
            levels=[LevelConfig.from_dict(item, f"stack.levels[{k}]") for k, item in enumerate(levels_data)],
        )
        if config.dim not in (1, 2, 3):
            raise ConfigValidationError("stack.dim", "harus 1, 2 atau 3")
        if config.basis.layout in ("sphere", "spherical") and config.basis.family not in ("mlp", "dot") and config.dim != 3:
            raise ConfigValidationError("stack.basis.layout", f"layout {config.basis.layout} hanya untuk dim 3")
        return config

    @property
    def total_depth(self) -> int:
        return self.depth + sum(level.layers for level in self.levels)


@dataclass
class InitConfig:
    scheme: str = "variance_aware_direct"
    target_variance: float = InitDefaults.TARGET_VARIANCE
    gain: Optional[float] = None
    sample_count: int = InitDefaults.SAMPLE_COUNT
    resample_clouds: bool = True
    n_jobs: int = 1
    feature_model: Dict[str, Any] = field(default_factory=lambda: {"kind": "gaussian", "variance": 1.0})
    table: Optional[str] = None

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "InitConfig":
        resample = data.get("resample_clouds", True)
        if not isinstance(resample, bool):
            raise ConfigValidationError("init.resample_clouds", "harus boolean")
        n_jobs = data.get("n_jobs", 1)
        if isinstance(n_jobs, bool) or not isinstance(n_jobs, int) or n_jobs == 0:
            raise ConfigValidationError("init.n_jobs", "harus integer bukan nol (-1 untuk semua core)")
        table = data.get("table")
        if table is not None and not isinstance(table, str):
            raise ConfigValidationError("init.table", "harus berupa path")
        return cls(
            scheme=_choice(data.get("scheme", cls.scheme), INIT_SCHEMES, "init.scheme"),
            target_variance=_positive(data.get("target_variance", cls.target_variance), "init.target_variance"),
            gain=_optional_positive(data.get("gain"), "init.gain"),
            sample_count=_count(data.get("sample_count", cls.sample_count), "init.sample_count"),
            resample_clouds=resample,
            n_jobs=n_jobs,
            feature_model=_feature_model(_section(data, "feature_model", "init."), "init.feature_model"),
            table=table,
        )


@dataclass
class EvaluationConfig:
    clouds: int = ExperimentDefaults.EVAL_CLOUDS
    feature_model: Dict[str, Any] = field(default_factory=lambda: {"kind": "gaussian", "variance": 1.0})

    @classmethod
    def from_dict(cls, data: Dict[str, Any], init_features: Dict[str, Any]) -> "EvaluationConfig":
        features = data.get("feature_model")
        return cls(
            clouds=_count(data.get("clouds", cls.clouds), "evaluation.clouds"),
            feature_model=dict(init_features) if features is None
            else _feature_model(_section(data, "feature_model", "evaluation."), "evaluation.feature_model"),
        )


@dataclass
class CorrelogramConfig:
    layers: List[int] = field(default_factory=lambda: list(ExperimentDefaults.CORRELOGRAM_LAYERS))
    bins: int = ExperimentDefaults.CORRELOGRAM_BINS
    spacing: Optional[float] = None

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CorrelogramConfig":
        layers = data.get("layers", list(ExperimentDefaults.CORRELOGRAM_LAYERS))
        if not isinstance(layers, list) or not layers:
            raise ConfigValidationError("correlogram.layers", "harus list kedalaman tidak kosong")
        return cls(
            layers=[_count(layer, f"correlogram.layers[{k}]", 0) for k, layer in enumerate(layers)],
            bins=_count(data.get("bins", cls.bins), "correlogram.bins"),
            spacing=_optional_positive(data.get("spacing"), "correlogram.spacing"),
        )


@dataclass
class DiscreteConfig:
    images: int = ExperimentDefaults.DISCRETE_IMAGES
    size: int = ExperimentDefaults.DISCRETE_SIZE
    channels: int = ExperimentDefaults.DISCRETE_CHANNELS
    tolerance: float = ExperimentDefaults.DISCRETE_TOLERANCE

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "DiscreteConfig":
        return cls(
            images=_count(data.get("images", cls.images), "discrete.images"),
            size=_count(data.get("size", cls.size), "discrete.size", 3),
            channels=_count(data.get("channels", cls.channels), "discrete.channels"),
            tolerance=_positive(data.get("tolerance", cls.tolerance), "discrete.tolerance"),
        )


@dataclass
class ExperimentConfig:
    experiment: str
    seed: int = 0
    repeats: int = ExperimentDefaults.REPEATS
    output_dir: str = ExperimentDefaults.OUTPUT_DIR
    plot: bool = True
    save_stack: bool = False
    stack: StackConfig = field(default_factory=StackConfig)
    generator: Dict[str, Any] = field(default_factory=dict)
    init: InitConfig = field(default_factory=InitConfig)
    evaluation: EvaluationConfig = field(default_factory=EvaluationConfig)
    correlogram: CorrelogramConfig = field(default_factory=CorrelogramConfig)
    transfer_generator: Dict[str, Any] = field(default_factory=dict)
    discrete: DiscreteConfig = field(default_factory=DiscreteConfig)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigValidationError("<root>", "konfigurasi harus berupa object")
        experiment = _choice(data.get("experiment"), EXPERIMENTS, "experiment")
        for flag in ("plot", "save_stack"):
            if not isinstance(data.get(flag, True), bool):
                raise ConfigValidationError(flag, "harus boolean")
        output_dir = data.get("output_dir", ExperimentDefaults.OUTPUT_DIR)
        if not isinstance(output_dir, str) or not output_dir:
            raise ConfigValidationError("output_dir", "harus berupa path tidak kosong")

        stack = StackConfig.from_dict(_section(data, "stack"))
        init = InitConfig.from_dict(_section(data, "init"))
        config = cls(
            experiment=experiment,
            seed=_count(data.get("seed", 0), "seed", 0),
            repeats=_count(data.get("repeats", ExperimentDefaults.REPEATS), "repeats"),
            output_dir=output_dir,
            plot=data.get("plot", True),
            save_stack=data.get("save_stack", False),
            stack=stack,
            generator=_generator(_section(data, "generator"), "generator", stack.dim),
            init=init,
            evaluation=EvaluationConfig.from_dict(_section(data, "evaluation"), init.feature_model),
            correlogram=CorrelogramConfig.from_dict(_section(data, "correlogram")),
            transfer_generator=_generator(
                _section(data, "transfer").get("generator") or {"kind": "clustered"},
                "transfer.generator",
                stack.dim,
            ),
            discrete=DiscreteConfig.from_dict(_section(data, "discrete")),
        )
        config._check_consistency()
        return config

    def _check_consistency(self) -> None:
        if self.generator["dim"] != self.stack.dim:
            raise ConfigValidationError("generator.dim", f"harus sama dengan stack.dim ({self.stack.dim})")
        if self.transfer_generator["dim"] != self.stack.dim:
            raise ConfigValidationError("transfer.generator.dim", f"harus sama dengan stack.dim ({self.stack.dim})")
        if self.experiment == "transfer_check" and self.init.scheme not in (
            "variance_aware_direct",
            "variance_aware_transfer",
        ):
            raise ConfigValidationError("init.scheme", "transfer_check membutuhkan skema variance-aware")
        if self.experiment == "compute_ztable" and self.init.scheme != "variance_aware_direct":
            raise ConfigValidationError("init.scheme", "compute_ztable membutuhkan variance_aware_direct")
        if self.init.scheme == "variance_aware_transfer" and self.init.table is None \
                and self.experiment != "transfer_check":
            raise ConfigValidationError("init.table", "skema variance_aware_transfer membutuhkan path tabel")
        if self.experiment == "correlogram":
            too_deep = [layer for layer in self.correlogram.layers if layer > self.stack.total_depth]
            if too_deep:
                raise ConfigValidationError("correlogram.layers", f"kedalaman {too_deep} melebihi stack")

    @classmethod
    def from_file(cls, path: str) -> "ExperimentConfig":
        try:
            with open(path, "r") as f:
                data = json.load(f)
        except OSError as e:
            raise ConfigValidationError("<file>", f"gagal membaca {path}: {str(e)}")
        except ValueError as e:
            raise ConfigValidationError("<file>", f"JSON tidak valid di {path}: {str(e)}")
        return cls.from_dict(data)

    def resolved_output_dir(self) -> str:
        """VARINIT_OUTPUT_DIR menimpa output_dir dari file"""
        return os.environ.get(ExperimentDefaults.OUTPUT_DIR_ENV) or self.output_dir

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)
