# src/core/models/data_models.py
from dataclasses import dataclass, field, replace
from typing import List, Dict, Any, Optional, Tuple

import numpy as np

from src.core.errors import InvalidArgumentError

SCHEMA_VERSION = 1

BASIS_FAMILIES = ("gaussian", "box", "linear", "mlp", "dot")
ESTIMATOR_MODES = ("sum", "avg", "mc", "nn")
NONLINEARITIES = ("none", "relu")
INIT_SCHEMES = (
    "he",
    "standard",
    "channels_only",
    "variance_aware_direct",
    "variance_aware_transfer",
)
COORDINATE_SYSTEMS = ("cartesian", "spherical")


def _frozen_array(values: Any, name: str, ndim: int) -> np.ndarray:
    """Salinan float64 read-only dengan jumlah dimensi tertentu"""
    array = np.array(values, dtype=np.float64)
    if array.ndim != ndim:
        raise InvalidArgumentError(f"{name} harus berdimensi {ndim}, didapat shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise InvalidArgumentError(f"{name} mengandung nilai tidak finite")
    array.flags.writeable = False
    return array


def _optional_list(array: Optional[np.ndarray]) -> Optional[list]:
    return None if array is None else array.tolist()


@dataclass(frozen=True)
class PointCloud:
    """Posisi titik d-dimensi dengan densitas opsional p(y)"""
    positions: np.ndarray
    density: Optional[np.ndarray] = None

    def __post_init__(self):
        positions = np.array(self.positions, dtype=np.float64)
        if positions.ndim == 1:
            positions = positions.reshape(-1, 1)
        positions = _frozen_array(positions, "positions", 2)
        if positions.shape[0] < 1:
            raise InvalidArgumentError("point cloud harus memiliki minimal 1 titik")
        if positions.shape[1] not in (1, 2, 3):
            raise InvalidArgumentError(f"dimensi harus 1, 2 atau 3, didapat {positions.shape[1]}")
        object.__setattr__(self, "positions", positions)

        if self.density is not None:
            density = _frozen_array(self.density, "density", 1)
            if density.shape[0] != positions.shape[0]:
                raise InvalidArgumentError(
                    f"density berisi {density.shape[0]} nilai untuk {positions.shape[0]} titik"
                )
            if np.any(density <= 0):
                raise InvalidArgumentError("density harus positif")
            object.__setattr__(self, "density", density)

    @property
    def dim(self) -> int:
        return int(self.positions.shape[1])

    @property
    def n(self) -> int:
        return int(self.positions.shape[0])

    def with_density(self, density: np.ndarray) -> "PointCloud":
        return PointCloud(self.positions, density)

    def without_density(self) -> "PointCloud":
        return PointCloud(self.positions)

    def translated(self, vector: Any) -> "PointCloud":
        return PointCloud(self.positions + np.asarray(vector, dtype=np.float64), self.density)

    def subset(self, indices: np.ndarray) -> "PointCloud":
        density = None if self.density is None else self.density[indices]
        return PointCloud(self.positions[indices], density)


@dataclass(frozen=True)
class NeighborhoodSet:
    """Daftar neighbor per query dalam format CSR (indptr, indices)"""
    query_count: int
    support_count: int
    radius: float
    indptr: np.ndarray
    indices: np.ndarray

    def __post_init__(self):
        indptr = np.array(self.indptr, dtype=np.int64)
        indices = np.array(self.indices, dtype=np.int64)
        if indptr.shape != (self.query_count + 1,) or indptr[0] != 0 or indptr[-1] != indices.shape[0]:
            raise InvalidArgumentError("indptr tidak konsisten dengan jumlah query")
        if indices.size and (indices.min() < 0 or indices.max() >= self.support_count):
            raise InvalidArgumentError("index neighbor di luar support cloud")
        indptr.flags.writeable = False
        indices.flags.writeable = False
        object.__setattr__(self, "indptr", indptr)
        object.__setattr__(self, "indices", indices)

    @property
    def counts(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def pair_count(self) -> int:
        return int(self.indices.shape[0])

    @property
    def query_ids(self) -> np.ndarray:
        """Index query untuk setiap pasangan, urut sesuai indices"""
        return np.repeat(np.arange(self.query_count, dtype=np.int64), self.counts)

    @property
    def lists(self) -> List[np.ndarray]:
        return [self.indices[self.indptr[q]:self.indptr[q + 1]] for q in range(self.query_count)]


@dataclass(frozen=True)
class MLPParams:
    """Perceptron 2 layer untuk basis mlp: d -> H (ReLU) -> K"""
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "w1", _frozen_array(self.w1, "mlp.w1", 2))
        object.__setattr__(self, "b1", _frozen_array(self.b1, "mlp.b1", 1))
        object.__setattr__(self, "w2", _frozen_array(self.w2, "mlp.w2", 2))
        object.__setattr__(self, "b2", _frozen_array(self.b2, "mlp.b2", 1))
        hidden = self.w1.shape[0]
        if self.b1.shape[0] != hidden or self.w2.shape[1] != hidden:
            raise InvalidArgumentError("ukuran hidden layer mlp tidak konsisten")
        if self.b2.shape[0] != self.w2.shape[0]:
            raise InvalidArgumentError("ukuran output mlp tidak konsisten")

    @property
    def hidden(self) -> int:
        return int(self.w1.shape[0])

    @property
    def outputs(self) -> int:
        return int(self.w2.shape[0])

    def to_dict(self) -> Dict[str, Any]:
        return {"w1": self.w1.tolist(), "b1": self.b1.tolist(), "w2": self.w2.tolist(), "b2": self.b2.tolist()}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "MLPParams":
        return cls(w1=data["w1"], b1=data["b1"], w2=data["w2"], b2=data["b2"])


@dataclass(frozen=True)
class BasisSpec:
    """
    Spesifikasi basis b(δ) ∈ R^K.

    kernel_points dipakai gaussian/box/linear, bandwidth dipakai gaussian
    dan linear, vectors + dot_bias dipakai dot, mlp dipakai mlp.
    coordinates = spherical hanya untuk box (varian SPHConv).
    """
    family: str
    dim: int
    radius: float
    kernel_points: Optional[np.ndarray] = None
    bandwidth: Optional[float] = None
    vectors: Optional[np.ndarray] = None
    dot_bias: Optional[np.ndarray] = None
    mlp: Optional[MLPParams] = None
    coordinates: str = "cartesian"

    def __post_init__(self):
        if self.family not in BASIS_FAMILIES:
            raise InvalidArgumentError(f"family basis tidak dikenal: {self.family}")
        if self.dim not in (1, 2, 3):
            raise InvalidArgumentError(f"dimensi basis harus 1, 2 atau 3, didapat {self.dim}")
        if not np.isfinite(self.radius) or self.radius <= 0:
            raise InvalidArgumentError(f"radius basis harus > 0, didapat {self.radius}")
        if self.coordinates not in COORDINATE_SYSTEMS:
            raise InvalidArgumentError(f"sistem koordinat tidak dikenal: {self.coordinates}")
        if self.coordinates == "spherical" and (self.family != "box" or self.dim != 3):
            raise InvalidArgumentError("koordinat spherical hanya untuk basis box 3D")

        if self.family in ("gaussian", "box", "linear"):
            if self.kernel_points is None:
                raise InvalidArgumentError(f"basis {self.family} membutuhkan kernel_points")
            points = np.array(self.kernel_points, dtype=np.float64)
            if points.ndim == 1:
                points = points.reshape(-1, 1)
            points = _frozen_array(points, "kernel_points", 2)
            if points.shape[0] < 1 or points.shape[1] != self.dim:
                raise InvalidArgumentError(f"kernel_points harus K x {self.dim}, didapat {points.shape}")
            object.__setattr__(self, "kernel_points", points)
        elif self.kernel_points is not None:
            raise InvalidArgumentError(f"basis {self.family} tidak memakai kernel_points")

        if self.family in ("gaussian", "linear"):
            if self.bandwidth is None or not np.isfinite(self.bandwidth) or self.bandwidth <= 0:
                raise InvalidArgumentError(f"basis {self.family} membutuhkan bandwidth > 0")
            object.__setattr__(self, "bandwidth", float(self.bandwidth))

        if self.family == "dot":
            if self.vectors is None:
                raise InvalidArgumentError("basis dot membutuhkan vectors")
            vectors = _frozen_array(self.vectors, "vectors", 2)
            if vectors.shape[0] < 1 or vectors.shape[1] != self.dim:
                raise InvalidArgumentError(f"vectors harus K x {self.dim}, didapat {vectors.shape}")
            bias = np.zeros(vectors.shape[0]) if self.dot_bias is None else self.dot_bias
            bias = _frozen_array(bias, "dot_bias", 1)
            if bias.shape[0] != vectors.shape[0]:
                raise InvalidArgumentError("dot_bias harus berisi K nilai")
            object.__setattr__(self, "vectors", vectors)
            object.__setattr__(self, "dot_bias", bias)

        if self.family == "mlp":
            if self.mlp is None:
                raise InvalidArgumentError("basis mlp membutuhkan mlp params")
            if self.mlp.w1.shape[1] != self.dim:
                raise InvalidArgumentError("input mlp tidak sesuai dimensi basis")

    @property
    def size(self) -> int:
        """Jumlah fungsi basis K"""
        if self.family == "dot":
            return int(self.vectors.shape[0])
        if self.family == "mlp":
            return self.mlp.outputs
        return int(self.kernel_points.shape[0])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "family": self.family,
            "dim": self.dim,
            "radius": self.radius,
            "coordinates": self.coordinates,
            "kernel_points": _optional_list(self.kernel_points),
            "bandwidth": self.bandwidth,
            "vectors": _optional_list(self.vectors),
            "dot_bias": _optional_list(self.dot_bias),
            "mlp": None if self.mlp is None else self.mlp.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "BasisSpec":
        mlp = data.get("mlp")
        return cls(
            family=data["family"],
            dim=int(data["dim"]),
            radius=float(data["radius"]),
            kernel_points=data.get("kernel_points"),
            bandwidth=data.get("bandwidth"),
            vectors=data.get("vectors"),
            dot_bias=data.get("dot_bias"),
            mlp=None if mlp is None else MLPParams.from_dict(mlp),
            coordinates=data.get("coordinates", "cartesian"),
        )


@dataclass(frozen=True)
class DensityMLPParams:
    """Perceptron 1 -> H (ReLU) -> 1 untuk koreksi densitas π"""
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "w1", _frozen_array(self.w1, "density_mlp.w1", 1))
        object.__setattr__(self, "b1", _frozen_array(self.b1, "density_mlp.b1", 1))
        object.__setattr__(self, "w2", _frozen_array(self.w2, "density_mlp.w2", 1))
        if not (self.w1.shape == self.b1.shape == self.w2.shape):
            raise InvalidArgumentError("ukuran hidden density_mlp tidak konsisten")
        if not np.isfinite(self.b2):
            raise InvalidArgumentError("density_mlp.b2 tidak finite")
        object.__setattr__(self, "b2", float(self.b2))

    def to_dict(self) -> Dict[str, Any]:
        return {"w1": self.w1.tolist(), "b1": self.b1.tolist(), "w2": self.w2.tolist(), "b2": self.b2}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "DensityMLPParams":
        return cls(w1=data["w1"], b1=data["b1"], w2=data["w2"], b2=data.get("b2", 0.0))


@dataclass(frozen=True)
class EstimatorSpec:
    """Mode estimator integral; nn membutuhkan density_mlp"""
    mode: str
    density_mlp: Optional[DensityMLPParams] = None

    def __post_init__(self):
        if self.mode not in ESTIMATOR_MODES:
            raise InvalidArgumentError(f"mode estimator tidak dikenal: {self.mode}")
        if self.mode == "nn" and self.density_mlp is None:
            raise InvalidArgumentError("estimator nn membutuhkan density_mlp")
        if self.mode != "nn" and self.density_mlp is not None:
            raise InvalidArgumentError(f"estimator {self.mode} tidak memakai density_mlp")

    @property
    def needs_density(self) -> bool:
        return self.mode in ("mc", "nn")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mode": self.mode,
            "density_mlp": None if self.density_mlp is None else self.density_mlp.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "EstimatorSpec":
        mlp = data.get("density_mlp")
        return cls(mode=data["mode"], density_mlp=None if mlp is None else DensityMLPParams.from_dict(mlp))


@dataclass(frozen=True)
class FeatureMatrix:
    """Aktivasi F^l(x): N titik x C channel pada layer l"""
    values: np.ndarray
    layer_index: int = 0

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.ndim == 1:
            values = values.reshape(-1, 1)
        object.__setattr__(self, "values", _frozen_array(values, "features", 2))
        if self.layer_index < 0:
            raise InvalidArgumentError("layer_index harus >= 0")

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    @property
    def channels(self) -> int:
        return int(self.values.shape[1])


@dataclass(frozen=True)
class ConvLayer:
    """Satu layer konvolusi kontinu; weights berbentuk C_in x K x C_out"""
    basis: BasisSpec
    estimator: EstimatorSpec
    radius: float
    in_channels: int
    out_channels: int
    weights: Optional[np.ndarray] = None
    nonlinearity: str = "none"
    level_in: int = 0
    level_out: int = 0
    weight_variance: Optional[float] = None

    def __post_init__(self):
        if not np.isfinite(self.radius) or self.radius <= 0:
            raise InvalidArgumentError(f"radius layer harus > 0, didapat {self.radius}")
        if self.in_channels < 1 or self.out_channels < 1:
            raise InvalidArgumentError("jumlah channel harus >= 1")
        if self.nonlinearity not in NONLINEARITIES:
            raise InvalidArgumentError(f"nonlinearity tidak dikenal: {self.nonlinearity}")
        if self.level_in < 0 or self.level_out < 0:
            raise InvalidArgumentError("index level harus >= 0")
        if self.weights is not None:
            weights = _frozen_array(self.weights, "weights", 3)
            expected = (self.in_channels, self.basis.size, self.out_channels)
            if weights.shape != expected:
                raise InvalidArgumentError(f"weights harus berbentuk {expected}, didapat {weights.shape}")
            object.__setattr__(self, "weights", weights)

    @property
    def kernel_size(self) -> int:
        return self.basis.size

    @property
    def is_initialized(self) -> bool:
        return self.weights is not None

    def with_weights(self, weights: np.ndarray, variance: Optional[float] = None) -> "ConvLayer":
        return replace(self, weights=weights, weight_variance=variance)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "basis": self.basis.to_dict(),
            "estimator": self.estimator.to_dict(),
            "radius": self.radius,
            "in_channels": self.in_channels,
            "out_channels": self.out_channels,
            "nonlinearity": self.nonlinearity,
            "level_in": self.level_in,
            "level_out": self.level_out,
            "weight_variance": self.weight_variance,
            "weights": _optional_list(self.weights),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ConvLayer":
        return cls(
            basis=BasisSpec.from_dict(data["basis"]),
            estimator=EstimatorSpec.from_dict(data["estimator"]),
            radius=float(data["radius"]),
            in_channels=int(data["in_channels"]),
            out_channels=int(data["out_channels"]),
            weights=data.get("weights"),
            nonlinearity=data.get("nonlinearity", "none"),
            level_in=int(data.get("level_in", 0)),
            level_out=int(data.get("level_out", 0)),
            weight_variance=data.get("weight_variance"),
        )


@dataclass(frozen=True)
class ConvStack:
    """Urutan layer; level 0 adalah cloud input, level k hasil Poisson-disk ke-k"""
    layers: Tuple[ConvLayer, ...] = ()
    level_radii: Tuple[float, ...] = ()
    level_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        object.__setattr__(self, "level_radii", tuple(float(r) for r in self.level_radii))
        for radius in self.level_radii:
            if not np.isfinite(radius) or radius <= 0:
                raise InvalidArgumentError("radius level harus > 0")
        level_count = len(self.level_radii) + 1
        for depth, layer in enumerate(self.layers, start=1):
            if layer.level_in >= level_count or layer.level_out >= level_count:
                raise InvalidArgumentError(f"layer {depth} memakai level yang tidak ada")
        for depth in range(1, len(self.layers)):
            previous, current = self.layers[depth - 1], self.layers[depth]
            if previous.out_channels != current.in_channels:
                raise InvalidArgumentError(
                    f"channel tidak berantai di layer {depth + 1}: "
                    f"{previous.out_channels} -> {current.in_channels}"
                )
            if previous.level_out != current.level_in:
                raise InvalidArgumentError(f"level tidak berantai di layer {depth + 1}")

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def is_initialized(self) -> bool:
        return all(layer.is_initialized for layer in self.layers)

    def prefix(self, count: int) -> "ConvStack":
        return replace(self, layers=self.layers[:count])

    def replace_layer(self, index: int, layer: ConvLayer) -> "ConvStack":
        layers = list(self.layers)
        layers[index] = layer
        return replace(self, layers=tuple(layers))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "level_radii": list(self.level_radii),
            "level_seed": self.level_seed,
            "layers": [layer.to_dict() for layer in self.layers],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ConvStack":
        _check_schema(data, "stack")
        return cls(
            layers=tuple(ConvLayer.from_dict(item) for item in data.get("layers", [])),
            level_radii=tuple(data.get("level_radii", [])),
            level_seed=int(data.get("level_seed", 0)),
        )


@dataclass(frozen=True)
class ZEntry:
    depth: int
    z: float


@dataclass(frozen=True)
class ZTable:
    """Tabel z_l per kedalaman layer beserta metadata estimasinya"""
    entries: Tuple[ZEntry, ...]
    meta: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        entries = tuple(self.entries)
        previous = 0
        for entry in entries:
            if entry.depth <= previous:
                raise InvalidArgumentError("kedalaman ZTable harus naik tegas mulai dari 1")
            if not np.isfinite(entry.z) or entry.z <= 0:
                raise InvalidArgumentError(f"z pada kedalaman {entry.depth} harus finite dan > 0")
            previous = entry.depth
        if entries and entries[0].depth < 1:
            raise InvalidArgumentError("kedalaman ZTable dimulai dari 1")
        object.__setattr__(self, "entries", entries)

    @property
    def depth(self) -> int:
        return self.entries[-1].depth if self.entries else 0

    def lookup(self, depth: int) -> Tuple[float, int]:
        """z untuk kedalaman tertentu; fallback ke kedalaman lebih rendah terdekat"""
        if not self.entries:
            raise InvalidArgumentError("ZTable kosong")
        chosen = None
        for entry in self.entries:
            if entry.depth <= depth:
                chosen = entry
            else:
                break
        if chosen is None:
            raise InvalidArgumentError(f"ZTable tidak memiliki kedalaman <= {depth}")
        return chosen.z, chosen.depth

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "entries": [{"depth": e.depth, "z": e.z} for e in self.entries],
            "meta": self.meta,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ZTable":
        _check_schema(data, "ztable")
        entries = tuple(ZEntry(int(item["depth"]), float(item["z"])) for item in data.get("entries", []))
        return cls(entries=entries, meta=dict(data.get("meta", {})))


@dataclass(frozen=True)
class InitPlan:
    """Rencana inisialisasi bobot"""
    scheme: str
    target_variance: float = 1.0
    gain: Optional[float] = None
    seed: int = 0
    resample_clouds: bool = True
    n_jobs: int = 1

    def __post_init__(self):
        if self.scheme not in INIT_SCHEMES:
            raise InvalidArgumentError(f"skema inisialisasi tidak dikenal: {self.scheme}")
        if not np.isfinite(self.target_variance) or self.target_variance <= 0:
            raise InvalidArgumentError("target_variance harus > 0")
        if self.gain is not None and (not np.isfinite(self.gain) or self.gain <= 0):
            raise InvalidArgumentError("gain harus > 0")
        if self.seed < 0:
            raise InvalidArgumentError("seed harus >= 0")

    def gain_for(self, nonlinearity: str) -> float:
        """Gain eksplisit, atau 2 untuk relu dan 1 untuk none"""
        if self.gain is not None:
            return float(self.gain)
        return 2.0 if nonlinearity == "relu" else 1.0


@dataclass(frozen=True)
class VarianceEntry:
    depth: int
    variance: float
    n: int


@dataclass(frozen=True)
class VarianceProfile:
    entries: Tuple[VarianceEntry, ...]

    @property
    def variances(self) -> np.ndarray:
        return np.array([e.variance for e in self.entries])

    @property
    def depths(self) -> List[int]:
        return [e.depth for e in self.entries]


@dataclass(frozen=True)
class Correlogram:
    """Korelasi Pearson per bin jarak; r None bila tidak terdefinisi"""
    bin_edges: np.ndarray
    pair_counts: np.ndarray
    r: Tuple[Optional[float], ...]
    layer_depth: int = 0

    @property
    def bins(self) -> int:
        return len(self.r)


@dataclass
class OutputRecord:
    path: str
    sha256: str
    bytes: int


@dataclass
class RunManifest:
    """Manifest eksekusi: echo config, versi, seed, durasi, daftar output"""
    experiment: str
    config: Dict[str, Any]
    version: str
    seeds: List[int]
    started_at: str
    wall_clock_seconds: float = 0.0
    outputs: List[OutputRecord] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "experiment": self.experiment,
            "version": self.version,
            "seeds": list(self.seeds),
            "started_at": self.started_at,
            "wall_clock_seconds": self.wall_clock_seconds,
            "config": self.config,
            "summary": self.summary,
            "outputs": [{"path": o.path, "sha256": o.sha256, "bytes": o.bytes} for o in self.outputs],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunManifest":
        _check_schema(data, "manifest")
        return cls(
            experiment=data["experiment"],
            config=data.get("config", {}),
            version=data.get("version", ""),
            seeds=list(data.get("seeds", [])),
            started_at=data.get("started_at", ""),
            wall_clock_seconds=float(data.get("wall_clock_seconds", 0.0)),
            outputs=[OutputRecord(**item) for item in data.get("outputs", [])],
            summary=data.get("summary", {}),
        )


def _check_schema(data: Dict[str, Any], kind: str) -> None:
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise InvalidArgumentError(f"schema_version {kind} tidak didukung: {version!r}")
