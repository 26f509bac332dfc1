# src/config/defaults.py


class InitDefaults:
    """Konstanta default untuk basis, estimator dan inisialisasi"""

    # Kernel density estimation
    KDE_BANDWIDTH_RATIO = 1.0 / 3.0   # bandwidth = receptive radius / 3

    # Estimator nn
    SOFTPLUS_EPSILON = 1e-6           # π(p) = softplus(MLP(p)) + eps
    DENSITY_MLP_HIDDEN = 4            # perceptron 1 -> 4 -> 1

    # Basis mlp
    MLP_HIDDEN = 8                    # hidden width H

    # Inisialisasi variance-aware
    SAMPLE_COUNT = 16                 # jumlah cloud per layer
    Z_THRESHOLD = 1e-30               # di bawah ini z_l dianggap degenerate
    TARGET_VARIANCE = 1.0
    RELU_GAIN = 2.0
    LINEAR_GAIN = 1.0

    @classmethod
    def kde_bandwidth(cls, radius: float) -> float:
        """Bandwidth KDE default untuk receptive radius tertentu"""
        return radius * cls.KDE_BANDWIDTH_RATIO


class ExperimentDefaults:
    """Konstanta default untuk eksperimen dan harness"""

    OUTPUT_DIR = "output"
    OUTPUT_DIR_ENV = "VARINIT_OUTPUT_DIR"

    # Stack uji variance (cloud uniform 3D, 1k titik)
    DEPTH = 25
    CHANNELS = 16
    KERNEL_SIZE = 16
    POINTS = 1000
    RADIUS = 0.25                     # ~60 neighbor pada 1k titik di permukaan bola r 0.5
    KERNEL_RADIUS_RATIO = 2.0 / 3.0   # kernel points di dalam receptive field
    LINEAR_BANDWIDTH_RATIO = 0.4      # s linear relatif terhadap radius
    EVAL_CLOUDS = 4
    REPEATS = 1

    # Correlogram
    CORRELOGRAM_BINS = 20
    CORRELOGRAM_SPAN = 4.0            # bin sampai 4 x kernel spacing
    CORRELOGRAM_LAYERS = (0, 1, 5, 10, 20)

    # Level Poisson-disk
    RECEPTIVE_FACTOR = 3.0            # receptive radius = 3 x radius Poisson

    # Cek reduksi diskrit
    DISCRETE_IMAGES = 10
    DISCRETE_SIZE = 8
    DISCRETE_CHANNELS = 3
    DISCRETE_TOLERANCE = 1e-12

    # Exit code CLI
    EXIT_OK = 0
    EXIT_UNEXPECTED = 1
    EXIT_CONFIG = 2
    EXIT_NUMERIC = 3
    EXIT_INVALID = 4
    EXIT_CHECK_FAILED = 5


# Operator dari tabel basis x estimator
OPERATOR_PRESETS = {
    "pccnn": {"family": "gaussian", "estimator": "mc", "layout": "sphere"},
    "pointwise": {"family": "box", "estimator": "avg", "layout": "sphere"},
    "sphconv": {"family": "box", "estimator": "avg", "layout": "spherical"},
    "kpconv": {"family": "linear", "estimator": "sum", "layout": "sphere"},
    "kpconv_n": {"family": "linear", "estimator": "mc", "layout": "sphere"},
    "interpcnn": {"family": "linear", "estimator": "avg", "layout": "grid"},
    "mcconv": {"family": "mlp", "estimator": "mc", "layout": None},
    "pointconv": {"family": "mlp", "estimator": "nn", "layout": None},
    "flexconv": {"family": "dot", "estimator": "sum", "layout": None},
}
