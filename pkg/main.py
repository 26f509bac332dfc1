#!/usr/bin/env python3
"""
Variance-aware Point Convolution Init - Main Script
Version: 1.0.0
"""

import os
import sys
import json
import logging
import argparse
from datetime import datetime
from typing import Any, Dict, Optional

from src import __version__
from src.config.defaults import ExperimentDefaults
from src.config.experiment import ExperimentConfig
from src.core.errors import (
    ConfigValidationError,
    DegenerateEstimateError,
    InvalidArgumentError,
    NumericOverflowError,
)
from src.experiments.runner import ExperimentRunner
from src.utils.svg_plot import PLOT_KINDS, emit_plot

# subcommand -> eksperimen yang boleh dijalankan
ALLOWED_EXPERIMENTS = {
    "variance": ("variance_profile", "transfer_check"),
    "correlogram": ("correlogram",),
    "ztable compute": ("compute_ztable",),
    "ztable apply": ("variance_profile",),
    "check discrete": ("discrete_equivalence",),
}


class PointConvInitApp:
    """Kelas utama aplikasi eksperimen inisialisasi"""

    def __init__(self, debug: bool = False):
        self.debug = debug
        self.runner = None

    def setup_logging(self, output_dir: str) -> None:
        """Setup sistem logging"""
        log_dir = os.path.join(output_dir, "logs")
        os.makedirs(log_dir, exist_ok=True)

        log_file = os.path.join(log_dir, f'varinit_{datetime.now().strftime("%Y%m%d")}.log')

        logging.basicConfig(
            level=logging.DEBUG if self.debug else logging.INFO,
            format='%(asctime)s - %(levelname)s - %(message)s',
            handlers=[
                logging.FileHandler(log_file),
                logging.StreamHandler(sys.stdout)
            ]
        )

        logging.info("Logging system initialized")
        print(f"Log file: {log_file}")

    def load_config(self, command: str, path: Optional[str], overrides: Dict[str, Any]) -> ExperimentConfig:
        """Memuat config JSON, menerapkan override CLI, lalu memvalidasi"""
        data: Dict[str, Any] = {}
        if path is not None:
            try:
                with open(path, "r") as f:
                    data = json.load(f)
            except OSError as e:
                raise ConfigValidationError("<file>", f"gagal membaca {path}: {str(e)}")
            except ValueError as e:
                raise ConfigValidationError("<file>", f"JSON tidak valid di {path}: {str(e)}")
            if not isinstance(data, dict):
                raise ConfigValidationError("<root>", "konfigurasi harus berupa object")

        allowed = ALLOWED_EXPERIMENTS[command]
        data.setdefault("experiment", allowed[0])
        if data["experiment"] not in allowed:
            raise ConfigValidationError(
                "experiment", f"subcommand '{command}' menjalankan {list(allowed)}, didapat {data['experiment']!r}"
            )
        for key, value in overrides.items():
            section, _, name = key.partition(".")
            if name:
                if data.get(section) is None:
                    data[section] = {}
                if not isinstance(data[section], dict):
                    raise ConfigValidationError(section, "harus berupa object")
                data[section][name] = value
            else:
                data[key] = value
        return ExperimentConfig.from_dict(data)

    def run_experiment(self, config: ExperimentConfig) -> int:
        """Menjalankan eksperimen dan mengembalikan exit code"""
        output_dir = config.resolved_output_dir()
        self.setup_logging(output_dir)
        self.runner = ExperimentRunner(config)
        manifest = self.runner.run()

        print(f"\nEksperimen: {manifest.experiment}")
        print(f"Output: {self.runner.storage.base_path}")
        for record in manifest.outputs:
            print(f"- {record.path} ({record.bytes} bytes)")
        for key, value in manifest.summary.items():
            print(f"{key}: {value}")

        if config.experiment == "discrete_equivalence" and not manifest.summary.get("passed", False):
            return ExperimentDefaults.EXIT_CHECK_FAILED
        return ExperimentDefaults.EXIT_OK

    def run(self, args: argparse.Namespace) -> int:
        if args.command == "plot":
            svg_path = emit_plot(args.csv, args.kind, args.output)
            print(f"SVG ditulis ke: {svg_path}")
            return ExperimentDefaults.EXIT_OK

        command = args.command if args.command not in ("ztable", "check") else f"{args.command} {args.action}"
        overrides: Dict[str, Any] = {}
        if args.seed is not None:
            overrides["seed"] = args.seed
        if command == "ztable apply":
            overrides.update({"init.scheme": "variance_aware_transfer", "init.table": args.table, "save_stack": True})
        config = self.load_config(command, args.config, overrides)
        return self.run_experiment(config)


def _add_common(parser: argparse.ArgumentParser, config_required: bool = True) -> None:
    parser.add_argument(
        "--config",
        type=str,
        required=config_required,
        help="Path ke file konfigurasi JSON (lihat README dan configs/)"
    )
    parser.add_argument(
        "--seed",
        type=int,
        default=None,
        help="Menimpa seed dari file konfigurasi"
    )


def parse_arguments(argv=None) -> argparse.Namespace:
    """Parse command line arguments"""
    parser = argparse.ArgumentParser(
        description="Variance-aware weight initialization for point convolutions",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        epilog=f"Environment variable {ExperimentDefaults.OUTPUT_DIR_ENV} menimpa output_dir."
    )
    parser.add_argument(
        "--debug",
        action="store_true",
        help="Aktifkan mode debug"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    variance = subparsers.add_parser(
        "variance",
        help="Profil variance per layer (variance_profile / transfer_check)",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter
    )
    _add_common(variance)

    correlogram = subparsers.add_parser(
        "correlogram",
        help="Correlogram fitur per layer",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter
    )
    _add_common(correlogram)

    ztable = subparsers.add_parser("ztable", help="Menghitung atau menerapkan tabel z")
    ztable_actions = ztable.add_subparsers(dest="action", required=True)
    compute = ztable_actions.add_parser(
        "compute",
        help="Menghitung tabel z (variance_aware_direct)",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter
    )
    _add_common(compute)
    apply = ztable_actions.add_parser(
        "apply",
        help="Inisialisasi stack dari tabel z lalu ukur profil variance",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter
    )
    _add_common(apply)
    apply.add_argument(
        "--table",
        type=str,
        required=True,
        help="Path ke ztable.json"
    )

    check = subparsers.add_parser("check", help="Pemeriksaan reduksi")
    check_actions = check.add_subparsers(dest="action", required=True)
    discrete = check_actions.add_parser(
        "discrete",
        help="Konvolusi titik pada lattice vs cross-correlation 3x3",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter
    )
    _add_common(discrete, config_required=False)

    plot = subparsers.add_parser(
        "plot",
        help="Membuat SVG dari CSV hasil eksperimen",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter
    )
    plot.add_argument(
        "--csv",
        type=str,
        required=True,
        help="Path ke CSV variance profile atau correlogram"
    )
    plot.add_argument(
        "--kind",
        choices=PLOT_KINDS,
        default="line",
        help="Jenis plot"
    )
    plot.add_argument(
        "--output",
        type=str,
        default=None,
        help="Path SVG (default: nama CSV dengan ekstensi .svg)"
    )

    return parser.parse_args(argv)


def print_banner():
    """Menampilkan banner aplikasi"""
    banner = f"""
    ╔══════════════════════════════════════════════╗
    ║        POINT CONVOLUTION INITIALIZATION      ║
    ║      Variance-aware Weight Initialization    ║
    ╚══════════════════════════════════════════════╝
    Version: {__version__}
    """
    print(banner)


def main(argv=None) -> int:
    """Fungsi utama aplikasi"""
    print_banner()
    args = parse_arguments(argv)
    app = PointConvInitApp(debug=args.debug)

    try:
        return app.run(args)
    except ConfigValidationError as e:
        print(f"\nKonfigurasi tidak valid: {str(e)}")
        logging.error(f"Config error: {str(e)}")
        return ExperimentDefaults.EXIT_CONFIG
    except (NumericOverflowError, DegenerateEstimateError) as e:
        print(f"\nError numerik: {str(e)}")
        logging.error(f"Numeric error: {str(e)}")
        return ExperimentDefaults.EXIT_NUMERIC
    except InvalidArgumentError as e:
        print(f"\nArgumen tidak valid: {str(e)}")
        logging.error(f"Invalid argument: {str(e)}")
        return ExperimentDefaults.EXIT_INVALID
    except KeyboardInterrupt:
        print("\nProgram dihentikan oleh user")
        return ExperimentDefaults.EXIT_UNEXPECTED
    except Exception as e:
        print(f"\nError: {str(e)}")
        logging.exception("Unexpected error occurred")
        return ExperimentDefaults.EXIT_UNEXPECTED


if __name__ == "__main__":
    sys.exit(main())
