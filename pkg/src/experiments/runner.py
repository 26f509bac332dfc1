# src/experiments/runner.py
import logging
import time
from datetime import datetime
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from threadpoolctl import threadpool_limits

from src import __version__
from src.analyzers.correlogram import CorrelogramAnalyzer, correlogram, correlogram_to_frame, default_bin_edges
from src.analyzers.variance_profile import VarianceProfileAnalyzer, layer_variance_profile, profile_to_frame
from src.config.defaults import ExperimentDefaults
from src.config.experiment import ExperimentConfig
from src.convolution.discrete import discrete_conv_reference, point_conv_image
from src.convolution.stack import stack_forward
from src.core.errors import InvalidArgumentError
from src.core.interfaces.generator import ICloudGenerator
from src.core.models.data_models import ConvStack, FeatureMatrix, InitPlan, RunManifest, ZTable
from src.experiments.stack_builder import build_stack
from src.geometry.generators import make_generator
from src.initialization.feature_models import make_feature_model
from src.initialization.schemes import init_fan_in
from src.initialization.variance_aware import transfer_init, variance_aware_init
from src.storage.file_storage import FileStorage
from src.utils.rng import derive_seed, make_rng, seed_list, STREAM_EVAL, STREAM_IMAGES
from src.utils.svg_plot import emit_plot
from src.utils.ztable_validator import ZTableValidator


class ExperimentRunner:
    """
    Menjalankan satu eksperimen dari ExperimentConfig dan menulis outputnya.

    Semua perhitungan berjalan dengan BLAS satu thread supaya hasil
    byte-identik antar mesin; output ditulis oleh satu writer (FileStorage)
    dan diakhiri manifest.
    """

    def __init__(self, config: ExperimentConfig, storage: Optional[FileStorage] = None):
        self.config = config
        self.storage = storage or FileStorage(config.resolved_output_dir())
        self.logger = logging.getLogger('runner')
        self.logger.setLevel(logging.INFO)
        self._experiments: Dict[str, Callable[[], Dict[str, Any]]] = {
            "variance_profile": self._run_variance_profile,
            "correlogram": self._run_correlogram,
            "compute_ztable": self._run_compute_ztable,
            "transfer_check": self._run_transfer_check,
            "discrete_equivalence": self._run_discrete_equivalence,
        }

    @property
    def seeds(self) -> List[int]:
        return list(seed_list(self.config.seed, self.config.repeats))

    def run(self) -> RunManifest:
        """Eksekusi eksperimen lalu tulis manifest secara atomik"""
        started_at = datetime.now().isoformat(timespec="seconds")
        start = time.perf_counter()
        self.logger.info(f"Menjalankan eksperimen {self.config.experiment} (seed {self.seeds})")

        with threadpool_limits(limits=1):
            summary = self._experiments[self.config.experiment]()

        manifest = RunManifest(
            experiment=self.config.experiment,
            config=self.config.to_dict(),
            version=__version__,
            seeds=self.seeds,
            started_at=started_at,
            wall_clock_seconds=round(time.perf_counter() - start, 3),
            outputs=self.storage.output_records(),
            summary=summary,
        )
        self.storage.write_manifest(manifest)
        self.logger.info(f"Eksperimen selesai dalam {manifest.wall_clock_seconds:.1f} detik")
        return manifest

    # helper

    def _plan(self, seed: int, scheme: Optional[str] = None) -> InitPlan:
        init = self.config.init
        return InitPlan(
            scheme=scheme or init.scheme,
            target_variance=init.target_variance,
            gain=init.gain,
            seed=seed,
            resample_clouds=init.resample_clouds,
            n_jobs=init.n_jobs,
        )

    def _load_table(self, path: str) -> ZTable:
        is_valid, message, table = ZTableValidator.load_and_validate(path)
        if not is_valid:
            self.logger.error(message)
            raise InvalidArgumentError(message)
        return table

    def _initialize(
        self,
        stack: ConvStack,
        generator: ICloudGenerator,
        seed: int,
    ) -> Tuple[ConvStack, Optional[ZTable]]:
        init = self.config.init
        plan = self._plan(seed)
        if init.scheme == "variance_aware_direct":
            return variance_aware_init(
                stack, generator, init.sample_count, plan, make_feature_model(init.feature_model)
            )
        if init.scheme == "variance_aware_transfer":
            table = self._load_table(init.table)
            return transfer_init(stack, table, plan), table
        return init_fan_in(stack, plan, generator), None

    def _evaluate(self, stack: ConvStack, generator: ICloudGenerator, seed: int):
        """Aktivasi seluruh layer untuk cloud evaluasi; list (cloud, activations)"""
        feature_model = make_feature_model(self.config.evaluation.feature_model)
        eval_seed = derive_seed(seed, STREAM_EVAL)
        channels = stack.layers[0].in_channels
        results = []
        for k in range(self.config.evaluation.clouds):
            cloud = generator.generate(derive_seed(eval_seed, k))
            features = feature_model.sample(cloud.n, channels, eval_seed, k)
            results.append((cloud, stack_forward(stack, cloud, features)))
        return results

    def _save_plotted(self, frame: pd.DataFrame, name: str, kind: str) -> str:
        path = self.storage.save_frame(frame, name)
        if self.config.plot:
            self.storage.record(emit_plot(path, kind))
        return path

    def _profile(self, stack: ConvStack, generator: ICloudGenerator, seed: int):
        evaluated = self._evaluate(stack, generator, seed)
        return layer_variance_profile([activations[1:] for _, activations in evaluated])

    def _profile_summary(self, analyzer: VarianceProfileAnalyzer) -> Dict[str, Any]:
        profile = analyzer.analyze()
        target = self.config.init.target_variance
        return {
            "depth": len(profile.entries),
            "final_variance": float(profile.variances[-1]),
            "max_deviation_factor": analyzer.max_deviation(target),
        }

    # eksperimen

    def _run_variance_profile(self) -> Dict[str, Any]:
        generator = make_generator(self.config.generator)
        analyzer = VarianceProfileAnalyzer()
        for index, seed in enumerate(self.seeds):
            stack, table = self._initialize(build_stack(self.config.stack, seed), generator, seed)
            if index == 0:
                if table is not None and self.config.init.scheme == "variance_aware_direct":
                    self.storage.save_ztable(table)
                if self.config.save_stack:
                    self.storage.save_stack(stack)
            analyzer.update(self._profile(stack, generator, seed))
            self.logger.info(f"Seed {seed}: profil variance selesai")

        self._save_plotted(profile_to_frame(analyzer.analyze()), "variance_profile.csv", "line_log_y")
        return self._profile_summary(analyzer)

    def _correlogram_spacing(self) -> float:
        if self.config.correlogram.spacing is not None:
            return self.config.correlogram.spacing
        basis = self.config.stack.basis
        return basis.kernel_radius or self.config.stack.radius * ExperimentDefaults.KERNEL_RADIUS_RATIO

    def _run_correlogram(self) -> Dict[str, Any]:
        generator = make_generator(self.config.generator)
        layers = self.config.correlogram.layers
        edges = default_bin_edges(self._correlogram_spacing(), self.config.correlogram.bins)
        analyzers = {depth: CorrelogramAnalyzer(depth) for depth in layers}

        for seed in self.seeds:
            stack, _ = self._initialize(build_stack(self.config.stack, seed), generator, seed)
            for cloud, activations in self._evaluate(stack, generator, seed):
                for depth in layers:
                    # correlogram hanya untuk layer pada level cloud input
                    if depth > 0 and stack.layers[depth - 1].level_out != 0:
                        raise InvalidArgumentError(f"layer {depth} tidak berada di level 0")
                    analyzers[depth].update(correlogram(cloud, activations[depth], edges, depth))

        nearest = {}
        for depth in layers:
            result = analyzers[depth].analyze()
            self._save_plotted(correlogram_to_frame(result), f"correlogram_layer_{depth:02d}.csv", "line")
            nearest[str(depth)] = result.r[0]
        return {"nearest_bin_r": nearest, "bin_width": float(edges[1] - edges[0])}

    def _run_compute_ztable(self) -> Dict[str, Any]:
        generator = make_generator(self.config.generator)
        stack = build_stack(self.config.stack, self.config.seed)
        stack, table = self._initialize(stack, generator, self.config.seed)
        self.storage.save_ztable(table)
        if self.config.save_stack:
            self.storage.save_stack(stack)
        z = np.array([entry.z for entry in table.entries])
        return {"depth": table.depth, "z_min": float(z.min()), "z_max": float(z.max())}

    def _run_transfer_check(self) -> Dict[str, Any]:
        source = make_generator(self.config.generator)
        target = make_generator(self.config.transfer_generator)
        given = self._load_table(self.config.init.table) if self.config.init.table else None
        analyzer = VarianceProfileAnalyzer()

        for index, seed in enumerate(self.seeds):
            stack = build_stack(self.config.stack, seed)
            table = given
            if table is None:
                plan = self._plan(seed, "variance_aware_direct")
                feature_model = make_feature_model(self.config.init.feature_model)
                _, table = variance_aware_init(stack, source, self.config.init.sample_count, plan, feature_model)
                if index == 0:
                    self.storage.save_ztable(table)
            transferred = transfer_init(stack, table, self._plan(seed, "variance_aware_transfer"))
            analyzer.update(self._profile(transferred, target, seed))

        self._save_plotted(profile_to_frame(analyzer.analyze()), "transfer_variance_profile.csv", "line_log_y")
        return self._profile_summary(analyzer)

    def _run_discrete_equivalence(self) -> Dict[str, Any]:
        discrete = self.config.discrete
        rng = make_rng(self.config.seed, STREAM_IMAGES)
        rows = []
        for index in range(discrete.images):
            image = rng.standard_normal((discrete.size, discrete.size, discrete.channels))
            kernel = rng.standard_normal((3, 3, discrete.channels))
            reference = discrete_conv_reference(image, kernel)[1:-1, 1:-1]
            computed = point_conv_image(image, kernel)[1:-1, 1:-1]
            abs_error = float(np.max(np.abs(computed - reference)))
            rel_error = abs_error / max(float(np.max(np.abs(reference))), np.finfo(np.float64).tiny)
            rows.append(
                {
                    "image": index,
                    "max_abs_error": abs_error,
                    "max_rel_error": rel_error,
                    "passed": rel_error <= discrete.tolerance,
                }
            )

        frame = pd.DataFrame(rows, columns=["image", "max_abs_error", "max_rel_error", "passed"])
        self.storage.save_frame(frame, "discrete_check.csv")
        passed = bool(frame["passed"].all())
        if not passed:
            self.logger.error(f"Reduksi diskrit gagal pada {int((~frame['passed']).sum())} image")
        return {"passed": passed, "max_rel_error": float(frame["max_rel_error"].max())}
