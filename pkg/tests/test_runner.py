import hashlib
import json
import os

import pytest

from main import PointConvInitApp, main
from src.config.defaults import ExperimentDefaults
from src.config.experiment import ExperimentConfig
from src.core.errors import ConfigValidationError
from src.experiments.runner import ExperimentRunner
from src.storage.file_storage import FileStorage


def _small(experiment="variance_profile", **extra):
    data = {
        "experiment": experiment,
        "seed": 3,
        "stack": {
            "dim": 2,
            "depth": 2,
            "channels": 2,
            "radius": 0.2,
            "estimator": "mc",
            "basis": {"layout": "grid", "size": 3},
        },
        "generator": {"kind": "uniform", "dim": 2, "n": 200},
        "init": {"sample_count": 2},
        "evaluation": {"clouds": 1},
    }
    data.update(extra)
    return data


def _write_config(tmp_path, data, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def _sha256(path):
    with open(path, "rb") as f:
        return hashlib.sha256(f.read()).hexdigest()


def _run(data, directory):
    runner = ExperimentRunner(ExperimentConfig.from_dict(data), FileStorage(directory))
    return runner.run(), runner.storage


def test_discrete_equivalence(output_dir):
    manifest, storage = _run({"experiment": "discrete_equivalence"}, output_dir)
    assert manifest.summary["passed"]
    assert manifest.summary["max_rel_error"] <= 1e-12
    assert os.path.exists(storage.path("discrete_check.csv"))
    with open(storage.path("manifest.json")) as f:
        written = json.load(f)
    assert written["experiment"] == "discrete_equivalence"
    assert [record["path"] for record in written["outputs"]] == ["discrete_check.csv"]


def test_variance_profile_outputs(output_dir):
    manifest, storage = _run(_small(), output_dir)
    for name in ("variance_profile.csv", "variance_profile.svg", "ztable.json", "manifest.json"):
        assert os.path.exists(storage.path(name))
    assert manifest.summary["depth"] == 2
    assert manifest.seeds == [3]

    frame = storage.load_frame(storage.path("variance_profile.csv"), ["layer", "variance", "n"])
    assert frame["layer"].tolist() == [1, 2]
    assert (frame["variance"] > 0).all()


def test_variance_profile_deterministic(tmp_path):
    first, _ = _run(_small(), str(tmp_path / "a"))
    second, _ = _run(_small(), str(tmp_path / "b"))
    for name in ("variance_profile.csv", "variance_profile.svg", "ztable.json"):
        assert _sha256(tmp_path / "a" / name) == _sha256(tmp_path / "b" / name)
    assert first.summary == second.summary


def test_sphere_exact_density_cached(output_dir):
    data = _small(
        stack={"dim": 3, "depth": 3, "channels": 2, "radius": 0.3, "preset": "pccnn", "basis": {"size": 4}},
        generator={"kind": "sphere", "dim": 3, "n": 200, "density": "exact"},
        init={"sample_count": 2, "resample_clouds": False},
        plot=False,
    )
    manifest, storage = _run(data, output_dir)
    with open(storage.path("ztable.json")) as f:
        meta = json.load(f)["meta"]
    assert meta["generator"]["kind"] == "sphere"
    assert meta["generator"]["density"] == "exact"
    assert meta["resample_clouds"] is False
    assert manifest.summary["depth"] == 3


def test_standard_init_writes_no_table(output_dir):
    _, storage = _run(_small(init={"scheme": "standard"}, plot=False), output_dir)
    assert not os.path.exists(storage.path("ztable.json"))
    assert not os.path.exists(storage.path("variance_profile.svg"))


def test_correlogram_outputs(output_dir):
    data = _small("correlogram", correlogram={"layers": [0, 2], "bins": 4, "spacing": 0.05}, plot=False)
    manifest, storage = _run(data, output_dir)
    assert os.path.exists(storage.path("correlogram_layer_00.csv"))
    assert os.path.exists(storage.path("correlogram_layer_02.csv"))
    assert set(manifest.summary["nearest_bin_r"]) == {"0", "2"}
    assert manifest.summary["bin_width"] == pytest.approx(0.05)


def test_transfer_check(output_dir):
    data = _small(
        "transfer_check",
        transfer={"generator": {"kind": "clustered", "dim": 2, "n": 200, "cluster_count": 4, "spread": 0.1}},
    )
    manifest, storage = _run(data, output_dir)
    assert os.path.exists(storage.path("transfer_variance_profile.csv"))
    assert os.path.exists(storage.path("ztable.json"))
    assert manifest.summary["depth"] == 2


def test_compute_then_apply(tmp_path, monkeypatch):
    compute_dir = tmp_path / "compute"
    _, storage = _run(_small("compute_ztable"), str(compute_dir))
    table_path = storage.path("ztable.json")

    monkeypatch.setenv(ExperimentDefaults.OUTPUT_DIR_ENV, str(tmp_path / "apply"))
    config_path = _write_config(tmp_path, _small())
    code = main(["ztable", "apply", "--config", config_path, "--table", table_path])
    assert code == ExperimentDefaults.EXIT_OK
    assert (tmp_path / "apply" / "stack.json").exists()
    assert (tmp_path / "apply" / "variance_profile.csv").exists()
    assert not (tmp_path / "apply" / "ztable.json").exists()


def test_apply_invalid_table(tmp_path, monkeypatch):
    monkeypatch.setenv(ExperimentDefaults.OUTPUT_DIR_ENV, str(tmp_path / "apply"))
    table = tmp_path / "ztable.json"
    table.write_text(json.dumps({"schema_version": 1, "entries": [{"depth": 1, "z": -1.0}]}))
    config_path = _write_config(tmp_path, _small())
    code = main(["ztable", "apply", "--config", config_path, "--table", str(table)])
    assert code == ExperimentDefaults.EXIT_INVALID


class TestMain:
    def test_check_discrete(self, tmp_path, monkeypatch):
        monkeypatch.setenv(ExperimentDefaults.OUTPUT_DIR_ENV, str(tmp_path))
        assert main(["check", "discrete"]) == ExperimentDefaults.EXIT_OK
        assert (tmp_path / "discrete_check.csv").exists()
        assert (tmp_path / "manifest.json").exists()

    def test_bad_config(self, tmp_path, monkeypatch):
        monkeypatch.setenv(ExperimentDefaults.OUTPUT_DIR_ENV, str(tmp_path))
        data = _small()
        data["stack"]["radius"] = -1.0
        assert main(["variance", "--config", _write_config(tmp_path, data)]) == ExperimentDefaults.EXIT_CONFIG

    def test_wrong_subcommand(self, tmp_path, monkeypatch):
        monkeypatch.setenv(ExperimentDefaults.OUTPUT_DIR_ENV, str(tmp_path))
        config_path = _write_config(tmp_path, _small())
        assert main(["correlogram", "--config", config_path]) == ExperimentDefaults.EXIT_CONFIG

    def test_missing_config_file(self, tmp_path):
        assert main(["variance", "--config", str(tmp_path / "missing.json")]) == ExperimentDefaults.EXIT_CONFIG

    def test_plot(self, tmp_path):
        csv_path = tmp_path / "variance_profile.csv"
        csv_path.write_text("layer,variance,n\n1,1,10\n2,0.5,10\n")
        assert main(["plot", "--csv", str(csv_path), "--kind", "line_log_y"]) == ExperimentDefaults.EXIT_OK
        assert (tmp_path / "variance_profile.svg").exists()

    def test_plot_unknown_csv(self, tmp_path):
        csv_path = tmp_path / "other.csv"
        csv_path.write_text("a,b\n1,2\n")
        assert main(["plot", "--csv", str(csv_path)]) == ExperimentDefaults.EXIT_INVALID


class TestLoadConfig:
    def test_overrides(self, tmp_path):
        app = PointConvInitApp()
        path = _write_config(tmp_path, _small())
        config = app.load_config("variance", path, {"seed": 9, "init.scheme": "standard"})
        assert config.seed == 9
        assert config.init.scheme == "standard"
        assert config.init.sample_count == 2

    def test_override_creates_section(self, tmp_path):
        data = _small()
        del data["init"]
        config = PointConvInitApp().load_config("variance", _write_config(tmp_path, data), {"init.gain": 2.0})
        assert config.init.gain == 2.0

    def test_default_experiment(self):
        config = PointConvInitApp().load_config("check discrete", None, {})
        assert config.experiment == "discrete_equivalence"

    def test_experiment_not_allowed(self, tmp_path):
        path = _write_config(tmp_path, _small("correlogram"))
        with pytest.raises(ConfigValidationError) as excinfo:
            PointConvInitApp().load_config("ztable compute", path, {})
        assert excinfo.value.field == "experiment"
