import json

import numpy as np
import pytest

from nearline.baselines import BaselineConfig, train_pca
from nearline.data import SplitSpec
from nearline.evaluate import run_experiment
from nearline.model_io import (
    atomic_write_text,
    config_from_dict,
    config_to_dict,
    load_model,
    model_to_dict,
    report_csv,
    report_json,
    save_model,
)
from nearline.nlp import TrainConfig, project, train
from nearline.synthetic import gaussian_blobs


class TestModelFile:
    def test_schema_fields(self, tmp_path):
        ds = gaussian_blobs(n_per_class=10, n_classes=2, d=6, seed=0)
        model = train(ds, TrainConfig(K=3, d_prime=2))
        path = tmp_path / "model.json"
        save_model(model, path)
        payload = json.loads(path.read_text())
        assert set(payload) == {
            "schema_version",
            "d",
            "d_prime",
            "mean_vector",
            "projection_columns",
            "train_config",
            "objective_trace",
        }
        assert payload["schema_version"] == 1
        assert payload["d"] == 6 and payload["d_prime"] == 2
        assert len(payload["projection_columns"]) == 2
        assert all(len(col) == 6 for col in payload["projection_columns"])

    def test_columns_are_column_major(self):
        ds = gaussian_blobs(n_per_class=10, n_classes=2, d=5, seed=1)
        model = train(ds, TrainConfig(K=3, d_prime=2))
        payload = model_to_dict(model)
        for c in range(2):
            assert payload["projection_columns"][c] == model.projection[:, c].tolist()

    def test_round_trip(self, tmp_path):
        ds = gaussian_blobs(n_per_class=10, n_classes=2, d=6, seed=2)
        cfg = TrainConfig(K=3, d_prime=2, max_iters=20, rel_tol=1e-5, seed=9)
        model = train(ds, cfg)
        path = tmp_path / "model.json"
        save_model(model, path)
        loaded = load_model(path)
        assert np.array_equal(loaded.projection, model.projection)
        assert np.array_equal(loaded.mean_vector, model.mean_vector)
        assert loaded.config == cfg
        assert loaded.objective_trace == model.objective_trace
        x = np.arange(6.0)
        assert np.array_equal(project(loaded, x), project(model, x))

    def test_round_trip_baseline_config(self, tmp_path):
        ds = gaussian_blobs(n_per_class=10, n_classes=2, d=6, seed=3)
        model = train_pca(ds, 3)
        path = tmp_path / "pca.json"
        save_model(model, path)
        assert load_model(path).config == BaselineConfig("pca", 3)

    def test_rejects_unknown_schema_version(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"schema_version": 99}))
        with pytest.raises(ValueError, match="schema_version"):
            load_model(path)

    def test_rejects_inconsistent_columns(self, tmp_path):
        ds = gaussian_blobs(n_per_class=10, n_classes=2, d=6, seed=4)
        model = train(ds, TrainConfig(K=3, d_prime=2))
        payload = model_to_dict(model)
        payload["d_prime"] = 3
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(payload))
        with pytest.raises(ValueError, match="projection_columns"):
            load_model(path)


class TestConfigDicts:
    @pytest.mark.parametrize(
        "config",
        [
            TrainConfig(K=5, d_prime=10, max_iters=30, rel_tol=1e-7, eigen_order="largest", init="identity", seed=4, center=False),
            BaselineConfig("pca", 7),
            BaselineConfig("lpp", 4, K=9, heat_sigma=0.5),
        ],
    )
    def test_round_trip(self, config):
        assert config_from_dict(config_to_dict(config)) == config

    def test_unknown_method_rejected(self):
        with pytest.raises(ValueError, match="unknown method"):
            config_from_dict({"method": "umap"})


class TestReports:
    def make_report(self):
        ds = gaussian_blobs(n_per_class=10, n_classes=2, d=6, seed=5)
        return run_experiment(ds, BaselineConfig("pca", 2), SplitSpec(0.5, 7, repeats=4))

    def test_json_is_canonical(self):
        a, b = self.make_report(), self.make_report()
        assert report_json(a) == report_json(b)

    def test_csv_one_row_per_repeat(self):
        report = self.make_report()
        lines = report_csv(report).strip().split("\n")
        assert lines[0] == "method,repeat,accuracy"
        assert len(lines) == 1 + 4
        assert lines[1].startswith("pca,0,")

    def test_json_carries_report_fields(self):
        payload = json.loads(report_json(self.make_report()))
        assert set(payload) == {
            "per_repeat_accuracy",
            "mean_accuracy",
            "std_accuracy",
            "method",
            "config_snapshot",
            "per_class_accuracy",
        }
        assert payload["config_snapshot"]["split"]["repeats"] == 4


class TestAtomicWrite:
    def test_no_temp_residue_on_success(self, tmp_path):
        target = tmp_path / "out.txt"
        atomic_write_text(target, "hello")
        assert target.read_text() == "hello"
        assert [p.name for p in tmp_path.iterdir()] == ["out.txt"]

    def test_missing_directory_leaves_nothing(self, tmp_path):
        target = tmp_path / "nodir" / "out.txt"
        with pytest.raises(OSError):
            atomic_write_text(target, "hello")
        assert not target.exists()

    def test_overwrite_is_atomic_replacement(self, tmp_path):
        target = tmp_path / "out.txt"
        atomic_write_text(target, "first")
        atomic_write_text(target, "second")
        assert target.read_text() == "second"
        assert [p.name for p in tmp_path.iterdir()] == ["out.txt"]
