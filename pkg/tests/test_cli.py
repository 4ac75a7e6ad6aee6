import json

import pytest

from cli.app import run, EXIT_OK, EXIT_INVALID
from config.settings import PredictorConfig
from predictor import DSPredictor
from services.search_space import random_genotype

QUICK_CONFIG = """\
PIDS_SEED=1
PIDS_NETWORK__BASE_CELL=0.1
PIDS_NETWORK__MAX_NEIGHBORS=16
PIDS_TRAIN__EPOCHS=2
PIDS_TRAIN__PRETRAIN_EPOCHS=1
PIDS_TRAIN__BATCH_SIZE=16
PIDS_PREDICTOR__DIM=8
PIDS_EVOLUTION__POPULATION=6
PIDS_EVOLUTION__SAMPLE_SIZE=3
PIDS_EVOLUTION__ROUNDS=5
PIDS_EVOLUTION__TOP_K=2
PIDS_EVOLUTION__RANDOM_BUDGET=8
PIDS_ORACLE__N_SAMPLES=40
"""


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "run.env"
    path.write_text(QUICK_CONFIG)
    return path


def _run(capsys, *argv):
    code = run(list(argv))
    lines = capsys.readouterr().out.strip().splitlines()
    return code, json.loads(lines[-1])


class TestSimpleCommands:

    def test_disposition(self, capsys, tmp_path):
        code, out = _run(capsys, "--out", str(tmp_path), "disposition", "--kind", "icosa", "--radius", "2")
        assert code == EXIT_OK
        assert out["rows"] == 13
        rows = (tmp_path / "disposition_icosa.csv").read_text().strip().splitlines()
        assert len(rows) == 13
        assert (tmp_path / "resolved_config.json").exists()

    @pytest.mark.parametrize("kind, rows", [("tetra", 5), ("octa", 7)])
    def test_disposition_rows(self, capsys, tmp_path, kind, rows):
        code, out = _run(capsys, "--out", str(tmp_path), "disposition", "--kind", kind)
        assert code == EXIT_OK
        assert len((tmp_path / f"disposition_{kind}.csv").read_text().strip().splitlines()) == rows

    def test_cost_of_hand_crafted(self, capsys, tmp_path):
        code, out = _run(capsys, "--out", str(tmp_path), "cost", "--hand-crafted", "first")
        assert code == EXIT_OK
        assert out["report"]["params"] == 986016
        assert json.loads((tmp_path / "cost_report.json").read_text())["params"] == 986016

    def test_forward_synthetic(self, capsys, tmp_path, config_file):
        code, out = _run(
            capsys, "--config", str(config_file), "--out", str(tmp_path),
            "forward", "--hand-crafted", "second", "--synthetic", "300"
        )
        assert code == EXIT_OK
        assert out["shape"] == [300, 19]
        assert out["finite"]
        assert (tmp_path / "weights.bin").stat().st_size > 0


class TestInvalidInput:

    def test_unknown_config_key(self, capsys, tmp_path):
        config = tmp_path / "bad.env"
        config.write_text("PIDS_BOGUS=1\n")
        code, out = _run(capsys, "--config", str(config), "--out", str(tmp_path), "disposition", "--kind", "tetra")
        assert code == EXIT_INVALID
        assert "error" in out

    def test_missing_config_file(self, capsys, tmp_path):
        code, _ = _run(capsys, "--config", str(tmp_path / "absent.env"), "disposition", "--kind", "tetra")
        assert code == EXIT_INVALID

    def test_malformed_genotype(self, capsys, tmp_path):
        path = tmp_path / "g.json"
        path.write_text('{"v": 1, "stages": [')
        code, _ = _run(capsys, "--out", str(tmp_path), "cost", "--genotype", str(path))
        assert code == EXIT_INVALID

    def test_out_of_space_genotype(self, capsys, tmp_path, space, config_file):
        path = tmp_path / "g.json"
        path.write_text(random_genotype(space, 0).replace_stage(3, width=33).to_json())
        code, _ = _run(
            capsys, "--config", str(config_file), "--out", str(tmp_path),
            "forward", "--genotype", str(path), "--synthetic", "100"
        )
        assert code == EXIT_INVALID

    def test_zero_depth_stage(self, capsys, tmp_path, space):
        data = random_genotype(space, 0).to_dict()
        data["stages"][2]["depth"] = 0
        path = tmp_path / "g.json"
        path.write_text(json.dumps(data))
        code, out = _run(capsys, "--out", str(tmp_path), "cost", "--genotype", str(path))
        assert code == EXIT_INVALID
        assert "depth" in out["error"]

    def test_genotype_required(self, capsys, tmp_path):
        code, _ = _run(capsys, "--out", str(tmp_path), "cost")
        assert code == EXIT_INVALID


class TestPipeline:

    def test_dataset_to_search(self, capsys, tmp_path, config_file):
        base = ["--config", str(config_file), "--out", str(tmp_path)]

        code, out = _run(capsys, *base, "gen-dataset")
        assert code == EXIT_OK
        assert (out["n"], out["n_train"], out["n_val"]) == (40, 32, 8)
        dataset = out["outputs"]["dataset"]

        code, out = _run(capsys, *base, "train-predictor", "--dataset", dataset)
        assert code == EXIT_OK
        assert out["n_parameters"] == DSPredictor.from_config(PredictorConfig(dim=8)).n_parameters()
        assert len(json.loads((tmp_path / "loss_curve.json").read_text())["loss"]) == 2

        code, out = _run(capsys, *base, "eval-predictor", "--dataset", dataset)
        assert code == EXIT_OK
        assert -1.0 <= out["kendall_tau"] <= 1.0

        code, out = _run(capsys, *base, "search")
        assert code == EXIT_OK
        history = (tmp_path / "history.jsonl").read_text().splitlines()
        assert len(history) == 6 + 5
        assert json.loads((tmp_path / "best_genotype.json").read_text()) == out["best_genotype"]

        code, out = _run(capsys, *base, "random-search", "--budget", "4")
        assert code == EXIT_OK
        assert len((tmp_path / "history.jsonl").read_text().splitlines()) == 4
        assert len(out["top_objectives"]) == 2

    def test_compare_predictors(self, capsys, tmp_path, config_file):
        base = ["--config", str(config_file), "--out", str(tmp_path)]
        _, out = _run(capsys, *base, "gen-dataset", "--n", "30")
        code, out = _run(capsys, *base, "compare-predictors", "--dataset", out["outputs"]["dataset"], "--seeds", "0", "1")
        assert code == EXIT_OK
        report = json.loads((tmp_path / "predictor_comparison.json").read_text())
        assert report["seeds"] == [0, 1]
        assert all(len(taus) == 2 for taus in report["kendall_tau"].values())


class TestReproducibility:

    @pytest.mark.parametrize("command, artifacts", [
        (["gen-dataset", "--n", "25"], ["dataset.jsonl", "oracle.json"]),
        (["forward", "--hand-crafted", "first", "--synthetic", "200"], ["logits.csv", "weights.bin"]),
    ])
    def test_rerun_is_byte_identical(self, capsys, tmp_path, config_file, command, artifacts):
        for name in ("a", "b"):
            code, _ = _run(capsys, "--config", str(config_file), "--out", str(tmp_path / name), *command)
            assert code == EXIT_OK
        for artifact in artifacts:
            assert (tmp_path / "a" / artifact).read_bytes() == (tmp_path / "b" / artifact).read_bytes()

    def test_seed_flag_changes_output(self, capsys, tmp_path, config_file):
        for name, seed in (("a", "1"), ("b", "2")):
            _run(capsys, "--config", str(config_file), "--seed", seed, "--out", str(tmp_path / name),
                 "gen-dataset", "--n", "5")
        assert (tmp_path / "a" / "dataset.jsonl").read_bytes() != (tmp_path / "b" / "dataset.jsonl").read_bytes()

    def test_training_twice_gives_identical_checkpoint(self, capsys, tmp_path, config_file):
        base = ["--config", str(config_file), "--out", str(tmp_path)]
        _, out = _run(capsys, *base, "gen-dataset", "--n", "30")
        dataset = out["outputs"]["dataset"]
        digests = []
        for name in ("a.ckpt", "b.ckpt"):
            code, out = _run(capsys, *base, "train-predictor", "--dataset", dataset, "--checkpoint", str(tmp_path / name))
            assert code == EXIT_OK
            digests.append((tmp_path / name).read_bytes())
        assert digests[0] == digests[1]
