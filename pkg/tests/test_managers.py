import numpy as np
import pytest

from config.settings import EvolutionConfig
from constants import PredictorMode
from evolution import RegularizedEvolution
from exceptions import ParseError
from predictor import DSPredictor
from services.checkpoint_manager import checkpoint_manager
from services.dataset_manager import dataset_manager
from services.search_space import encode_features, random_genotype


class TestCheckpointManager:

    @pytest.mark.parametrize("mode", list(PredictorMode))
    def test_save_then_load_predicts_identically(self, tmp_path, space, mode):
        p = DSPredictor(mode, vocab=space.vocab_size, dim=8, seed=3)
        # f32 storage; start from representable values so predictions match exactly
        for name in p.params:
            p.params[name] = p.params[name].astype(np.float32).astype(np.float64)
        p.target_mean, p.target_std = 0.4, 0.2

        path = checkpoint_manager.save(p, tmp_path / "p.ckpt")
        loaded = checkpoint_manager.load(path)
        archs = [encode_features(random_genotype(space, s), space) for s in range(6)]

        assert loaded.mode == mode
        assert (loaded.target_mean, loaded.target_std) == (0.4, 0.2)
        np.testing.assert_array_equal(loaded.predict_batch(archs), p.predict_batch(archs))

    def test_truncated(self, tmp_path, space):
        path = checkpoint_manager.save(DSPredictor(vocab=space.vocab_size, dim=4), tmp_path / "p.ckpt")
        path.write_bytes(path.read_bytes()[:-8])
        with pytest.raises(ParseError, match="Truncated"):
            checkpoint_manager.load(path)

    def test_trailing_bytes(self, tmp_path, space):
        path = checkpoint_manager.save(DSPredictor(vocab=space.vocab_size, dim=4), tmp_path / "p.ckpt")
        path.write_bytes(path.read_bytes() + b"\x00" * 4)
        with pytest.raises(ParseError, match="trailing"):
            checkpoint_manager.load(path)

    def test_garbage_header(self, tmp_path):
        path = tmp_path / "bad.ckpt"
        path.write_bytes(np.array([5], dtype="<u4").tobytes() + b"hello")
        with pytest.raises(ParseError):
            checkpoint_manager.load(path)

    def test_cache(self, tmp_path, space):
        path = checkpoint_manager.save(DSPredictor(vocab=space.vocab_size, dim=4), tmp_path / "p.ckpt")
        loaded = checkpoint_manager.load(path)
        assert checkpoint_manager.load(path, use_cache=True) is loaded
        assert checkpoint_manager.load(path) is not loaded


class TestDatasetManager:

    def test_round_trip(self, tmp_path, small_dataset):
        path = dataset_manager.save_dataset(small_dataset, tmp_path / "data.jsonl")
        assert len(path.read_text().splitlines()) == len(small_dataset)
        dataset_manager.clear()
        assert dataset_manager.load_dataset(path) == small_dataset

    def test_rewrite_is_byte_identical(self, tmp_path, small_dataset):
        a = dataset_manager.save_dataset(small_dataset, tmp_path / "a.jsonl")
        b = dataset_manager.save_dataset(small_dataset, tmp_path / "b.jsonl")
        assert a.read_bytes() == b.read_bytes()

    def test_bad_line_reports_line_number(self, tmp_path, small_dataset):
        path = dataset_manager.save_dataset(small_dataset[:3], tmp_path / "data.jsonl")
        lines = path.read_text().splitlines()
        lines[1] = lines[1].replace('"perf"', '"score"')
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(ParseError) as info:
            dataset_manager.load_dataset(path, use_cache=False)
        assert info.value.line == 2

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            dataset_manager.load_dataset(tmp_path / "absent.jsonl")

    def test_history(self, tmp_path, space):
        search = RegularizedEvolution(
            lambda gs: np.linspace(0.0, 1.0, len(gs)),
            space=space,
            cost=lambda g: 10 ** 9,
            cfg=EvolutionConfig(population=4, sample_size=2, rounds=3)
        )
        path = dataset_manager.save_history(search.run_evolution().history, tmp_path / "history.jsonl")
        assert len(path.read_text().splitlines()) == 7
