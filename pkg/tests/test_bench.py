import numpy as np
import pytest

from config.settings import OracleConfig
from constants import Facet
from exceptions import InvalidArgumentError
from models.oracle import SyntheticOracle
from services.bench import _components, make_oracle, synthetic_perf, generate_dataset, split_dataset
from services.cost_model import network_cost
from services.search_space import encode_features, random_genotype


class TestOracle:

    def test_same_seed_same_tables(self):
        a = make_oracle(OracleConfig(seed=11))
        b = make_oracle(OracleConfig(seed=11))
        np.testing.assert_array_equal(a.linear, b.linear)
        np.testing.assert_array_equal(a.bonus, b.bonus)
        np.testing.assert_array_equal(a.cross, b.cross)
        assert (a.scale, a.offset) == (b.scale, b.offset)

    def test_different_seed_different_tables(self):
        a = make_oracle(OracleConfig(seed=1))
        b = make_oracle(OracleConfig(seed=2))
        assert not np.array_equal(a.linear, b.linear)

    def test_table_shapes(self, oracle, space):
        assert oracle.linear.shape == (33,)
        assert oracle.bonus.shape == (space.vocab_size,)
        assert oracle.cross.shape == (space.vocab_size, 1)
        assert oracle.cross_dense.shape == (1, 33)

    def test_cross_rank(self, space):
        oracle = make_oracle(OracleConfig(seed=2, cross_rank=3), space)
        assert oracle.cross.shape == (space.vocab_size, 3)
        assert oracle.cross_dense.shape == (3, 33)

    def test_cross_token_factors_cancel_per_slot(self, oracle, space):
        for s, stage in enumerate(space.stages):
            for facet in (Facet.KERNEL, Facet.ORDER):
                tokens = [space.token_id(stage.index, facet, option) for option in stage.options(facet)]
                np.testing.assert_allclose(oracle.cross[tokens].sum(axis=0), 0.0, atol=1e-12)

    def test_component_shares(self, oracle, space):
        rng = np.random.default_rng(0)
        encoded = [encode_features(random_genotype(space, rng), space) for _ in range(2000)]
        parts = np.array([_components(oracle, e.dense, e.tokens) for e in encoded])
        shares = parts.var(axis=0) / parts.sum(axis=1).var()
        # calibration set differs from this draw
        np.testing.assert_allclose(shares, [0.45, 0.25, 0.30], atol=0.05)

    def test_dict_round_trip_scores_identically(self, oracle, space):
        restored = SyntheticOracle.from_dict(oracle.to_dict())
        for seed in range(5):
            g = random_genotype(space, seed)
            assert synthetic_perf(restored, g, space) == synthetic_perf(oracle, g, space)


class TestSyntheticPerf:

    def test_deterministic(self, oracle, space):
        g = random_genotype(space, 9)
        assert synthetic_perf(oracle, g, space) == synthetic_perf(oracle, g, space)

    def test_distribution(self, oracle, space):
        rng = np.random.default_rng(0)
        scores = np.array([synthetic_perf(oracle, random_genotype(space, rng), space) for _ in range(1000)])
        assert scores.min() >= 0.0 and scores.max() <= 1.0
        assert scores.std() > 0.05

    def test_zero_weight_facet(self, space):
        stage = 3
        oracle = make_oracle(OracleConfig(seed=4), space, zero_facets=[(stage, Facet.KERNEL)])
        g = random_genotype(space, 2)
        for kernel in space.stages[stage].kernels:
            other = g.replace_stage(stage, kernel=kernel)
            assert synthetic_perf(oracle, other, space) == synthetic_perf(oracle, g, space)

    def test_zero_weight_dense_facet(self, space):
        stage = 4
        oracle = make_oracle(OracleConfig(seed=4), space, zero_facets=[(stage, Facet.DEPTH)])
        g = random_genotype(space, 5)
        scores = {synthetic_perf(oracle, g.replace_stage(stage, depth=d), space) for d in space.stages[stage].depths}
        assert len(scores) == 1

    def test_other_facets_matter(self, oracle, space):
        g = random_genotype(space, 2)
        scores = {synthetic_perf(oracle, g.replace_stage(3, kernel=k), space) for k in space.stages[3].kernels}
        assert len(scores) > 1

    def test_noise_is_bounded(self, space):
        quiet = make_oracle(OracleConfig(seed=6, noise_amplitude=0.0), space)
        noisy = make_oracle(OracleConfig(seed=6, noise_amplitude=0.01), space)
        g = random_genotype(space, 1)
        # expit has slope at most 1/4
        assert abs(synthetic_perf(noisy, g, space) - synthetic_perf(quiet, g, space)) <= 0.0025 + 1e-12


class TestDataset:

    def test_samples_carry_cost(self, small_dataset):
        assert len(small_dataset) == 120
        sample = small_dataset[0]
        report = network_cost(sample.genotype)
        assert (sample.macs, sample.params) == (report.macs, report.params)
        assert 0.0 <= sample.perf <= 1.0

    def test_seeded(self, oracle):
        a = generate_dataset(oracle, n=10, seed=8)
        b = generate_dataset(oracle, n=10, seed=8)
        assert a == b

    def test_rejects_empty(self, oracle):
        with pytest.raises(InvalidArgumentError):
            generate_dataset(oracle, n=0)

    def test_split_by_index(self, small_dataset):
        train_set, val_set = split_dataset(small_dataset, 0.8)
        assert len(train_set) == 96 and len(val_set) == 24
        assert train_set + val_set == small_dataset
