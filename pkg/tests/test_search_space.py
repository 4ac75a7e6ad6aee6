import itertools

import numpy as np
import pytest
from pydantic import ValidationError as SchemaValidationError

from constants import STAGE_CONFIGS, DispositionKind, InteractionOrder, Facet, Stride
from exceptions import ValidationError
from models.genotype import Genotype
from models.search_space import StageOptions
from services.search_space import (
    build_space,
    random_genotype,
    mutate,
    mutate_with_info,
    validate_genotype,
    ensure_valid,
    encode_features,
    decode_features,
    cardinality,
    hand_crafted,
    hand_crafted_first_order,
)

# Product of per-stage option counts of the default table
DEFAULT_CARDINALITY = 499751156776108032


def _differences(a: Genotype, b: Genotype):
    return [
        (s, facet)
        for s, (ga, gb) in enumerate(zip(a.stages, b.stages))
        for facet in Facet
        if getattr(ga, facet.value) != getattr(gb, facet.value)
    ]


class TestDefaultSpace:

    def test_option_table(self, space):
        stage_1, stage_4, stage_6, stage_7, stage_11 = (space.stages[i] for i in (0, 3, 5, 6, 10))
        assert (stage_1.depths, stage_1.expansions, stage_1.widths) == ((1,), (1.0,), (16,))
        assert stage_1.orders == (InteractionOrder.FIRST,)
        assert stage_4.depths == (3, 4, 5) and stage_4.widths == (24, 32, 40)
        assert stage_6.widths == (64, 80, 96)
        assert stage_7.widths == (160,)
        assert stage_11.orders == (InteractionOrder.FIRST,)
        assert all(stage.expansions == (2.0, 3.0) for stage in space.stages[7:])

    def test_strides_and_hierarchy(self, space):
        assert space.strides == [
            Stride.ONE, Stride.TWO, Stride.TWO, Stride.TWO, Stride.ONE, Stride.TWO, Stride.ONE,
            Stride.UP2, Stride.UP2, Stride.UP2, Stride.UP2,
        ]
        assert [s.hierarchy for s in space.stages].count("backbone") == 7

    def test_vocabulary_is_position_specific(self, space):
        assert space.vocab_size == 52
        octa_tokens = {space.token_id(stage.index, Facet.KERNEL, DispositionKind.OCTAHEDRON) for stage in space.stages}
        assert len(octa_tokens) == 11


class TestCardinality:

    def test_matches_enumeration(self, space):
        enumerated = 1
        for config in STAGE_CONFIGS.values():
            enumerated *= sum(1 for _ in itertools.product(
                config["orders"], config["kernels"], config["depths"], config["expansions"], config["widths"]
            ))
        assert cardinality(space) == enumerated == DEFAULT_CARDINALITY

    def test_gap_to_rounded_total(self, space):
        # 1.8e19 overstates the per-stage product by about 36x
        ratio = 1.8e19 / cardinality(space)
        assert 30 < ratio < 40

    def test_stage_one_factor(self, space):
        assert space.stages[0].size() == 3

    def test_single_option_space(self):
        stage = StageOptions(1, "backbone", Stride.ONE, (InteractionOrder.FIRST,), (DispositionKind.OCTAHEDRON,),
                             (1,), (1.0,), (16,))
        assert cardinality(build_space([stage] * 11)) == 1


class TestRandomGenotype:

    def test_valid_and_seeded(self, space):
        g = random_genotype(space, 42)
        assert validate_genotype(g, space) == []
        assert g == random_genotype(space, 42)

    def test_covers_every_option(self, space):
        rng = np.random.default_rng(0)
        seen = {(s, facet): set() for s in range(11) for facet in Facet}
        for _ in range(10_000):
            g = random_genotype(space, rng)
            for s, gene in enumerate(g.stages):
                for facet in Facet:
                    seen[(s, facet)].add(getattr(gene, facet.value))
        for (s, facet), values in seen.items():
            assert values == set(space.stages[s].options(facet))


class TestMutate:

    def test_changes_exactly_one_facet(self, space):
        rng = np.random.default_rng(1)
        g = random_genotype(space, rng)
        for _ in range(500):
            child = mutate(g, space, rng)
            assert len(_differences(g, child)) == 1
            assert validate_genotype(child, space) == []
            g = child

    def test_reports_what_changed(self, space):
        g = random_genotype(space, 3)
        info = mutate_with_info(g, space, 9)
        assert not info.noop
        assert _differences(g, info.genotype) == [(info.stage, info.facet)]

    def test_seeded(self, space):
        g = random_genotype(space, 3)
        assert mutate(g, space, 17) == mutate(g, space, 17)

    def test_stage_is_uniform(self, space):
        rng = np.random.default_rng(5)
        g = random_genotype(space, rng)
        counts = np.zeros(11)
        n = 20_000
        for _ in range(n):
            info = mutate_with_info(g, space, rng)
            counts[info.stage] += 1
            g = info.genotype
        # binomial std at p=1/11 is about 0.002
        assert np.abs(counts / n - 1 / 11).max() < 0.01

    def test_stage_seven_width_never_changes(self, space):
        rng = np.random.default_rng(2)
        g = random_genotype(space, rng)
        for _ in range(300):
            g = mutate(g, space, rng)
            assert g.stages[6].width == 160

    def test_reaches_every_option(self, space):
        rng = np.random.default_rng(4)
        g = random_genotype(space, rng)
        seen = {(s, facet): set() for s in range(11) for facet in Facet}
        for _ in range(20_000):
            g = mutate(g, space, rng)
            for s, gene in enumerate(g.stages):
                for facet in Facet:
                    seen[(s, facet)].add(getattr(gene, facet.value))
        for (s, facet), values in seen.items():
            assert values == set(space.stages[s].options(facet))

    def test_noop_without_alternatives(self):
        stage = StageOptions(1, "backbone", Stride.ONE, (InteractionOrder.FIRST,), (DispositionKind.OCTAHEDRON,),
                             (1,), (1.0,), (16,))
        fixed = build_space([stage] * 11)
        g = random_genotype(fixed, 0)
        info = mutate_with_info(g, fixed, 0)
        assert info.noop and info.genotype == g


class TestEncoding:

    def test_layout_and_ranges(self, space):
        encoded = encode_features(random_genotype(space, 8), space)
        assert encoded.dense.shape == (33,) and encoded.tokens.shape == (22,)
        assert encoded.dense.min() >= 0.0 and encoded.dense.max() <= 1.0
        assert encoded.tokens.max() < space.vocab_size

    def test_min_max_endpoints(self, space):
        g = random_genotype(space, 8)
        low = encode_features(g.replace_stage(3, width=24), space)
        high = encode_features(g.replace_stage(3, width=40), space)
        # dense layout per stage: depth, width, expansion
        assert low.dense[3 * 3 + 1] == 0.0
        assert high.dense[3 * 3 + 1] == 1.0

    def test_single_option_facets_encode_to_zero(self, space):
        encoded = encode_features(random_genotype(space, 8), space)
        np.testing.assert_array_equal(encoded.dense[0:3], [0.0, 0.0, 0.0])
        assert encoded.dense[3 * 6 + 1] == 0.0

    def test_round_trip(self, space):
        rng = np.random.default_rng(5)
        for _ in range(200):
            g = random_genotype(space, rng)
            assert decode_features(encode_features(g, space), space) == g

    def test_injective(self, space):
        rng = np.random.default_rng(6)
        genotypes = {random_genotype(space, rng) for _ in range(10_000)}
        keys = {encode_features(g, space).key() for g in genotypes}
        assert len(keys) == len(genotypes)

    def test_rejects_invalid(self, space):
        g = random_genotype(space, 0).replace_stage(6, width=320)
        with pytest.raises(ValidationError):
            encode_features(g, space)

    def test_decode_rejects_misplaced_token(self, space):
        encoded = encode_features(random_genotype(space, 0), space)
        tokens = encoded.tokens.copy()
        tokens[0], tokens[2] = tokens[2], tokens[0]
        with pytest.raises(ValidationError):
            decode_features(encoded.__class__(dense=encoded.dense, tokens=tokens), space)


class TestHandCrafted:

    def test_table(self):
        g = hand_crafted_first_order()
        assert [s.depth for s in g.stages] == [1, 2, 3, 4, 3, 3, 1, 1, 1, 1, 1]
        assert [s.width for s in g.stages] == [16, 24, 32, 64, 96, 160, 320, 160, 96, 64, 32]
        assert [s.expansion for s in g.stages] == [1.0] + [3.0] * 10
        assert {s.kernel for s in g.stages} == {DispositionKind.OCTAHEDRON}
        assert {s.order for s in g.stages} == {InteractionOrder.FIRST}
        assert g.out_of_space

    def test_out_of_space_but_accepted(self, space):
        g = hand_crafted_first_order()
        assert validate_genotype(g, space)
        ensure_valid(g, space)

    def test_second_order_variant(self):
        orders = [s.order for s in hand_crafted(InteractionOrder.SECOND).stages]
        assert orders[0] == orders[1] == orders[10] == InteractionOrder.FIRST
        assert set(orders[2:10]) == {InteractionOrder.SECOND}


class TestGenotypeJson:

    def test_round_trip(self, space):
        g = random_genotype(space, 77)
        assert Genotype.from_dict(g.to_dict()) == g
        assert '"v":1' in g.to_json()

    def test_wrong_stage_count(self, space):
        data = random_genotype(space, 0).to_dict()
        data["stages"] = data["stages"][:10]
        with pytest.raises(SchemaValidationError):
            Genotype.from_dict(data)

    def test_unknown_kernel(self, space):
        data = random_genotype(space, 0).to_dict()
        data["stages"][0]["kernel"] = "cube"
        with pytest.raises(SchemaValidationError):
            Genotype.from_dict(data)

    def test_ensure_valid_lists_violations(self, space):
        g = random_genotype(space, 0).replace_stage(0, order=InteractionOrder.SECOND)
        with pytest.raises(ValidationError, match="stage 1"):
            ensure_valid(g, space)
