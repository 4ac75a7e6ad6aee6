"""Genotype sampling, mutation, validation and predictor feature encoding"""
from functools import lru_cache
from typing import List, Optional, Union
import numpy as np
from constants import (
    STAGE_CONFIGS,
    NUM_STAGES,
    DENSE_FACETS,
    SPARSE_FACETS,
    HAND_CRAFTED_DEPTHS,
    HAND_CRAFTED_WIDTHS,
    HAND_CRAFTED_EXPANSIONS,
    DispositionKind,
    InteractionOrder,
    Facet,
    MutationAction,
)
from exceptions import ValidationError
from models.encoded_arch import EncodedArch
from models.genotype import StageGene, Genotype, Mutation
from models.search_space import StageOptions, SearchSpaceSpec

SeedLike = Union[int, np.random.Generator, None]

_ACTION_FACETS = {
    MutationAction.KERNEL: [Facet.KERNEL],
    MutationAction.ORDER: [Facet.ORDER],
    MutationAction.WIDTH_OR_EXPANSION: [Facet.WIDTH, Facet.EXPANSION],
    MutationAction.DEPTH: [Facet.DEPTH],
}


def as_rng(seed: SeedLike) -> np.random.Generator:
    """Accept a seed or an existing generator; never touches global state"""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def build_space(stages: List[StageOptions]) -> SearchSpaceSpec:
    """Attach the position-specific token vocabulary to a list of stage option sets"""
    vocabulary = {}
    for stage in stages:
        for facet in SPARSE_FACETS:
            for option in stage.options(facet):
                key = (stage.index, facet.value, option.value)
                vocabulary[key] = len(vocabulary)
    return SearchSpaceSpec(stages=tuple(stages), vocabulary=vocabulary)


@lru_cache(maxsize=1)
def default_space() -> SearchSpaceSpec:
    """The 11-stage option table from ``constants.STAGE_CONFIGS``"""
    stages = [
        StageOptions(
            index=index,
            hierarchy=config["hierarchy"],
            stride=config["stride"],
            orders=tuple(config["orders"]),
            kernels=tuple(config["kernels"]),
            depths=tuple(config["depths"]),
            expansions=tuple(float(e) for e in config["expansions"]),
            widths=tuple(config["widths"]),
        )
        for index, config in sorted(STAGE_CONFIGS.items())
    ]
    return build_space(stages)


def _gene_value(gene: StageGene, facet: Facet):
    return getattr(gene, facet.value)


def validate_genotype(g: Genotype, space: Optional[SearchSpaceSpec] = None) -> List[str]:
    """List every (stage, facet) whose value is outside the stage's option set"""
    space = space or default_space()
    if len(g.stages) != len(space.stages):
        return [f"expected {len(space.stages)} stages, got {len(g.stages)}"]

    violations = []
    for gene, stage in zip(g.stages, space.stages):
        for facet in Facet:
            value = _gene_value(gene, facet)
            if value not in stage.options(facet):
                violations.append(
                    f"stage {stage.index}: {facet.value}={getattr(value, 'value', value)} "
                    f"not in {[getattr(o, 'value', o) for o in stage.options(facet)]}"
                )
    return violations


def ensure_valid(g: Genotype, space: Optional[SearchSpaceSpec] = None) -> None:
    """Raise ValidationError unless ``g`` lies in the space (out-of-space tables pass)"""
    if g.out_of_space:
        if len(g.stages) != NUM_STAGES:
            raise ValidationError(f"expected {NUM_STAGES} stages, got {len(g.stages)}")
        return
    violations = validate_genotype(g, space)
    if violations:
        raise ValidationError("Genotype outside the search space: " + "; ".join(violations))


def random_genotype(space: Optional[SearchSpaceSpec] = None, seed: SeedLike = None) -> Genotype:
    """Independent uniform choice per facet per stage"""
    space = space or default_space()
    rng = as_rng(seed)

    genes = []
    for stage in space.stages:
        choice = {
            facet: stage.options(facet)[int(rng.integers(len(stage.options(facet))))]
            for facet in (Facet.ORDER, Facet.KERNEL, Facet.DEPTH, Facet.EXPANSION, Facet.WIDTH)
        }
        genes.append(StageGene(
            order=choice[Facet.ORDER],
            kernel=choice[Facet.KERNEL],
            depth=choice[Facet.DEPTH],
            expansion=choice[Facet.EXPANSION],
            width=choice[Facet.WIDTH],
        ))
    return Genotype(stages=tuple(genes))


def mutate_with_info(g: Genotype, space: Optional[SearchSpaceSpec] = None, seed: SeedLike = None) -> Mutation:
    """
    Change exactly one facet of one stage.

    A stage is drawn uniformly, then an action; width-or-expansion picks one of
    the two facets with equal probability. The stage is kept and the action
    redrawn while the chosen facet has a single option. Returns the input with
    ``noop`` set when no facet of any stage has an alternative.
    """
    space = space or default_space()
    rng = as_rng(seed)

    mutable = [
        (i, facet)
        for i, stage in enumerate(space.stages)
        for facet in Facet
        if len(stage.options(facet)) > 1
    ]
    if not mutable:
        return Mutation(genotype=g, noop=True)

    actions = list(MutationAction)
    stage_pos = int(rng.integers(len(space.stages)))
    if not any(len(space.stages[stage_pos].options(facet)) > 1 for facet in Facet):
        stage_pos = mutable[int(rng.integers(len(mutable)))][0]
    while True:
        action = actions[int(rng.integers(len(actions)))]
        candidates = _ACTION_FACETS[action]
        facet = candidates[int(rng.integers(len(candidates)))]
        options = space.stages[stage_pos].options(facet)
        if len(options) > 1:
            break

    current = _gene_value(g.stages[stage_pos], facet)
    alternatives = [o for o in options if o != current]
    value = alternatives[int(rng.integers(len(alternatives)))]

    return Mutation(
        genotype=g.replace_stage(stage_pos, **{facet.value: value}),
        stage=stage_pos,
        facet=facet
    )


def mutate(g: Genotype, space: Optional[SearchSpaceSpec] = None, seed: SeedLike = None) -> Genotype:
    return mutate_with_info(g, space, seed).genotype


def _normalize(value: float, options: tuple) -> float:
    low, high = min(options), max(options)
    if high == low:
        return 0.0
    return (float(value) - low) / (high - low)


def encode_features(g: Genotype, space: Optional[SearchSpaceSpec] = None) -> EncodedArch:
    """
    Dense/sparse predictor encoding.

    dense[3s + j] is the min-max normalized depth, width, expansion of stage s
    over that stage's own options; tokens[2s + j] are the kernel and order ids
    of the position-specific vocabulary.
    """
    space = space or default_space()
    violations = validate_genotype(g, space)
    if violations:
        raise ValidationError("Cannot encode genotype: " + "; ".join(violations))

    dense = []
    tokens = []
    for gene, stage in zip(g.stages, space.stages):
        for facet in DENSE_FACETS:
            dense.append(_normalize(_gene_value(gene, facet), stage.options(facet)))
        for facet in SPARSE_FACETS:
            tokens.append(space.token_id(stage.index, facet, _gene_value(gene, facet)))

    return EncodedArch(dense=np.array(dense, dtype=np.float64), tokens=np.array(tokens, dtype=np.int64))


def decode_features(encoded: EncodedArch, space: Optional[SearchSpaceSpec] = None) -> Genotype:
    """Inverse of ``encode_features`` for in-space genotypes"""
    space = space or default_space()
    n_stages = len(space.stages)
    if encoded.dense.shape != (len(DENSE_FACETS) * n_stages,):
        raise ValidationError(f"Dense vector has shape {encoded.dense.shape}")
    if encoded.tokens.shape != (len(SPARSE_FACETS) * n_stages,):
        raise ValidationError(f"Token vector has shape {encoded.tokens.shape}")

    lookup = space.token_lookup()
    genes = []
    for s, stage in enumerate(space.stages):
        values = {}
        for j, facet in enumerate(DENSE_FACETS):
            options = stage.options(facet)
            target = encoded.dense[len(DENSE_FACETS) * s + j]
            values[facet] = min(options, key=lambda o: abs(_normalize(o, options) - target))

        for j, facet in enumerate(SPARSE_FACETS):
            token = int(encoded.tokens[len(SPARSE_FACETS) * s + j])
            if token not in lookup:
                raise ValidationError(f"Token id {token} outside vocabulary of {space.vocab_size}")
            stage_index, facet_name, option_key = lookup[token]
            if stage_index != stage.index or facet_name != facet.value:
                raise ValidationError(
                    f"Token {token} belongs to stage {stage_index}/{facet_name}, "
                    f"found at stage {stage.index}/{facet.value}"
                )
            enum_type = DispositionKind if facet == Facet.KERNEL else InteractionOrder
            values[facet] = enum_type(option_key)

        genes.append(StageGene(
            order=values[Facet.ORDER],
            kernel=values[Facet.KERNEL],
            depth=values[Facet.DEPTH],
            expansion=values[Facet.EXPANSION],
            width=values[Facet.WIDTH],
        ))
    return Genotype(stages=tuple(genes))


def cardinality(space: Optional[SearchSpaceSpec] = None) -> int:
    """Number of distinct genotypes, exact integer"""
    space = space or default_space()
    total = 1
    for stage in space.stages:
        total *= stage.size()
    return total


def hand_crafted(order: InteractionOrder = InteractionOrder.FIRST) -> Genotype:
    """
    MobileNet-V2-style reference model, Octahedron kernels throughout.

    With ``order=second`` every stage whose option set admits second order
    switches to it. Widths such as 320 lie outside the searchable options, so
    the result is flagged out-of-space.
    """
    space = default_space()
    genes = []
    for s, stage in enumerate(space.stages):
        stage_order = order if order in stage.orders else InteractionOrder.FIRST
        genes.append(StageGene(
            order=stage_order,
            kernel=DispositionKind.OCTAHEDRON,
            depth=HAND_CRAFTED_DEPTHS[s],
            expansion=HAND_CRAFTED_EXPANSIONS[s],
            width=HAND_CRAFTED_WIDTHS[s],
        ))
    return Genotype(stages=tuple(genes), out_of_space=True)


def hand_crafted_first_order() -> Genotype:
    return hand_crafted(InteractionOrder.FIRST)
