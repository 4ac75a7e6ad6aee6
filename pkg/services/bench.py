"""Synthetic ground-truth benchmark standing in for proxy-task training"""
import hashlib
import json
from typing import Iterable, List, Optional, Tuple
import numpy as np
from loguru import logger
from scipy.special import expit
from config.logging_config import get_run_metadata
from config.settings import OracleConfig
from constants import DENSE_FACETS, SPARSE_FACETS, Facet
from exceptions import InvalidArgumentError
from models.arch_sample import ArchSample
from models.cost_report import SceneProfile
from models.genotype import Genotype
from models.oracle import SyntheticOracle
from models.search_space import SearchSpaceSpec
from services.cost_model import network_cost
from services.search_space import default_space, encode_features, random_genotype

CALIBRATION_SAMPLES = 2000
# Linear vs. bonus split of the variance not taken by the cross terms
_LINEAR_OF_REST = 0.45 / 0.70


def _facet_slots(space: SearchSpaceSpec):
    for s, stage in enumerate(space.stages):
        for j, facet in enumerate(DENSE_FACETS):
            yield s, stage, j, facet


def _dense_centers(space: SearchSpaceSpec) -> np.ndarray:
    """Mean normalized value of every dense facet over its options"""
    centers = []
    for _, stage, _, facet in _facet_slots(space):
        options = np.array(stage.options(facet), dtype=np.float64)
        span = options.max() - options.min()
        normalized = (options - options.min()) / span if span > 0 else np.zeros_like(options)
        centers.append(normalized.mean())
    return np.array(centers)


def _stage_tokens(space: SearchSpaceSpec, stage_index: int, facet: Facet) -> List[int]:
    stage = space.stages[stage_index]
    return [space.token_id(stage.index, facet, option) for option in stage.options(facet)]


def _components(oracle: SyntheticOracle, dense: np.ndarray, tokens: np.ndarray) -> Tuple[float, float, float]:
    linear = float(dense @ oracle.linear)
    bonus = float(oracle.bonus[tokens].sum())
    # sum_t sum_k cross[t, k] * (cross_dense[k] . centered)
    cross = float(oracle.cross[tokens].sum(axis=0) @ (oracle.cross_dense @ (dense - oracle.centers)))
    return linear, bonus, cross


def _apply_zero_facets(oracle: SyntheticOracle, space: SearchSpaceSpec):
    for stage_index, facet_name in oracle.zero_facets:
        facet = Facet(facet_name)
        if facet in DENSE_FACETS:
            j = DENSE_FACETS.index(facet)
            oracle.linear[len(DENSE_FACETS) * stage_index + j] = 0.0
            oracle.cross_dense[:, len(DENSE_FACETS) * stage_index + j] = 0.0
        else:
            tokens = _stage_tokens(space, stage_index, facet)
            oracle.bonus[tokens] = 0.0
            oracle.cross[tokens, :] = 0.0


def make_oracle(
    config: Optional[OracleConfig] = None,
    space: Optional[SearchSpaceSpec] = None,
    zero_facets: Optional[Iterable[Tuple[int, Facet]]] = None
) -> SyntheticOracle:
    """
    Draw and calibrate the coefficient tables.

    The cross term is a low-rank product of summed token factors and projected
    dense features, both zero-mean over random genotypes, so neither side
    alone predicts it. Components are rescaled on a fixed set of random
    genotypes so the cross terms carry ``cross_share`` of the raw score
    variance (linear and bonus split the rest 45:25) and the total raw score
    has zero mean and unit standard deviation.

    Args:
        config: Seed, noise amplitude, cross share and rank, size bias
        space: Search space whose vocabulary indexes the tables
        zero_facets: (stage position, facet) pairs with no influence on the score

    Returns:
        SyntheticOracle, identical for identical inputs
    """
    config = config or OracleConfig()
    space = space or default_space()
    rng = np.random.default_rng([config.seed, 0])

    n_dense = len(DENSE_FACETS) * len(space.stages)
    centers = _dense_centers(space)

    # Positive mean ties performance to model size
    linear = rng.normal(config.size_bias, 1.0, size=n_dense)
    bonus = rng.normal(0.0, 1.0, size=space.vocab_size)
    cross = rng.normal(0.0, 1.0, size=(space.vocab_size, config.cross_rank))
    cross_dense = rng.normal(0.0, 1.0, size=(config.cross_rank, n_dense))

    # Center cross coefficients over the options of each (stage, sparse facet) slot
    for s in range(len(space.stages)):
        for facet in SPARSE_FACETS:
            tokens = _stage_tokens(space, s, facet)
            cross[tokens] -= cross[tokens].mean(axis=0)

    oracle = SyntheticOracle(
        seed=config.seed,
        noise_amplitude=config.noise_amplitude,
        cross_share=config.cross_share,
        linear=linear,
        bonus=bonus,
        cross=cross,
        cross_dense=cross_dense,
        centers=centers,
        zero_facets=[(int(s), Facet(f).value) for s, f in (zero_facets or [])]
    )
    _apply_zero_facets(oracle, space)

    calibration_rng = np.random.default_rng([config.seed, 1])
    encoded = [encode_features(random_genotype(space, calibration_rng), space) for _ in range(CALIBRATION_SAMPLES)]
    parts = np.array([_components(oracle, e.dense, e.tokens) for e in encoded])
    stds = parts.std(axis=0)

    shares = np.array([
        (1.0 - config.cross_share) * _LINEAR_OF_REST,
        (1.0 - config.cross_share) * (1.0 - _LINEAR_OF_REST),
        config.cross_share,
    ])
    factors = np.where(stds > 1e-12, np.sqrt(shares) / np.maximum(stds, 1e-12), 0.0)
    oracle.linear = oracle.linear * factors[0]
    oracle.bonus = oracle.bonus * factors[1]
    oracle.cross = oracle.cross * factors[2]

    raw = (parts * factors).sum(axis=1)
    raw_std = raw.std()
    oracle.scale = float(1.0 / raw_std) if raw_std > 1e-12 else 1.0
    oracle.offset = float(-raw.mean() * oracle.scale)

    logger.debug(
        f"oracle seed {config.seed}: component stds {np.round(stds, 4).tolist()}, "
        f"raw std {raw_std:.4f}"
    )
    return oracle


def _noise_unit(oracle: SyntheticOracle, g: Genotype) -> float:
    """Deterministic value in [-1, 1] from the genotype's canonical JSON"""
    data = g.to_dict()
    for stage_index, facet_name in oracle.zero_facets:
        data["stages"][stage_index][facet_name] = None
    text = json.dumps({"seed": oracle.seed, "g": data}, sort_keys=True, separators=(",", ":"))
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little") / float(2 ** 64) * 2.0 - 1.0


def synthetic_perf(oracle: SyntheticOracle, g: Genotype, space: Optional[SearchSpaceSpec] = None) -> float:
    """Score in (0, 1): squashed linear + bonus + cross terms plus hashed noise"""
    encoded = encode_features(g, space)
    raw = sum(_components(oracle, encoded.dense, encoded.tokens))
    logit = oracle.scale * raw + oracle.offset + oracle.noise_amplitude * _noise_unit(oracle, g)
    return float(expit(logit))


def generate_dataset(
    oracle: SyntheticOracle,
    space: Optional[SearchSpaceSpec] = None,
    n: int = 1000,
    seed: int = 0,
    profile: Optional[SceneProfile] = None
) -> List[ArchSample]:
    """Score ``n`` random genotypes with the oracle and the cost model, in draw order"""
    if n < 1:
        raise InvalidArgumentError(f"Dataset size must be >= 1, got {n}")
    space = space or default_space()
    rng = np.random.default_rng(seed)
    log = logger.bind(**get_run_metadata(command="generate_dataset", seed=seed))

    samples = []
    for i in range(n):
        g = random_genotype(space, rng)
        cost = network_cost(g, profile)
        samples.append(ArchSample(
            genotype=g,
            perf=synthetic_perf(oracle, g, space),
            macs=cost.macs,
            params=cost.params
        ))
        if (i + 1) % 250 == 0:
            log.info(f"Scored {i + 1}/{n} architectures")

    return samples


def split_dataset(samples: List[ArchSample], train_fraction: float = 0.8) -> Tuple[List[ArchSample], List[ArchSample]]:
    """Train/validation split by index: the first ``train_fraction`` of rows train"""
    n_train = int(round(len(samples) * train_fraction))
    return samples[:n_train], samples[n_train:]
