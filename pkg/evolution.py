"""Predictor-guided regularized evolution and the random-search baseline"""
import math
from collections import deque
from typing import Callable, Dict, List, Optional, Sequence
import numpy as np
from loguru import logger
from config.logging_config import get_run_metadata
from config.settings import EvolutionConfig
from constants import SearchMode, SearchEvent
from exceptions import InvalidArgumentError
from models.genotype import Genotype
from models.search_record import SearchRecord, SearchResult
from models.search_space import SearchSpaceSpec
from services.cost_model import network_cost
from services.search_space import default_space, encode_features, mutate, random_genotype

# Maps genotypes to predicted performance, one value per genotype
Scorer = Callable[[Sequence[Genotype]], np.ndarray]


def objective(
    p_hat: float,
    macs: int,
    beta: float,
    log_base: float = 10.0,
    macs_unit: float = 1e9
) -> float:
    """S = p_hat - beta * log_base(macs / macs_unit)"""
    if macs < 1:
        raise InvalidArgumentError(f"MACs must be >= 1, got {macs}")
    scaled = macs / macs_unit
    log = math.log10(scaled) if log_base == 10.0 else math.log(scaled) / math.log(log_base)
    return p_hat - beta * log


def predictor_scorer(predictor, space: Optional[SearchSpaceSpec] = None) -> Scorer:
    """Evaluation-mode predictions of a trained predictor, in normalized units"""
    def score(genotypes: Sequence[Genotype]) -> np.ndarray:
        return predictor.predict_batch([encode_features(g, space) for g in genotypes])
    return score


def _selection_key(record: SearchRecord):
    # Highest S, then lower MACs, then earlier insertion
    return (record.objective, -record.macs, -record.insertion)


class RegularizedEvolution:
    """
    Aging evolution over the search space.

    Every round samples ``sample_size`` members without replacement, mutates the
    best of them, appends the child and removes the oldest member.
    """

    def __init__(
        self,
        scorer: Scorer,
        space: Optional[SearchSpaceSpec] = None,
        cost: Optional[Callable[[Genotype], int]] = None,
        cfg: Optional[EvolutionConfig] = None
    ):
        self.scorer = scorer
        self.space = space or default_space()
        self.cost = cost or (lambda g: network_cost(g).macs)
        self.cfg = cfg or EvolutionConfig()
        self._macs_cache: Dict[Genotype, int] = {}
        self._insertions = 0

    @classmethod
    def from_predictor(cls, predictor, space=None, cost=None, cfg=None) -> "RegularizedEvolution":
        return cls(predictor_scorer(predictor, space), space=space, cost=cost, cfg=cfg)

    def _macs(self, g: Genotype) -> int:
        if g not in self._macs_cache:
            self._macs_cache[g] = int(self.cost(g))
        return self._macs_cache[g]

    def _score(self, genotypes: List[Genotype], round_num: int, event: SearchEvent) -> List[SearchRecord]:
        """Score a batch; records come back in insertion order"""
        p_hats = self.scorer(genotypes)
        records = []
        for g, p_hat in zip(genotypes, p_hats):
            macs = self._macs(g)
            records.append(SearchRecord(
                round=round_num,
                genotype=g,
                p_hat=float(p_hat),
                macs=macs,
                objective=objective(float(p_hat), macs, self.cfg.beta, self.cfg.log_base, self.cfg.macs_unit),
                event=event,
                insertion=self._insertions
            ))
            self._insertions += 1
        return records

    def run_evolution(self) -> SearchResult:
        """
        Run ``cfg.rounds`` rounds from ``cfg.population`` random genotypes.

        Returns:
            SearchResult with the highest-S genotype ever seen and the history
            (population + rounds records)
        """
        cfg = self.cfg
        rng = np.random.default_rng(cfg.seed)
        log = logger.bind(**get_run_metadata(command="evolve", seed=cfg.seed, mode=SearchMode.EVOLUTION.value))
        self._insertions = 0

        initial = [random_genotype(self.space, rng) for _ in range(cfg.population)]
        history = self._score(initial, 0, SearchEvent.INIT)
        population = deque(history)
        best = max(history, key=_selection_key)
        log.info(f"Initial population of {cfg.population}, best S {best.objective:.4f}")

        for round_num in range(1, cfg.rounds + 1):
            picks = rng.choice(len(population), size=cfg.sample_size, replace=False)
            parent = max((population[i] for i in picks), key=_selection_key)

            child = self._score([mutate(parent.genotype, self.space, rng)], round_num, SearchEvent.CHILD)[0]
            history.append(child)
            population.append(child)
            population.popleft()

            if child.objective > best.objective:
                best = child
            if round_num % 50 == 0 or round_num == cfg.rounds:
                log.bind(round=round_num).info(f"round {round_num}/{cfg.rounds} best S {best.objective:.4f}")

        top = sorted(history, key=_selection_key, reverse=True)[:cfg.top_k]
        return SearchResult(best=best, history=history, top=top)

    def run_random_search(self, budget: Optional[int] = None, seed: Optional[int] = None) -> SearchResult:
        """Score ``budget`` independent random genotypes and keep the top-k by S"""
        budget = budget if budget is not None else self.cfg.random_budget
        seed = seed if seed is not None else self.cfg.seed
        if budget < 1:
            raise InvalidArgumentError(f"Random search budget must be >= 1, got {budget}")

        rng = np.random.default_rng(seed)
        self._insertions = 0
        genotypes = [random_genotype(self.space, rng) for _ in range(budget)]
        history = self._score(genotypes, 0, SearchEvent.INIT)

        top = sorted(history, key=_selection_key, reverse=True)[:self.cfg.top_k]
        logger.bind(**get_run_metadata(command="random_search", seed=seed, mode=SearchMode.RANDOM.value)).info(
            f"Scored {budget} random genotypes, best S {top[0].objective:.4f}"
        )
        return SearchResult(best=top[0], history=history, top=top)

    def run_search(self, mode: SearchMode = SearchMode.EVOLUTION) -> SearchResult:
        """
        Run a search based on the search mode

        Args:
            mode: Evolution or random search (random uses ``cfg.random_budget``)
        """
        if mode == SearchMode.EVOLUTION:
            return self.run_evolution()
        elif mode == SearchMode.RANDOM:
            return self.run_random_search()
        else:
            raise InvalidArgumentError(f"Unknown search mode: {mode}")


def evolve(predictor, space=None, cost=None, cfg: Optional[EvolutionConfig] = None) -> SearchResult:
    return RegularizedEvolution.from_predictor(predictor, space, cost, cfg).run_evolution()


def random_search(predictor, space=None, cost=None, budget: int = 560, seed: int = 0,
                  cfg: Optional[EvolutionConfig] = None) -> SearchResult:
    return RegularizedEvolution.from_predictor(predictor, space, cost, cfg).run_random_search(budget, seed)
