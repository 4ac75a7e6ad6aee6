from dataclasses import dataclass, field
from typing import Dict, List
from constants import SearchEvent
from models.genotype import Genotype


@dataclass(frozen=True)
class SearchRecord:
    """One scored genotype in the order the search produced it"""
    round: int
    genotype: Genotype
    p_hat: float
    macs: int
    objective: float
    event: SearchEvent
    insertion: int = 0

    def to_dict(self) -> Dict:
        return {
            "round": self.round,
            "genotype": self.genotype.to_dict(),
            "p_hat": self.p_hat,
            "macs": self.macs,
            "objective": self.objective,
            "event": self.event.value
        }


@dataclass
class SearchResult:
    """Best record, the k best records and the full history of one search"""
    best: SearchRecord
    history: List[SearchRecord] = field(default_factory=list)
    top: List[SearchRecord] = field(default_factory=list)
