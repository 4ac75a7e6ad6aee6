from dataclasses import dataclass, field, asdict
from typing import List
from exceptions import InvalidArgumentError


@dataclass
class StageCost:
    """Cost of one network part (stem, a stage, or the head)"""
    stage: str
    params: int
    macs: int


@dataclass
class CostReport:
    params: int
    macs: int
    per_stage: List[StageCost] = field(default_factory=list)

    def is_consistent(self) -> bool:
        """Totals equal the breakdown (vacuous for a single operator)"""
        if not self.per_stage:
            return True
        return (
            sum(s.params for s in self.per_stage) == self.params
            and sum(s.macs for s in self.per_stage) == self.macs
        )

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class SceneProfile:
    """Point count and average neighbor count at the output of every stage"""
    points_per_stage: List[int]
    avg_neighbors: List[float]

    def __post_init__(self):
        if len(self.points_per_stage) != len(self.avg_neighbors):
            raise InvalidArgumentError("Profile needs one neighbor count per stage")
        if any(p <= 0 for p in self.points_per_stage) or any(a <= 0 for a in self.avg_neighbors):
            raise InvalidArgumentError("Profile counts must be positive")
