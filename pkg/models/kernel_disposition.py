from dataclasses import dataclass
import numpy as np
from constants import DispositionKind
from exceptions import InvalidArgumentError


@dataclass(frozen=True)
class KernelDisposition:
    """Fixed layout of K kernel points: the origin followed by polyhedron vertices"""
    kind: DispositionKind
    points: np.ndarray  # K x 3, meters
    radius: float

    @property
    def k(self) -> int:
        return int(self.points.shape[0])

    def to_dict(self):
        return {
            "kind": self.kind.value,
            "radius": self.radius,
            "points": self.points.tolist()
        }


@dataclass(frozen=True)
class InfluenceRadius:
    """Distance over which a kernel point influences its neighbors"""
    delta: float

    def __post_init__(self):
        if not np.isfinite(self.delta) or self.delta <= 0:
            raise InvalidArgumentError(f"Influence radius must be positive, got {self.delta}")
