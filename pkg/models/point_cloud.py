from dataclasses import dataclass
import numpy as np
from exceptions import ShapeError, InvalidArgumentError


@dataclass(frozen=True)
class PointCloud:
    """Positions plus per-point features at one hierarchy level"""
    positions: np.ndarray  # N x 3, meters
    features: np.ndarray  # N x D

    def __post_init__(self):
        if self.positions.ndim != 2 or self.positions.shape[1] != 3:
            raise ShapeError(f"Positions must be N x 3, got {self.positions.shape}")
        if self.features.ndim != 2 or self.features.shape[0] != self.positions.shape[0]:
            raise ShapeError(
                f"Features {self.features.shape} do not match {self.positions.shape[0]} points"
            )
        if not (np.isfinite(self.positions).all() and np.isfinite(self.features).all()):
            raise InvalidArgumentError("Point cloud contains non-finite values")

    @property
    def n(self) -> int:
        return int(self.positions.shape[0])

    @property
    def d(self) -> int:
        return int(self.features.shape[1])

    def with_features(self, features: np.ndarray) -> "PointCloud":
        return PointCloud(positions=self.positions, features=features)

    @classmethod
    def from_positions(cls, positions: np.ndarray) -> "PointCloud":
        """Cloud whose features default to a single all-ones column"""
        positions = np.asarray(positions, dtype=np.float64).reshape(-1, 3)
        return cls(positions=positions, features=np.ones((positions.shape[0], 1)))


@dataclass(frozen=True)
class NeighborIndex:
    """
    Fixed-width neighbor lists into a support cloud.

    Row i holds counts[i] valid indices followed by ``shadow`` padding.
    """
    indices: np.ndarray  # N_query x M, int64
    counts: np.ndarray  # N_query, int64
    shadow: int

    @property
    def max_neighbors(self) -> int:
        return int(self.indices.shape[1])
