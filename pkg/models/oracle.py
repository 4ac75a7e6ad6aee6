from dataclasses import dataclass, field
from typing import Dict, List, Tuple
import numpy as np
from schemas import OracleSchema


@dataclass
class SyntheticOracle:
    """
    Frozen coefficient tables of the synthetic benchmark.

    ``linear`` weights the 33 dense features and ``bonus`` holds one value per
    vocabulary token. The cross table over (token, dense facet) pairs is kept
    factored as ``cross @ cross_dense``: token factors (vocab x rank) times
    dense factors (rank x 33) applied to the centered dense features.
    """
    seed: int
    noise_amplitude: float
    cross_share: float
    linear: np.ndarray
    bonus: np.ndarray
    cross: np.ndarray
    cross_dense: np.ndarray
    centers: np.ndarray
    scale: float = 1.0
    offset: float = 0.0
    zero_facets: List[Tuple[int, str]] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return {
            "seed": self.seed,
            "noise_amplitude": self.noise_amplitude,
            "cross_share": self.cross_share,
            "linear": self.linear.tolist(),
            "bonus": self.bonus.tolist(),
            "cross": self.cross.tolist(),
            "cross_dense": self.cross_dense.tolist(),
            "centers": self.centers.tolist(),
            "scale": self.scale,
            "offset": self.offset,
            "zero_facets": [list(f) for f in self.zero_facets]
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "SyntheticOracle":
        schema = OracleSchema.model_validate(data)
        return cls(
            seed=schema.seed,
            noise_amplitude=schema.noise_amplitude,
            cross_share=schema.cross_share,
            linear=np.array(schema.linear),
            bonus=np.array(schema.bonus),
            cross=np.array(schema.cross),
            cross_dense=np.array(schema.cross_dense),
            centers=np.array(schema.centers),
            scale=schema.scale,
            offset=schema.offset,
            zero_facets=[(int(s), str(f)) for s, f in schema.zero_facets]
        )
