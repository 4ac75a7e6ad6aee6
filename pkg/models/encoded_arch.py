from dataclasses import dataclass
import numpy as np


@dataclass(frozen=True)
class EncodedArch:
    """Predictor input: min-max normalized dimension facets plus categorical token ids"""
    dense: np.ndarray  # 33 floats in [0, 1]
    tokens: np.ndarray  # 22 int64 ids into the space vocabulary

    def key(self) -> tuple:
        return tuple(np.round(self.dense, 12).tolist()) + tuple(self.tokens.tolist())
