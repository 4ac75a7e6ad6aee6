from dataclasses import dataclass, field
from typing import Dict, List, Tuple
from constants import DispositionKind, InteractionOrder, Stride, Facet


@dataclass(frozen=True)
class StageOptions:
    """Option sets of one stage"""
    index: int
    hierarchy: str
    stride: Stride
    orders: Tuple[InteractionOrder, ...]
    kernels: Tuple[DispositionKind, ...]
    depths: Tuple[int, ...]
    expansions: Tuple[float, ...]
    widths: Tuple[int, ...]

    def options(self, facet: Facet) -> tuple:
        return {
            Facet.ORDER: self.orders,
            Facet.KERNEL: self.kernels,
            Facet.DEPTH: self.depths,
            Facet.EXPANSION: self.expansions,
            Facet.WIDTH: self.widths,
        }[facet]

    def size(self) -> int:
        return (
            len(self.orders) * len(self.kernels) * len(self.depths)
            * len(self.expansions) * len(self.widths)
        )


@dataclass(frozen=True)
class SearchSpaceSpec:
    """Per-stage option sets plus the token vocabulary used by sparse encodings"""
    stages: Tuple[StageOptions, ...]
    vocabulary: Dict[Tuple[int, str, str], int] = field(default_factory=dict)

    @property
    def strides(self) -> List[Stride]:
        return [stage.stride for stage in self.stages]

    @property
    def vocab_size(self) -> int:
        return len(self.vocabulary)

    def token_id(self, stage: int, facet: Facet, option) -> int:
        return self.vocabulary[(stage, facet.value, _option_key(option))]

    def token_lookup(self) -> Dict[int, Tuple[int, str, str]]:
        return {token: key for key, token in self.vocabulary.items()}


def _option_key(option) -> str:
    return option.value if hasattr(option, "value") else str(option)
