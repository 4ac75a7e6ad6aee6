from dataclasses import dataclass, field
from typing import Optional
import numpy as np
from constants import DispositionKind, InteractionOrder, Stride, KERNEL_POINT_COUNTS
from exceptions import InvalidArgumentError


@dataclass(frozen=True)
class PointOperatorConfig:
    """
    Shape of one point operator.

    Encoder operators (stride 1/2) expand D_in -> E*D_in channels, interact and
    project to D_out. Decoder operators (up2) project the concatenated skip
    features C_cat = in_width -> D_out and interact over E*D_out channels
    (the projected features tiled E times), summing the E replicas.
    """
    order: InteractionOrder
    kernel: DispositionKind
    in_width: int
    out_width: int
    expansion: float
    stride: Stride
    radius: float = 1.0
    delta: Optional[float] = None

    def __post_init__(self):
        if self.expansion < 1:
            raise InvalidArgumentError(f"Expansion must be >= 1, got {self.expansion}")
        if self.in_width < 1 or self.out_width < 1:
            raise InvalidArgumentError(
                f"Widths must be >= 1, got {self.in_width} -> {self.out_width}"
            )

    @property
    def k(self) -> int:
        return KERNEL_POINT_COUNTS[self.kernel]

    @property
    def hidden_width(self) -> int:
        base = self.out_width if self.stride == Stride.UP2 else self.in_width
        return int(round(self.expansion * base))

    @property
    def influence(self) -> float:
        return self.delta if self.delta is not None else 0.5 * self.radius

    @property
    def residual(self) -> bool:
        return self.stride == Stride.ONE and self.in_width == self.out_width


@dataclass
class InteractionParams:
    """Depthwise kernel weights plus the optional second-order gating MLP"""
    w: np.ndarray  # K x D
    order: InteractionOrder = InteractionOrder.FIRST
    gate_w1: Optional[np.ndarray] = None  # K x K_h
    gate_b1: Optional[np.ndarray] = None  # K_h
    gate_w2: Optional[np.ndarray] = None  # K_h x K
    gate_b2: Optional[np.ndarray] = None  # K
    running_pool: Optional[np.ndarray] = None  # K, mean pooled correlation seen so far

    def __post_init__(self):
        gating = [self.gate_w1, self.gate_b1, self.gate_w2, self.gate_b2]
        if self.order == InteractionOrder.SECOND and any(p is None for p in gating):
            raise InvalidArgumentError("Second-order interaction requires gating parameters")
        if self.order == InteractionOrder.FIRST and any(p is not None for p in gating):
            raise InvalidArgumentError("First-order interaction carries no gating parameters")

    @property
    def k(self) -> int:
        return int(self.w.shape[0])

    def tensors(self):
        yield self.w
        if self.order == InteractionOrder.SECOND:
            yield self.gate_w1
            yield self.gate_b1
            yield self.gate_w2
            yield self.gate_b2


@dataclass
class OperatorWeights:
    """
    Weights of one point operator.

    ``expand`` is D_in x H for encoder operators and the skip-concat projection
    C_cat x D_out for decoder operators; ``project`` is None for decoders.
    """
    expand: np.ndarray
    interaction: InteractionParams
    project: Optional[np.ndarray] = None

    def tensors(self):
        yield self.expand
        yield from self.interaction.tensors()
        if self.project is not None:
            yield self.project


@dataclass
class NetworkWeights:
    stem: np.ndarray  # d_in x stage-1 width
    stages: list = field(default_factory=list)  # list[list[OperatorWeights]]
    head: Optional[np.ndarray] = None  # last width x n_classes

    def tensors(self):
        yield self.stem
        for stage in self.stages:
            for op in stage:
                yield from op.tensors()
        yield self.head


@dataclass(frozen=True)
class OperatorPlan:
    """Where one operator runs: output level, support level and its shape"""
    stage: int
    position: int
    level: int
    support_level: int
    cfg: PointOperatorConfig
    skip_stage: Optional[int] = None
