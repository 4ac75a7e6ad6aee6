"""Encoder-decoder network assembled from a genotype"""
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union
import numpy as np
from loguru import logger
from config.settings import NetworkConfig, GeometryConfig
from constants import STAGE_LEVELS, DECODER_SKIPS, InteractionOrder, Stride
from exceptions import ShapeError, ParseError, WriteError
from models.genotype import Genotype
from models.operator import PointOperatorConfig, NetworkWeights, OperatorPlan
from models.point_cloud import PointCloud, NeighborIndex
from services.interaction import point_operator_forward, init_operator_weights, observe_pooling
from services.point_cloud_ops import grid_subsample, radius_neighbors, nearest_index
from services.search_space import default_space, ensure_valid


def level_cell(level: int, network: NetworkConfig) -> float:
    return network.base_cell * (2 ** level)


def level_radius(level: int, network: NetworkConfig) -> float:
    """Neighborhood radius of a resolution level"""
    return network.radius_ratio * level_cell(level, network)


def plan_operators(
    genotype: Genotype,
    network: Optional[NetworkConfig] = None,
    geometry: Optional[GeometryConfig] = None
) -> List[List[OperatorPlan]]:
    """
    Expand a genotype into per-stage operator plans.

    The first operator of a stage maps in-width to out-width with the stage
    stride; the remaining depth - 1 operators are stride 1 at out-width.
    Decoder stages take the previous stage's output concatenated with the
    encoder skip of the same resolution.
    """
    network = network or NetworkConfig()
    geometry = geometry or GeometryConfig()
    strides = default_space().strides

    plans = []
    prev_width = genotype.stages[0].width
    out_widths: Dict[int, int] = {}

    for s, gene in enumerate(genotype.stages, start=1):
        level = STAGE_LEVELS[s - 1]
        stride = strides[s - 1]
        kernel_radius = level_radius(level, network) * geometry.kernel_radius_scale
        delta = geometry.delta_ratio * kernel_radius

        skip_stage = DECODER_SKIPS.get(s) if stride == Stride.UP2 else None
        in_width = prev_width + (out_widths[skip_stage] if skip_stage else 0)
        if stride == Stride.TWO:
            support_level = level - 1
        elif stride == Stride.UP2:
            support_level = level + 1
        else:
            support_level = level

        stage_plans = []
        for position in range(gene.depth):
            first = position == 0
            cfg = PointOperatorConfig(
                order=gene.order,
                kernel=gene.kernel,
                in_width=in_width if first else gene.width,
                out_width=gene.width,
                expansion=gene.expansion,
                stride=stride if first else Stride.ONE,
                radius=kernel_radius,
                delta=delta
            )
            stage_plans.append(OperatorPlan(
                stage=s,
                position=position,
                level=level,
                support_level=support_level if first else level,
                cfg=cfg,
                skip_stage=skip_stage if first else None
            ))

        plans.append(stage_plans)
        out_widths[s] = gene.width
        prev_width = gene.width

    return plans


def _uniform(rng: np.random.Generator, shape: Tuple[int, int]) -> np.ndarray:
    bound = 1.0 / np.sqrt(shape[0])
    return rng.uniform(-bound, bound, size=shape)


def init_network_weights(
    genotype: Genotype,
    d_in: int = 1,
    n_classes: int = 19,
    seed: int = 0,
    network: Optional[NetworkConfig] = None,
    geometry: Optional[GeometryConfig] = None
) -> NetworkWeights:
    """Seeded uniform init for stem, every operator and the head, in traversal order"""
    rng = np.random.default_rng(seed)
    plans = plan_operators(genotype, network, geometry)

    stem = _uniform(rng, (d_in, genotype.stages[0].width))
    stages = [[init_operator_weights(plan.cfg, rng) for plan in stage] for stage in plans]
    head = _uniform(rng, (genotype.stages[-1].width, n_classes))

    return NetworkWeights(stem=stem, stages=stages, head=head)


def _check_network_weights(plans: List[List[OperatorPlan]], weights: NetworkWeights, d_in: int):
    if weights.stem.shape[0] != d_in:
        raise ShapeError(f"Stem expects {weights.stem.shape[0]} input channels, cloud has {d_in}")
    if len(weights.stages) != len(plans):
        raise ShapeError(f"Weights cover {len(weights.stages)} stages, genotype has {len(plans)}")
    for stage_plans, stage_weights in zip(plans, weights.stages):
        if len(stage_plans) != len(stage_weights):
            raise ShapeError(
                f"Stage {stage_plans[0].stage}: {len(stage_weights)} operator weights "
                f"for depth {len(stage_plans)}"
            )
    if weights.head.shape[0] != plans[-1][-1].cfg.out_width:
        raise ShapeError(f"Head expects width {weights.head.shape[0]}")


class _LevelCache:
    """Subsampled positions and neighbor lists shared by the operators of one pass"""

    def __init__(self, positions: np.ndarray, network: NetworkConfig):
        self.network = network
        self.levels = [positions]
        self.neighbors: Dict[Tuple[int, int], NeighborIndex] = {}

    def positions(self, level: int) -> np.ndarray:
        while len(self.levels) <= level:
            coarse = grid_subsample(
                PointCloud.from_positions(self.levels[-1]),
                level_cell(len(self.levels), self.network)
            )
            self.levels.append(coarse.positions)
        return self.levels[level]

    def neighbor_index(self, level: int, support_level: int) -> NeighborIndex:
        key = (level, support_level)
        if key not in self.neighbors:
            self.neighbors[key] = radius_neighbors(
                PointCloud.from_positions(self.positions(level)),
                PointCloud.from_positions(self.positions(support_level)),
                level_radius(level, self.network),
                self.network.max_neighbors
            )
        return self.neighbors[key]


def network_forward(
    genotype: Genotype,
    cloud: PointCloud,
    weights: NetworkWeights,
    network: Optional[NetworkConfig] = None,
    geometry: Optional[GeometryConfig] = None,
    record_pooling: bool = False
) -> PointCloud:
    """
    Per-point class logits at input resolution.

    Args:
        genotype: Architecture; must lie in the search space unless flagged out-of-space
        cloud: Input cloud, its features feed the stem FC
        weights: Weights from ``init_network_weights`` (or a loaded blob)
        network: Grid cell, radius and neighbor settings
        geometry: Kernel radius and influence settings
        record_pooling: Store the mean pooled correlation on every second-order operator

    Returns:
        PointCloud at the input positions with n_classes features
    """
    network = network or NetworkConfig()
    ensure_valid(genotype)
    plans = plan_operators(genotype, network, geometry)
    _check_network_weights(plans, weights, cloud.d)

    cache = _LevelCache(cloud.positions, network)
    feats = cloud.features @ weights.stem
    stage_outputs: Dict[int, np.ndarray] = {}

    for stage_plans, stage_weights in zip(plans, weights.stages):
        for plan, op_weights in zip(stage_plans, stage_weights):
            cfg = plan.cfg
            centers_pos = cache.positions(plan.level)

            if cfg.stride == Stride.UP2:
                coarse_pos = cache.positions(plan.support_level)
                upsampled = feats[nearest_index(centers_pos, coarse_pos)]
                support = PointCloud(
                    positions=centers_pos,
                    features=np.hstack([upsampled, stage_outputs[plan.skip_stage]])
                )
                neighbors = cache.neighbor_index(plan.level, plan.level)
                centers = support
            elif cfg.stride == Stride.TWO:
                support = PointCloud(positions=cache.positions(plan.support_level), features=feats)
                neighbors = cache.neighbor_index(plan.level, plan.support_level)
                centers = PointCloud.from_positions(centers_pos)
            else:
                support = PointCloud(positions=centers_pos, features=feats)
                neighbors = cache.neighbor_index(plan.level, plan.level)
                centers = support

            sink = [] if record_pooling and cfg.order == InteractionOrder.SECOND else None
            feats = point_operator_forward(
                support, neighbors, centers, cfg, op_weights,
                chunk_size=network.chunk_size,
                pooled_sink=sink
            ).features
            if sink:
                observe_pooling(op_weights.interaction, np.vstack(sink))

        stage_outputs[stage_plans[0].stage] = feats
        logger.debug(f"stage {stage_plans[0].stage}: {feats.shape[0]} points x {feats.shape[1]} channels")

    return PointCloud(positions=cloud.positions, features=feats @ weights.head)


def save_network_weights(weights: NetworkWeights, path: Union[str, Path]) -> Path:
    """
    Single binary blob: per tensor u32 ndim, u32 dims, then little-endian f32
    data, in stem / stage operators / head order.
    """
    path = Path(path)
    chunks = []
    for tensor in weights.tensors():
        chunks.append(np.array([tensor.ndim, *tensor.shape], dtype="<u4").tobytes())
        chunks.append(np.ascontiguousarray(tensor, dtype="<f4").tobytes())
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(b"".join(chunks))
    except OSError as e:
        raise WriteError(f"Could not write weights to {path}: {e}") from e
    return path


def load_network_weights(
    path: Union[str, Path],
    genotype: Genotype,
    d_in: int = 1,
    n_classes: int = 19
) -> NetworkWeights:
    """Read a blob written by ``save_network_weights`` for the same genotype"""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise ParseError(f"Unreadable weights file: {e}", path=str(path)) from e

    weights = init_network_weights(genotype, d_in=d_in, n_classes=n_classes)
    offset = 0
    for tensor in weights.tensors():
        if offset + 4 > len(raw):
            raise ParseError("Truncated tensor header", path=str(path), offset=offset)
        ndim = int(np.frombuffer(raw, dtype="<u4", count=1, offset=offset)[0])
        if offset + 4 * (1 + ndim) > len(raw):
            raise ParseError("Truncated tensor shape", path=str(path), offset=offset)
        shape = tuple(int(v) for v in np.frombuffer(raw, dtype="<u4", count=ndim, offset=offset + 4))
        offset += 4 * (1 + ndim)
        if shape != tensor.shape:
            raise ParseError(f"Tensor shape {shape}, genotype needs {tensor.shape}", path=str(path), offset=offset)

        size = int(np.prod(shape))
        if offset + 4 * size > len(raw):
            raise ParseError("Truncated tensor data", path=str(path), offset=offset)
        tensor[...] = np.frombuffer(raw, dtype="<f4", count=size, offset=offset).reshape(shape)
        offset += 4 * size

    if offset != len(raw):
        raise ParseError(f"{len(raw) - offset} trailing bytes", path=str(path), offset=offset)
    return weights
