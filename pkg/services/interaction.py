"""First/second-order point interactions and the inverted-residual point operator"""
from functools import lru_cache
from typing import Optional
import numpy as np
from scipy.special import expit
from constants import DispositionKind, InteractionOrder, Stride
from exceptions import ShapeError, UnsupportedOperationError, InvalidArgumentError
from models.kernel_disposition import KernelDisposition, InfluenceRadius
from models.operator import PointOperatorConfig, InteractionParams, OperatorWeights
from models.point_cloud import PointCloud, NeighborIndex
from services.geometry import make_disposition, correlation


def _check_interaction_shapes(feats: np.ndarray, h_l: np.ndarray, params: InteractionParams):
    if feats.ndim != 2 or h_l.ndim != 2:
        raise ShapeError(f"Expected 2-D inputs, got feats {feats.shape} and h_l {h_l.shape}")
    if feats.shape[0] != h_l.shape[0]:
        raise ShapeError(f"{feats.shape[0]} feature rows but {h_l.shape[0]} correlation rows")
    if h_l.shape[1] != params.k:
        raise ShapeError(f"Correlation has {h_l.shape[1]} kernel columns, weights have {params.k}")
    if feats.shape[1] != params.w.shape[1]:
        raise ShapeError(f"Features have {feats.shape[1]} channels, weights have {params.w.shape[1]}")


def _aggregate(feats: np.ndarray, h: np.ndarray, w: np.ndarray) -> np.ndarray:
    # sum_k w[k] * sum_i h[i, k] * feats[i]
    return np.sum((h.T @ feats) * w, axis=0)


def first_order_forward(feats: np.ndarray, h_l: np.ndarray, params: InteractionParams) -> np.ndarray:
    """
    Depthwise first-order aggregation of one center's neighbors.

    out[d] = sum_k sum_i h_l[i, k] * feats[i, d] * w[k, d]; no channel mixing.
    Only ``params.w`` is used.
    """
    _check_interaction_shapes(feats, h_l, params)
    return _aggregate(feats, h_l, params.w)


def _require_second_order(params: InteractionParams):
    if params.order != InteractionOrder.SECOND:
        raise UnsupportedOperationError("Gating is only defined for second-order interaction")


def _gate_logits(pooled: np.ndarray, params: InteractionParams) -> np.ndarray:
    hidden = np.maximum(0.0, pooled @ params.gate_w1 + params.gate_b1)
    return hidden @ params.gate_w2 + params.gate_b2


def pool_correlation(h_l: np.ndarray, n_valid: Optional[int] = None) -> np.ndarray:
    """Mean correlation per kernel point over the first ``n_valid`` rows (zeros when empty)"""
    if n_valid is None:
        n_valid = h_l.shape[0]
    if n_valid == 0:
        return np.zeros(h_l.shape[1])
    return h_l[:n_valid].sum(axis=0) / n_valid


def gate(h_l: np.ndarray, params: InteractionParams, n_valid: Optional[int] = None) -> np.ndarray:
    """
    Density-aware re-weighting of the kernel-neighbor correlation.

    Args:
        h_l: N x K correlation matrix
        params: Second-order interaction parameters
        n_valid: Leading rows that are real neighbors; the rest are shadow
            padding and are left out of the pooled mean

    Returns:
        N x K matrix g[k] * h_l[i, k] with g = sigmoid(mlp(pool(h_l)))
    """
    _require_second_order(params)
    if h_l.ndim != 2 or h_l.shape[1] != params.k:
        raise ShapeError(f"Correlation must be N x {params.k}, got {h_l.shape}")

    g = expit(_gate_logits(pool_correlation(h_l, n_valid), params))
    return g[None, :] * h_l


def second_order_forward(
    feats: np.ndarray,
    h_l: np.ndarray,
    params: InteractionParams,
    n_valid: Optional[int] = None
) -> np.ndarray:
    """First-order aggregation over the mixed correlation (h_l + gate(h_l)) / 2"""
    _require_second_order(params)
    _check_interaction_shapes(feats, h_l, params)
    mixed = 0.5 * (h_l + gate(h_l, params, n_valid))
    return _aggregate(feats, mixed, params.w)


def gate_strengths(params: InteractionParams, pooled: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Per-kernel-point gate values g in (0, 1).

    Evaluated at ``pooled`` when given, else at the recorded running pool
    (zeros if nothing has been recorded yet).
    """
    _require_second_order(params)
    if pooled is None:
        pooled = params.running_pool if params.running_pool is not None else np.zeros(params.k)
    pooled = np.asarray(pooled, dtype=np.float64)
    if pooled.shape != (params.k,):
        raise ShapeError(f"Pooled correlation must have length {params.k}, got {pooled.shape}")
    return expit(_gate_logits(pooled, params))


def observe_pooling(params: InteractionParams, pooled_rows: np.ndarray) -> None:
    """Record the mean pooled correlation seen over a forward pass"""
    _require_second_order(params)
    if pooled_rows.shape[0]:
        params.running_pool = pooled_rows.mean(axis=0)


@lru_cache(maxsize=64)
def _disposition(kind: DispositionKind, radius: float) -> KernelDisposition:
    return make_disposition(kind, radius)


def _interact_batch(
    feats: np.ndarray,
    h: np.ndarray,
    counts: np.ndarray,
    params: InteractionParams
):
    """
    Vectorized interaction for a block of centers.

    feats is C x M x H, h is C x M x K with shadow rows already zero.
    Returns (C x H output, C x K pooled correlation or None).
    """
    pooled = None
    if params.order == InteractionOrder.SECOND:
        pooled = h.sum(axis=1) / np.maximum(counts, 1)[:, None]
        g = expit(_gate_logits(pooled, params))
        h = 0.5 * (h + g[:, None, :] * h)

    per_kernel = np.matmul(h.transpose(0, 2, 1), feats)
    return np.sum(per_kernel * params.w[None, :, :], axis=1), pooled


def _check_operator_weights(cfg: PointOperatorConfig, weights: OperatorWeights):
    h = cfg.hidden_width
    if cfg.stride == Stride.UP2:
        expected = {"expand": (cfg.in_width, cfg.out_width), "w": (cfg.k, h)}
        if weights.project is not None:
            raise ShapeError("Decoder operators carry no project FC")
    else:
        expected = {"expand": (cfg.in_width, h), "w": (cfg.k, h), "project": (h, cfg.out_width)}
        if weights.project is None:
            raise ShapeError("Encoder operators need a project FC")

    actual = {"expand": weights.expand.shape, "w": weights.interaction.w.shape}
    if weights.project is not None:
        actual["project"] = weights.project.shape

    for name, shape in expected.items():
        if tuple(actual[name]) != shape:
            raise ShapeError(f"{name} weights are {tuple(actual[name])}, expected {shape}")
    if weights.interaction.order != cfg.order:
        raise ShapeError(f"Weights are {weights.interaction.order.value}-order, config is {cfg.order.value}")


def decoder_replicas(cfg: PointOperatorConfig) -> int:
    replicas = int(round(cfg.expansion))
    if replicas != cfg.expansion:
        raise InvalidArgumentError(f"Decoder expansion must be integral, got {cfg.expansion}")
    return replicas


def point_operator_forward(
    cloud_in: PointCloud,
    neighbors: NeighborIndex,
    centers: PointCloud,
    cfg: PointOperatorConfig,
    weights: OperatorWeights,
    chunk_size: int = 512,
    pooled_sink: Optional[list] = None
) -> PointCloud:
    """
    Evaluate one point operator at every center.

    Encoder (stride 1/2): y = project(relu(interact(relu(expand(F))))), plus
    the residual F when stride is 1 and widths match. Decoder (up2): the
    concatenated features are projected to D_out, tiled E times, interacted
    and the E replicas summed.

    Args:
        cloud_in: Support cloud with in_width features
        neighbors: Neighbor lists of every center into ``cloud_in``
        centers: Output positions (and residual features for stride 1)
        cfg: Operator shape
        weights: Operator weights shaped for ``cfg``
        chunk_size: Centers evaluated per vectorized block
        pooled_sink: Collects C x K pooled correlations of second-order gates

    Returns:
        PointCloud at ``centers`` with out_width features
    """
    if cloud_in.d != cfg.in_width:
        raise ShapeError(f"Input has {cloud_in.d} channels, operator expects {cfg.in_width}")
    if neighbors.indices.shape[0] != centers.n:
        raise ShapeError(f"{neighbors.indices.shape[0]} neighbor rows for {centers.n} centers")
    if neighbors.shadow != cloud_in.n:
        raise ShapeError(f"Shadow index {neighbors.shadow} does not match support size {cloud_in.n}")
    _check_operator_weights(cfg, weights)

    decoder = cfg.stride == Stride.UP2
    hidden = np.maximum(0.0, cloud_in.features @ weights.expand)
    if decoder:
        hidden = np.tile(hidden, (1, decoder_replicas(cfg)))

    # Shadow index points at an appended zero row
    hidden = np.vstack([hidden, np.zeros((1, hidden.shape[1]))])
    support_pos = np.vstack([cloud_in.positions, np.zeros((1, 3))])

    disp = _disposition(cfg.kernel, float(cfg.radius))
    delta = InfluenceRadius(cfg.influence)

    out = np.zeros((centers.n, cfg.out_width))
    for start in range(0, centers.n, chunk_size):
        stop = min(start + chunk_size, centers.n)
        idx = neighbors.indices[start:stop]
        valid = idx != neighbors.shadow
        n_c, m = idx.shape

        rel = support_pos[idx] - centers.positions[start:stop, None, :]
        h = correlation(rel.reshape(-1, 3), disp, delta).reshape(n_c, m, cfg.k)
        h = h * valid[:, :, None]

        agg, pooled = _interact_batch(hidden[idx], h, neighbors.counts[start:stop], weights.interaction)
        if pooled is not None and pooled_sink is not None:
            pooled_sink.append(pooled[neighbors.counts[start:stop] > 0])
        agg = np.maximum(0.0, agg)

        if decoder:
            out[start:stop] = agg.reshape(n_c, -1, cfg.out_width).sum(axis=1)
        else:
            out[start:stop] = agg @ weights.project

    if cfg.residual:
        out = out + centers.features
    return centers.with_features(out)


def _uniform(rng: np.random.Generator, shape, fan_in: int) -> np.ndarray:
    bound = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=shape)


def init_interaction_params(k: int, width: int, order: InteractionOrder, rng: np.random.Generator) -> InteractionParams:
    """Seeded uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) init; gating hidden width equals K"""
    w = _uniform(rng, (k, width), k)
    if order == InteractionOrder.FIRST:
        return InteractionParams(w=w, order=order)
    return InteractionParams(
        w=w,
        order=order,
        gate_w1=_uniform(rng, (k, k), k),
        gate_b1=_uniform(rng, (k,), k),
        gate_w2=_uniform(rng, (k, k), k),
        gate_b2=_uniform(rng, (k,), k)
    )


def init_operator_weights(cfg: PointOperatorConfig, rng: np.random.Generator) -> OperatorWeights:
    h = cfg.hidden_width
    if cfg.stride == Stride.UP2:
        decoder_replicas(cfg)
        return OperatorWeights(
            expand=_uniform(rng, (cfg.in_width, cfg.out_width), cfg.in_width),
            interaction=init_interaction_params(cfg.k, h, cfg.order, rng)
        )
    return OperatorWeights(
        expand=_uniform(rng, (cfg.in_width, h), cfg.in_width),
        interaction=init_interaction_params(cfg.k, h, cfg.order, rng),
        project=_uniform(rng, (h, cfg.out_width), h)
    )


def zero_operator_weights(cfg: PointOperatorConfig) -> OperatorWeights:
    weights = init_operator_weights(cfg, np.random.default_rng(0))
    for tensor in weights.tensors():
        tensor[...] = 0.0
    return weights
