"""Scalar loop implementations of the interaction and predictor math, with multiply counting"""
import math

from constants import InteractionOrder, Stride
from services.geometry import make_disposition


class MulCounter:
    """Counts every scalar multiply and divide it performs"""

    def __init__(self):
        self.count = 0

    def mul(self, a, b):
        self.count += 1
        return a * b

    def div(self, a, b):
        self.count += 1
        return a / b


def correlation_scalar(rel, points, delta, ops):
    rows = []
    for x in rel:
        row = []
        for kp in points:
            d2 = 0.0
            for a in range(3):
                diff = x[a] - kp[a]
                d2 += ops.mul(diff, diff)
            row.append(max(0.0, 1.0 - ops.div(math.sqrt(d2), delta)))
        rows.append(row)
    return rows


def _sigmoid(x):
    return 1.0 / (1.0 + math.exp(-x))


def gate_values_scalar(h, n_valid, params, ops):
    k = len(params.gate_b2)
    k_h = len(params.gate_b1)
    pooled = []
    for kk in range(k):
        total = sum(h[i][kk] for i in range(n_valid))
        pooled.append(ops.div(total, max(n_valid, 1)))

    hidden = []
    for a in range(k_h):
        z = params.gate_b1[a]
        for kk in range(k):
            z += ops.mul(pooled[kk], params.gate_w1[kk][a])
        hidden.append(max(0.0, z))

    g = []
    for kk in range(k):
        z = params.gate_b2[kk]
        for a in range(k_h):
            z += ops.mul(hidden[a], params.gate_w2[a][kk])
        g.append(_sigmoid(z))
    return g


def gate_scalar(h, n_valid, params, ops):
    g = gate_values_scalar(h, n_valid, params, ops)
    return [[ops.mul(g[kk], row[kk]) for kk in range(len(row))] for row in h]


def mix_scalar(h, gated, ops):
    return [
        [ops.mul(0.5, h[i][kk] + gated[i][kk]) for kk in range(len(h[i]))]
        for i in range(len(h))
    ]


def aggregate_scalar(feats, h, w, ops):
    n_channels = len(w[0])
    out = []
    for c in range(n_channels):
        total = 0.0
        for kk in range(len(w)):
            inner = 0.0
            for i in range(len(feats)):
                inner += ops.mul(h[i][kk], feats[i][c])
            total += ops.mul(w[kk][c], inner)
        out.append(total)
    return out


def first_order_scalar(feats, h, w):
    return aggregate_scalar(feats, h, w, MulCounter())


def second_order_scalar(feats, h, params, n_valid=None):
    ops = MulCounter()
    n_valid = len(h) if n_valid is None else n_valid
    mixed = mix_scalar(h, gate_scalar(h, n_valid, params, ops), ops)
    return aggregate_scalar(feats, mixed, params.w, ops)


def operator_scalar(support, neighbors, centers, cfg, weights, ops):
    """
    Straight-line version of one point operator; every multiply goes through ``ops``.

    Returns a list of output rows, one per center.
    """
    decoder = cfg.stride == Stride.UP2
    points = make_disposition(cfg.kernel, cfg.radius).points
    expand = weights.expand
    d_in, d_expand = expand.shape

    hidden = []
    for j in range(support.n):
        row = []
        for c in range(d_expand):
            z = 0.0
            for i in range(d_in):
                z += ops.mul(support.features[j][i], expand[i][c])
            row.append(max(0.0, z))
        if decoder:
            row = row * int(round(cfg.expansion))
        hidden.append(row)

    out = []
    for q in range(centers.n):
        n = int(neighbors.counts[q])
        idx = [int(j) for j in neighbors.indices[q][:n]]
        rel = [[support.positions[j][a] - centers.positions[q][a] for a in range(3)] for j in idx]
        h = correlation_scalar(rel, points, cfg.influence, ops)

        interaction = weights.interaction
        if interaction.order == InteractionOrder.SECOND:
            h = mix_scalar(h, gate_scalar(h, n, interaction, ops), ops)

        agg = aggregate_scalar([hidden[j] for j in idx], h, interaction.w, ops)
        agg = [max(0.0, v) for v in agg]

        if decoder:
            row = [sum(agg[r * cfg.out_width + o] for r in range(int(round(cfg.expansion))))
                   for o in range(cfg.out_width)]
        else:
            row = []
            for o in range(cfg.out_width):
                z = 0.0
                for c in range(len(agg)):
                    z += ops.mul(agg[c], weights.project[c][o])
                row.append(z)
        if cfg.residual:
            row = [v + centers.features[q][o] for o, v in enumerate(row)]
        out.append(row)
    return out


def _affine_scalar(x, w, b, relu):
    out = []
    for o in range(len(b)):
        z = b[o]
        for i, v in enumerate(x):
            z += v * w[i][o]
        out.append(max(0.0, z) if relu else z)
    return out


def _mlp_scalar(x, params, prefix, relu_last):
    n_layers = sum(1 for name in params if name.startswith(prefix + ".") and name.endswith(".w"))
    for layer in range(n_layers):
        relu = layer < n_layers - 1 or relu_last
        x = _affine_scalar(x, params[f"{prefix}.{layer}.w"].tolist(), params[f"{prefix}.{layer}.b"].tolist(), relu)
    return x


def dense_sparse_scalar(p, dense, tokens):
    """Evaluation-mode dense_sparse prediction with plain lists"""
    x_d = _mlp_scalar(list(dense), p.params, "tower", relu_last=False)
    rows = [x_d] + [p.params["embed"][t].tolist() for t in tokens]

    fused = []
    for a in range(len(rows)):
        for b in range(a + 1, len(rows)):
            fused.append(sum(u * v for u, v in zip(rows[a], rows[b])))
    fused += x_d

    hidden = _mlp_scalar(fused, p.params, "head", relu_last=True)
    return _mlp_scalar(hidden, p.params, "out", relu_last=False)[0]
