"""Analytic parameter and MAC counts for point operators and whole networks"""
from typing import Dict, Optional
from config.settings import ProfileConfig
from constants import STAGE_LEVELS, InteractionOrder, Stride
from models.cost_report import StageCost, CostReport, SceneProfile
from models.genotype import Genotype
from models.operator import PointOperatorConfig
from schemas import CostReportSchema, StageCostSchema
from services.network import plan_operators

# What the counts cover, reported next to every network cost
COST_INCLUDES = [
    "stem FC, operator FCs, depthwise kernel weights, head FC",
    "gating MLP weights and biases of second-order operators",
    "MACs count scalar multiplies and divides of the forward pass",
    "excluded: FC biases (none exist), grid subsampling, neighbor search, upsampling lookup",
]


def gating_params(k: int) -> int:
    """Two-layer gating MLP with hidden width K: 2*K*K_h + K_h + K"""
    k_h = k
    return 2 * k * k_h + k_h + k


def interaction_params(cfg: PointOperatorConfig) -> int:
    """Depthwise kernel weights K * H"""
    return cfg.k * cfg.hidden_width


def op_cost(
    cfg: PointOperatorConfig,
    n_centers: int,
    avg_n: float,
    n_support: Optional[int] = None
) -> CostReport:
    """
    Parameters and MACs of one point operator.

    Args:
        cfg: Operator shape
        n_centers: Output points C
        avg_n: Average valid neighbors per center; P = round(C * avg_n) pairs
        n_support: Points the expand FC runs on; defaults to C

    Returns:
        CostReport without a per-stage breakdown
    """
    k = cfg.k
    h = cfg.hidden_width
    c = int(n_centers)
    s = c if n_support is None else int(n_support)
    p = int(round(c * avg_n))

    if cfg.stride == Stride.UP2:
        params = cfg.in_width * cfg.out_width + interaction_params(cfg)
        macs = s * cfg.in_width * cfg.out_width
    else:
        params = cfg.in_width * h + h * cfg.out_width + interaction_params(cfg)
        macs = s * cfg.in_width * h + c * h * cfg.out_width

    # correlation (3 squares + 1 divide per pair and kernel point), aggregation, kernel weights
    macs += 4 * p * k + p * k * h + c * k * h

    if cfg.order == InteractionOrder.SECOND:
        k_h = k
        params += gating_params(k)
        macs += c * k + 2 * c * k * k_h + 2 * p * k

    return CostReport(params=params, macs=macs)


def default_profile(cfg: Optional[ProfileConfig] = None) -> SceneProfile:
    """
    Input-scale point count decayed per stride-2 stage and mirrored by the decoder.

    Counts are rounded to integers: [12300, 3075, 769, 192, 192, 48, 48, 192, 769, 3075, 12300].
    """
    cfg = cfg or ProfileConfig()
    points = [int(round(cfg.base_points * cfg.decay ** level)) for level in STAGE_LEVELS]
    return SceneProfile(
        points_per_stage=points,
        avg_neighbors=[float(cfg.avg_neighbors)] * len(STAGE_LEVELS)
    )


def network_cost(
    g: Genotype,
    profile: Optional[SceneProfile] = None,
    d_in: int = 1,
    n_classes: int = 19
) -> CostReport:
    """
    Whole-network cost: stem FC, every operator implied by the depths, head FC.

    Parameter counts do not depend on the profile.
    """
    profile = profile or default_profile()
    points = profile.points_per_stage

    per_stage = [StageCost(
        stage="stem",
        params=d_in * g.stages[0].width,
        macs=points[0] * d_in * g.stages[0].width
    )]

    for stage_plans in plan_operators(g):
        s = stage_plans[0].stage
        params = 0
        macs = 0
        for plan in stage_plans:
            n_support = points[s - 2] if plan.cfg.stride == Stride.TWO else points[s - 1]
            cost = op_cost(plan.cfg, points[s - 1], profile.avg_neighbors[s - 1], n_support)
            params += cost.params
            macs += cost.macs
        per_stage.append(StageCost(stage=f"stage_{s}", params=params, macs=macs))

    last_width = g.stages[-1].width
    per_stage.append(StageCost(
        stage="head",
        params=last_width * n_classes,
        macs=points[-1] * last_width * n_classes
    ))

    return CostReport(
        params=sum(c.params for c in per_stage),
        macs=sum(c.macs for c in per_stage),
        per_stage=per_stage
    )


def _three_significant(value: float) -> float:
    return float(f"{value:.3g}")


def cost_report_json(report: CostReport) -> Dict:
    """JSON form with raw counts plus M/G units at 3 significant digits"""
    schema = CostReportSchema(
        params=report.params,
        macs=report.macs,
        params_m=_three_significant(report.params / 1e6),
        macs_g=_three_significant(report.macs / 1e9),
        per_stage=[StageCostSchema(**c.__dict__) for c in report.per_stage],
        includes=COST_INCLUDES
    )
    return schema.model_dump(mode="json")
