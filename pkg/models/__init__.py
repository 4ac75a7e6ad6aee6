"""Domain value types of the pipeline"""

from models.kernel_disposition import KernelDisposition, InfluenceRadius
from models.point_cloud import PointCloud, NeighborIndex
from models.genotype import StageGene, Genotype, Mutation
from models.search_space import StageOptions, SearchSpaceSpec
from models.encoded_arch import EncodedArch
from models.operator import PointOperatorConfig, InteractionParams, OperatorWeights, NetworkWeights, OperatorPlan
from models.cost_report import StageCost, CostReport, SceneProfile
from models.arch_sample import ArchSample
from models.search_record import SearchRecord, SearchResult
from models.oracle import SyntheticOracle
from models.predictor_metrics import PredictorMetrics

__all__ = [
    "KernelDisposition",
    "InfluenceRadius",
    "PointCloud",
    "NeighborIndex",
    "StageGene",
    "Genotype",
    "Mutation",
    "StageOptions",
    "SearchSpaceSpec",
    "EncodedArch",
    "PointOperatorConfig",
    "InteractionParams",
    "OperatorWeights",
    "NetworkWeights",
    "OperatorPlan",
    "StageCost",
    "CostReport",
    "SceneProfile",
    "ArchSample",
    "SearchRecord",
    "SearchResult",
    "SyntheticOracle",
    "PredictorMetrics",
]
