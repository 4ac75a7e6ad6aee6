from pydantic import BaseModel, ConfigDict, Field
from typing import List, Dict, Optional, Literal
from constants import DispositionKind, InteractionOrder, PredictorMode, SearchEvent, GENOTYPE_SCHEMA_VERSION


class StageGeneSchema(BaseModel):
    model_config = ConfigDict(extra="forbid")

    order: InteractionOrder
    kernel: DispositionKind
    depth: int = Field(ge=1)
    expansion: float = Field(ge=1.0)
    width: int = Field(ge=1)


class GenotypeSchema(BaseModel):
    model_config = ConfigDict(extra="forbid")

    v: Literal[1] = GENOTYPE_SCHEMA_VERSION
    stages: List[StageGeneSchema] = Field(min_length=11, max_length=11)
    out_of_space: bool = Field(
        default=False,
        description="Set for reference tables that lie outside the searchable option sets"
    )


class ArchSampleRecord(BaseModel):
    """One JSON-lines row of a predictor dataset"""
    model_config = ConfigDict(extra="forbid")

    genotype: GenotypeSchema
    perf: float
    macs: int = Field(ge=0)
    params: int = Field(ge=0)


class SearchRecordRow(BaseModel):
    """One JSON-lines row of a search history"""
    round: int
    genotype: GenotypeSchema
    p_hat: float
    macs: int
    objective: float
    event: SearchEvent


class StageCostSchema(BaseModel):
    stage: str
    params: int
    macs: int


class CostReportSchema(BaseModel):
    params: int
    macs: int
    params_m: float = Field(description="Parameters in millions, 3 significant digits")
    macs_g: float = Field(description="MACs in billions, 3 significant digits")
    per_stage: List[StageCostSchema]
    includes: List[str] = Field(
        default_factory=list,
        description="What the counts cover (biases, preprocessing are excluded)"
    )


class OracleSchema(BaseModel):
    """Frozen coefficient tables of the synthetic benchmark"""
    seed: int
    noise_amplitude: float
    cross_share: float
    linear: List[float]
    bonus: List[float]
    cross: List[List[float]]
    cross_dense: List[List[float]]
    centers: List[float]
    scale: float
    offset: float
    zero_facets: List[List] = Field(default_factory=list)


class TensorSpec(BaseModel):
    name: str
    shape: List[int]


class CheckpointHeader(BaseModel):
    """JSON header of a predictor checkpoint; f32 tensors follow in listed order"""
    format: Literal["pids-predictor"] = "pids-predictor"
    version: int = 1
    mode: PredictorMode
    dim: int
    vocab: int
    n_dense: int
    n_tokens: int
    tower_widths: List[int]
    head_widths: List[int]
    dropout: float
    target_mean: float
    target_std: float
    tensors: List[TensorSpec]


class CommandSummary(BaseModel):
    """Single-line JSON summary printed by every CLI command"""
    model_config = ConfigDict(extra="allow")

    command: str
    seed: int
    outputs: Dict[str, str] = Field(default_factory=dict)
    metrics: Optional[Dict[str, float]] = None
