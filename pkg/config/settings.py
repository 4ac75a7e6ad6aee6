"""Run configuration loaded from a dotenv-style file"""

from pathlib import Path
from typing import Optional, Tuple, Type

from pydantic import BaseModel, ConfigDict, Field, PositiveInt, PositiveFloat, model_validator
from pydantic_settings import BaseSettings, PydanticBaseSettingsSource, SettingsConfigDict

from constants import PredictorMode
from exceptions import InvalidArgumentError


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class GeometryConfig(_Section):
    kernel_radius_scale: PositiveFloat = Field(
        default=1.0,
        description="Kernel radius as a multiple of the stage's neighborhood radius"
    )
    delta_ratio: PositiveFloat = Field(
        default=0.5,
        description="Influence radius delta as a fraction of the kernel radius"
    )


class NetworkConfig(_Section):
    base_cell: PositiveFloat = Field(default=0.06, description="Grid cell (m) at input resolution")
    radius_ratio: PositiveFloat = Field(default=2.5, description="Neighborhood radius / grid cell")
    max_neighbors: PositiveInt = 32
    n_classes: PositiveInt = 19
    chunk_size: PositiveInt = Field(default=512, description="Centers evaluated per vectorized block")


class ProfileConfig(_Section):
    base_points: PositiveInt = Field(default=12300, description="Points at input resolution")
    decay: PositiveFloat = Field(default=0.25, description="Point-count factor per stride-2 stage")
    avg_neighbors: PositiveFloat = 26.0


class TrainConfig(_Section):
    learning_rate: PositiveFloat = 1e-3
    epochs: int = Field(default=100, ge=0)
    batch_size: PositiveInt = 32
    rank_margin: float = Field(default=0.05, ge=0.0)
    rank_weight: float = Field(default=1.0, ge=0.0)
    pretrain_epochs: int = Field(default=40, ge=0)
    pretrain_learning_rate: PositiveFloat = 3e-3
    seed: int = 0
    target_mean: Optional[float] = None
    target_std: Optional[PositiveFloat] = None
    beta1: float = Field(default=0.9, ge=0.0, lt=1.0)
    beta2: float = Field(default=0.999, ge=0.0, lt=1.0)
    eps: PositiveFloat = 1e-8


class PredictorConfig(_Section):
    mode: PredictorMode = PredictorMode.DENSE_SPARSE
    dim: PositiveInt = 32
    dropout: float = Field(default=0.5, ge=0.0, lt=1.0)


class EvolutionConfig(_Section):
    population: PositiveInt = 200
    sample_size: PositiveInt = 150
    rounds: PositiveInt = 360
    beta: float = Field(default=0.5, ge=0.0)
    seed: int = 0
    log_base: PositiveFloat = 10.0
    macs_unit: PositiveFloat = Field(default=1e9, description="MACs are divided by this before the log")
    top_k: PositiveInt = 5
    random_budget: PositiveInt = 560

    @model_validator(mode="after")
    def _sample_fits_population(self):
        if self.sample_size > self.population:
            raise ValueError(
                f"sample_size ({self.sample_size}) exceeds population ({self.population})"
            )
        return self


class OracleConfig(_Section):
    seed: int = 0
    noise_amplitude: float = Field(default=0.01, ge=0.0)
    cross_share: float = Field(default=0.3, ge=0.0, le=1.0)
    cross_rank: PositiveInt = Field(default=1, description="Rank of the token x dense-facet cross table")
    size_bias: float = Field(default=1.0, description="Mean of the linear coefficients")
    n_samples: PositiveInt = 1000
    train_fraction: float = Field(default=0.8, gt=0.0, lt=1.0)


class RunConfig(BaseSettings):
    """Fully resolved configuration of one CLI run"""

    model_config = SettingsConfigDict(
        env_prefix="PIDS_",
        env_nested_delimiter="__",
        extra="forbid",
        case_sensitive=False
    )

    seed: int = 0
    out_dir: str = "runs"
    dataset_path: Optional[str] = None
    checkpoint_path: Optional[str] = None
    genotype_path: Optional[str] = None
    cloud_path: Optional[str] = None

    geometry: GeometryConfig = GeometryConfig()
    network: NetworkConfig = NetworkConfig()
    profile: ProfileConfig = ProfileConfig()
    train: TrainConfig = TrainConfig()
    predictor: PredictorConfig = PredictorConfig()
    evolution: EvolutionConfig = EvolutionConfig()
    oracle: OracleConfig = OracleConfig()

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: Type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> Tuple[PydanticBaseSettingsSource, ...]:
        # Only explicit arguments and the config file; the process environment
        # must not change a run.
        return init_settings, dotenv_settings

    @classmethod
    def from_file(cls, path: Optional[str] = None) -> "RunConfig":
        """Load a config file (``PIDS_SECTION__KEY=value`` lines); defaults when path is None"""
        if path is None:
            return cls()
        if not Path(path).is_file():
            raise InvalidArgumentError(f"Config file not found: {path}")
        return cls(_env_file=path)

    def with_seed(self, seed: Optional[int]) -> "RunConfig":
        """Single global seed policy: one seed drives every section"""
        if seed is None:
            seed = self.seed
        return self.model_copy(update={
            "seed": seed,
            "train": self.train.model_copy(update={"seed": seed}),
            "evolution": self.evolution.model_copy(update={"seed": seed}),
            "oracle": self.oracle.model_copy(update={"seed": seed}),
        })

    def resolved(self) -> dict:
        return self.model_dump(mode="json")
