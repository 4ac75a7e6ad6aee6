from dataclasses import dataclass, replace
from typing import Dict, Optional, Tuple
import json
from constants import DispositionKind, InteractionOrder, Facet, GENOTYPE_SCHEMA_VERSION
from schemas import GenotypeSchema


@dataclass(frozen=True)
class StageGene:
    """Searchable choices of one stage"""
    order: InteractionOrder
    kernel: DispositionKind
    depth: int
    expansion: float
    width: int

    def to_dict(self) -> Dict:
        return {
            "order": self.order.value,
            "kernel": self.kernel.value,
            "depth": self.depth,
            "expansion": self.expansion,
            "width": self.width
        }


@dataclass(frozen=True)
class Genotype:
    """11-stage architecture description; strides are fixed by the search space"""
    stages: Tuple[StageGene, ...]
    out_of_space: bool = False

    def to_dict(self) -> Dict:
        data = {
            "v": GENOTYPE_SCHEMA_VERSION,
            "stages": [stage.to_dict() for stage in self.stages]
        }
        if self.out_of_space:
            data["out_of_space"] = True
        return data

    def to_json(self) -> str:
        """Canonical JSON text (stable key order, no whitespace)"""
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def replace_stage(self, index: int, **changes) -> "Genotype":
        stages = list(self.stages)
        stages[index] = replace(stages[index], **changes)
        return Genotype(stages=tuple(stages), out_of_space=self.out_of_space)

    @classmethod
    def from_dict(cls, data: Dict) -> "Genotype":
        """Parse genotype JSON; raises pydantic's ValidationError on malformed input"""
        schema = GenotypeSchema.model_validate(data)
        return cls(
            stages=tuple(
                StageGene(
                    order=stage.order,
                    kernel=stage.kernel,
                    depth=stage.depth,
                    expansion=float(stage.expansion),
                    width=stage.width
                )
                for stage in schema.stages
            ),
            out_of_space=schema.out_of_space
        )


@dataclass(frozen=True)
class Mutation:
    """Outcome of a single mutation; ``noop`` is set when nothing could change"""
    genotype: Genotype
    stage: int = -1
    facet: Optional[Facet] = None
    noop: bool = False
