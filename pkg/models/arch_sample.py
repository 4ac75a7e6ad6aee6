from dataclasses import dataclass
from typing import Dict
from models.genotype import Genotype
from schemas import ArchSampleRecord


@dataclass(frozen=True)
class ArchSample:
    """One architecture-performance pair used to train predictors"""
    genotype: Genotype
    perf: float
    macs: int
    params: int

    def to_dict(self) -> Dict:
        return {
            "genotype": self.genotype.to_dict(),
            "perf": self.perf,
            "macs": self.macs,
            "params": self.params
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "ArchSample":
        record = ArchSampleRecord.model_validate(data)
        return cls(
            genotype=Genotype.from_dict(record.genotype.model_dump(mode="json")),
            perf=record.perf,
            macs=record.macs,
            params=record.params
        )
