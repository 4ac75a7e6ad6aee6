from dataclasses import dataclass, asdict


@dataclass(frozen=True)
class PredictorMetrics:
    """Held-out quality of a predictor: MSE on normalized targets and Kendall tau-b"""
    mse: float
    kendall_tau: float

    def to_dict(self):
        return asdict(self)
