from dataclasses import dataclass, field
from typing import List, Tuple

from .serialization import ReportMixin


@dataclass(eq=False)
class FcsResult(ReportMixin):
    reservoir: str
    chi_step: float
    J_num: float
    Var_num: float
    lambda_samples: List[Tuple[float, float]] = field(default_factory=list)
    J_err: float = 0.0
    Var_err: float = 0.0

    @classmethod
    def from_dict(cls, data):
        result = super().from_dict(data)
        result.lambda_samples = [tuple(sample) for sample in result.lambda_samples]
        return result
