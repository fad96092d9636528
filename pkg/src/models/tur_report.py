from dataclasses import dataclass
from typing import Dict

from .serialization import ReportMixin


@dataclass(eq=False)
class TurReport(ReportMixin):
    J_c: float
    J: Dict[str, float]
    sigma: float
    var_d: Dict[str, float]
    var_c: Dict[str, float]
    Q_d: float
    Q_c: float
    Q: float
    reservoir: str

    def variance(self, label: str) -> float:
        return self.var_d[label] + self.var_c[label]

    def csv_row(self) -> Dict[str, float]:
        return {
            "J_c": self.J_c,
            "sigma": self.sigma,
            "var_d": self.var_d[self.reservoir],
            "var_c": self.var_c[self.reservoir],
            "Q_d": self.Q_d,
            "Q_c": self.Q_c,
            "Q": self.Q,
        }
