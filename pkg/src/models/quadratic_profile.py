from dataclasses import dataclass

from .serialization import ReportMixin


@dataclass(eq=False)
class QuadraticProfile(ReportMixin):
    """Q_d(r) = ln(P0/P1) (P/r0) [1 + (r0 - r)(A r + B)] at zero detuning."""

    P: float
    r0: float
    A: float
    B: float
    A1: float
    r_star: float
    Q_min: float
    Qc_min: float
    F_c: float
    F_d: float
    carnot_coeff: float
    p_I: float
    gamma: float
    log_ratio: float
    # 0 < r_star / r0 <= 1/2, equivalently 0 < p_c <= p_I at the optimum
    conjecture_holds: bool = True

    @property
    def scale(self) -> float:
        return self.log_ratio * self.P / self.r0

    def q_d(self, r: float) -> float:
        return self.scale * (1.0 + (self.r0 - r) * (self.A * r + self.B))

    def q_total(self, r: float) -> float:
        return self.scale * (1.0 + (self.r0 - r) * (self.A1 * r + self.B))
