from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .serialization import ReportMixin


@dataclass(eq=False)
class ThermalState(ReportMixin):
    populations: np.ndarray
    P: float
    r0: float
    _arrays = ("populations",)


@dataclass(eq=False)
class StrongCouplingState(ReportMixin):
    populations: np.ndarray
    d: float
    p_I: float
    carnot_limit: bool = False
    _arrays = ("populations",)


@dataclass(eq=False)
class DiagonalSteady(ReportMixin):
    q: np.ndarray
    r: float
    qsum: float
    p_c: float
    _arrays = ("q",)


@dataclass(eq=False)
class CoherentBlock(ReportMixin):
    x: float
    y: float

    @property
    def z(self) -> complex:
        return complex(self.x, -self.y)


@dataclass(eq=False)
class XiOperator(ReportMixin):
    diagonal: np.ndarray
    trace: float = field(init=False)
    _arrays = ("diagonal",)

    def __post_init__(self):
        self.trace = float(np.sum(self.diagonal))


@dataclass(eq=False)
class SteadyReport(ReportMixin):
    """Everything the steady-state solver produces for one model."""

    thermal: ThermalState
    strong: StrongCouplingState
    diagonal: DiagonalSteady
    coherence: CoherentBlock
    xi: Optional[XiOperator]
    gamma: float
    delta: float
    vq: tuple
    _nested = {
        "thermal": ThermalState,
        "strong": StrongCouplingState,
        "diagonal": DiagonalSteady,
        "coherence": CoherentBlock,
        "xi": XiOperator,
    }

    @property
    def r(self) -> float:
        return self.diagonal.r

    @property
    def r0(self) -> float:
        return self.thermal.r0

    @property
    def p_I(self) -> float:
        return self.strong.p_I

    @property
    def p_c(self) -> float:
        return self.diagonal.p_c

    @property
    def carnot_limit(self) -> bool:
        return self.strong.carnot_limit

    def density_matrix(self) -> np.ndarray:
        """rho_s = rho_d + rho_c in the bare eigenbasis."""
        rho = np.diag(self.diagonal.q).astype(complex)
        i0, i1 = self.vq
        rho[i0, i1] = self.coherence.z
        rho[i1, i0] = np.conj(self.coherence.z)
        return rho

    def to_dict(self):
        # flat wire format; the nested form is kept under "detail" for exact round-trips
        return {
            "tau": self.thermal.populations.tolist(),
            "rho_I": self.strong.populations.tolist(),
            "p_I": self.p_I,
            "gamma": self.gamma,
            "p_c": self.p_c,
            "rho_d": self.diagonal.q.tolist(),
            "r": self.r,
            "r0": self.r0,
            "coherence": {"x": self.coherence.x, "y": self.coherence.y},
            "xi": None if self.xi is None else {"diag": self.xi.diagonal.tolist(), "trace": self.xi.trace},
            "detail": super().to_dict(),
        }

    @classmethod
    def from_dict(cls, data):
        detail = dict(data["detail"])
        detail["vq"] = tuple(detail["vq"])
        return super().from_dict(detail)
