import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from ..core.errors import InvalidModel

_FIELDS = {"label", "p", "R", "omega", "temperature", "gamma", "coeffs", "n", "effective"}


@dataclass(eq=False)
class Reservoir:
    """One dissipation channel attached to the machine.

    The jump operator lowers the state it acts on; ``R`` weights the
    Gamma^dagger sandwich, ``R_bar`` the Gamma sandwich.
    """

    label: str
    p: float
    R: float
    gamma_op: np.ndarray
    n: Optional[int] = None
    omega: Optional[float] = None
    temperature: Optional[float] = None
    # classical-counterpart channel; skipped by photon-path and detailed-balance checks
    effective: bool = False
    R_bar: float = field(init=False)

    def __post_init__(self):
        if not self.p > 0:
            raise InvalidModel(f"Reservoir {self.label}: rate p must be positive, got {self.p}")
        if not 0.0 < self.R < 1.0:
            raise InvalidModel(f"Reservoir {self.label}: occupation R must lie in (0, 1), got {self.R}")
        if self.temperature is not None and not self.temperature > 0:
            raise InvalidModel(f"Reservoir {self.label}: temperature must be positive")
        self.gamma_op = np.asarray(self.gamma_op, dtype=complex)
        self.R_bar = 1.0 - self.R

    @classmethod
    def from_temperature(cls, label: str, p: float, omega: float, temperature: float, gamma_op, **kwargs):
        R = 1.0 / (1.0 + math.exp(omega / temperature))
        return cls(label=label, p=p, R=R, gamma_op=gamma_op, omega=omega, temperature=temperature, **kwargs)

    @property
    def negative_temperature(self) -> bool:
        if self.omega is None or self.omega == 0:
            return self.R > 0.5
        return (self.R > 0.5) == (self.omega > 0)

    def edges(self) -> List[tuple]:
        """(k, l) positions of the nonzero entries of the jump operator."""
        rows, cols = np.nonzero(np.abs(self.gamma_op) > 0)
        return [(int(k), int(l)) for k, l in zip(rows, cols)]

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"label": self.label, "p": self.p, "R": self.R}
        if self.omega is not None:
            data["omega"] = self.omega
        if self.temperature is not None:
            data["temperature"] = self.temperature
        positions = self.edges()
        data["gamma"] = [[k, l] for k, l in positions]
        coeffs = [self.gamma_op[k, l] for k, l in positions]
        if any(c != 1.0 for c in coeffs):
            data["coeffs"] = [[c.real, c.imag] for c in coeffs]
        if self.n is not None:
            data["n"] = self.n
        if self.effective:
            data["effective"] = True
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any], dim: int) -> "Reservoir":
        unknown = set(data) - _FIELDS
        if unknown:
            raise InvalidModel(f"Unknown reservoir fields: {sorted(unknown)}")
        gamma_op = np.zeros((dim, dim), dtype=complex)
        coeffs = data.get("coeffs") or [[1.0, 0.0]] * len(data["gamma"])
        for (k, l), (re, im) in zip(data["gamma"], coeffs):
            if not (0 <= k < dim and 0 <= l < dim):
                raise InvalidModel(f"Reservoir {data['label']}: entry ({k}, {l}) outside dim {dim}")
            gamma_op[k, l] = complex(re, im)
        return cls(
            label=data["label"],
            p=float(data["p"]),
            R=float(data["R"]),
            gamma_op=gamma_op,
            n=data.get("n"),
            omega=data.get("omega"),
            temperature=data.get("temperature"),
            effective=bool(data.get("effective", False)),
        )

    def __eq__(self, other):
        if not isinstance(other, Reservoir):
            return NotImplemented
        return self.to_dict() == other.to_dict() and np.array_equal(self.gamma_op, other.gamma_op)

    def __repr__(self):
        return f"Reservoir(label={self.label!r}, p={self.p}, R={self.R}, n={self.n})"
