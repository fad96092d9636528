import copy
import math
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Tuple

import numpy as np

from ..core.errors import DimensionMismatch, InvalidModel, UnknownReservoir
from ..utils.superop_utils import MAX_DIM
from .reservoir import Reservoir

_FIELDS = {"dim", "energies", "vq", "g", "omega_d", "reservoirs", "meta"}


@dataclass(eq=False)
class ModelSpec:
    dim: int
    energies: np.ndarray
    vq: Tuple[int, int]
    g: float
    omega_d: float
    reservoirs: List[Reservoir]
    meta: Dict[str, Any] = field(default_factory=dict)
    delta: float = field(init=False)

    def __post_init__(self):
        if not 2 <= self.dim <= MAX_DIM:
            raise InvalidModel(f"dim must lie in [2, {MAX_DIM}], got {self.dim}")
        self.energies = np.asarray(self.energies, dtype=float)
        if self.energies.shape != (self.dim,):
            raise DimensionMismatch(f"Expected {self.dim} energies, got shape {self.energies.shape}")
        i0, i1 = self.vq = (int(self.vq[0]), int(self.vq[1]))
        if i0 == i1 or not (0 <= i0 < self.dim and 0 <= i1 < self.dim):
            raise InvalidModel(f"Virtual-qubit pair {self.vq} must be two distinct levels")
        if self.g < 0:
            raise InvalidModel(f"Coupling g must be non-negative, got {self.g}")
        labels = [res.label for res in self.reservoirs]
        if len(set(labels)) != len(labels):
            raise InvalidModel(f"Reservoir labels must be unique: {labels}")
        self.delta = float(self.energies[i0] - self.energies[i1] - self.omega_d)
        if not math.isfinite(self.delta):
            raise InvalidModel("Detuning is not finite")

    def reservoir(self, label: str) -> Reservoir:
        for res in self.reservoirs:
            if res.label == label:
                return res
        raise UnknownReservoir(f"No reservoir labelled {label!r}")

    def with_g(self, g: float) -> "ModelSpec":
        return replace(self, g=g, meta=copy.deepcopy(self.meta))

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "dim": self.dim,
            "energies": self.energies.tolist(),
            "vq": list(self.vq),
            "g": self.g,
            "omega_d": self.omega_d,
            "reservoirs": [res.to_dict() for res in self.reservoirs],
        }
        if self.meta:
            data["meta"] = self.meta
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ModelSpec":
        unknown = set(data) - _FIELDS
        if unknown:
            raise InvalidModel(f"Unknown model fields: {sorted(unknown)}")
        dim = int(data["dim"])
        return cls(
            dim=dim,
            energies=data["energies"],
            vq=tuple(data["vq"]),
            g=float(data["g"]),
            omega_d=float(data["omega_d"]),
            reservoirs=[Reservoir.from_dict(res, dim) for res in data["reservoirs"]],
            meta=dict(data.get("meta", {})),
        )

    def __eq__(self, other):
        if not isinstance(other, ModelSpec):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __repr__(self):
        return (
            f"ModelSpec(dim={self.dim}, vq={self.vq}, g={self.g}, delta={self.delta}, "
            f"reservoirs={[res.label for res in self.reservoirs]})"
        )
