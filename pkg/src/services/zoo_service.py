import logging
import math
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from ..core.errors import ConfigError, InvalidModel
from ..core.settings import TOLERANCES
from ..models.global_mapping import GlobalMapping
from ..models.model_spec import ModelSpec
from ..models.reservoir import Reservoir
from ..utils import closed_forms
from ..utils.superop_utils import ket_bra
from .steady_state_service import SteadyStateService

LOWER = ket_bra(2, 1, 0)  # |1><0|, level 0 of a qubit is the excited state


def _embed(op: np.ndarray, site: int, sites: int) -> np.ndarray:
    factors = [op if k == site else np.eye(2) for k in range(sites)]
    result = factors[0]
    for factor in factors[1:]:
        result = np.kron(result, factor)
    return result


def _qubit_register_energies(omegas: Sequence[float]) -> np.ndarray:
    """E(b_1 ... b_n) = sum_k omega_k s_k / 2 with s = +1 on bit 0."""
    energies = np.zeros(1)
    for omega in omegas:
        energies = np.add.outer(energies, [omega / 2, -omega / 2]).reshape(-1)
    return energies


def _meta(family: str, **params) -> Dict[str, Any]:
    return {"family": family, "params": {k: float(v) for k, v in params.items()}}


def driven_qubit(p: float, R: float, g: float, delta: float = 0.0, omega: float = 1.0) -> ModelSpec:
    bath = Reservoir(label="bath", p=p, R=R, gamma_op=LOWER, omega=omega)
    return ModelSpec(
        dim=2,
        energies=[omega, 0.0],
        vq=(0, 1),
        g=g,
        omega_d=omega - delta,
        reservoirs=[bath],
        meta=_meta("qubit", p=p, R=R, g=g, delta=delta, omega=omega),
    )


def two_qubit_transport(
    p1: float, p2: float, R1: float, R2: float, g: float, omega: float = 1.0
) -> ModelSpec:
    """Basis |00>, |01>, |10>, |11>; the virtual qubit is (|01>, |10>)."""
    reservoirs = [
        Reservoir(label="1", p=p1, R=R1, gamma_op=_embed(LOWER, 0, 2), omega=omega),
        Reservoir(label="2", p=p2, R=R2, gamma_op=_embed(LOWER, 1, 2), omega=omega),
    ]
    return ModelSpec(
        dim=4,
        energies=_qubit_register_energies([omega, omega]),
        vq=(1, 2),
        g=g,
        omega_d=0.0,
        reservoirs=reservoirs,
        meta=_meta("two-qubit", p1=p1, p2=p2, R1=R1, R2=R2, g=g, omega=omega),
    )


def driven_qutrit(
    E: Sequence[float], p0: float, p1: float, R0: float, R1: float, g: float, omega_d: float
) -> ModelSpec:
    E0, E1, E2 = E
    reservoirs = [
        Reservoir(label="0", p=p0, R=R0, gamma_op=ket_bra(3, 2, 0), omega=E0 - E2),
        Reservoir(label="1", p=p1, R=R1, gamma_op=ket_bra(3, 2, 1), omega=E1 - E2),
    ]
    meta = _meta("qutrit", E0=E0, E1=E1, E2=E2, p0=p0, p1=p1, R0=R0, R1=R1, g=g, omega_d=omega_d)
    meta["same_side"] = bool((E0 - E2) * (E1 - E2) > 0)
    # for positive temperatures R > 1/2 iff the level lies below E2
    meta["same_side_occupations"] = bool((R0 - 0.5) * (R1 - 0.5) >= 0)
    return ModelSpec(dim=3, energies=list(E), vq=(0, 1), g=g, omega_d=omega_d, reservoirs=reservoirs, meta=meta)


def three_qubit_fridge(
    omegas: Sequence[float], p: Sequence[float], R: Sequence[float], g: float
) -> ModelSpec:
    """Basis |abc> with qubit 1 most significant; the virtual qubit is (|010>, |101>)."""
    w1, w2, w3 = omegas
    if abs(w1 + w3 - w2) > TOLERANCES.tol_rel * max(1.0, abs(w2)):
        raise InvalidModel(f"Refrigerator needs omega1 + omega3 = omega2, got {omegas}")
    reservoirs = [
        Reservoir(label=str(k + 1), p=p[k], R=R[k], gamma_op=_embed(LOWER, k, 3), omega=omegas[k])
        for k in range(3)
    ]
    params = {f"omega{k + 1}": omegas[k] for k in range(3)}
    params.update({f"p{k + 1}": p[k] for k in range(3)})
    params.update({f"R{k + 1}": R[k] for k in range(3)})
    return ModelSpec(
        dim=8,
        energies=_qubit_register_energies(omegas),
        vq=(2, 5),
        g=g,
        omega_d=0.0,
        reservoirs=reservoirs,
        meta=_meta("fridge", g=g, **params),
    )


def global_to_local(
    E: Sequence[float],
    g: float,
    omega_d: float,
    p0: float = 1.0,
    p1: float = 1.0,
    R0: Optional[float] = None,
    R1: Optional[float] = None,
    T0: Optional[float] = None,
    T1: Optional[float] = None,
) -> Tuple[GlobalMapping, ModelSpec]:
    """Map a strongly coupled, driven qutrit onto the local driven-qutrit form."""
    E0, E1, E2 = E
    if E0 == E1 and g == 0:
        raise InvalidModel("Mapping needs E0 != E1 or g > 0")
    split = E0 - E1
    theta = math.pi / 4 if split == 0 else 0.5 * math.atan(2 * g / split)
    mean = (E0 + E1) / 2
    shift = split / 2 * math.cos(2 * theta) + g * math.sin(2 * theta)
    eps = np.array([mean + shift, mean - shift, E2])
    g_tilde = 0.5 * omega_d * math.sin(2 * theta)
    delta_tilde = eps[0] - eps[1] - omega_d * math.cos(2 * theta)
    mapping = GlobalMapping(theta=theta, eps=eps, g_tilde=g_tilde, delta_tilde=delta_tilde)

    occupations = []
    for label, R, T, gap in (("R0", R0, T0, eps[0] - E2), ("R1", R1, T1, eps[1] - E2)):
        if T is not None:
            R = 1.0 / (1.0 + math.exp(gap / T))
        if R is None:
            raise ConfigError(f"Global mapping needs {label} or its reservoir temperature")
        occupations.append(R)
    # the sign of g_tilde only flips the phase of the coherence
    model = driven_qutrit(eps, p0, p1, occupations[0], occupations[1], abs(g_tilde), eps[0] - eps[1] - delta_tilde)
    model.meta["family"] = "qutrit-global"
    model.meta["mapping"] = mapping.to_dict()
    logging.debug(f"Global mapping theta={theta:.6f}, g~={g_tilde:.6f}, delta~={delta_tilde:.6f}")
    return mapping, model


def _take(values: Dict[str, float], *names: str) -> Dict[str, float]:
    return {name: values.pop(name) for name in names}


def _resolve_qubit(values: Dict[str, float]) -> ModelSpec:
    if "r0" in values:
        values["R"] = (1 + values.pop("r0")) / 2
    return driven_qubit(**_take(values, "p", "R", "g", "delta", "omega"))


def _resolve_two_qubit(values: Dict[str, float]) -> ModelSpec:
    if "p_ratio" in values:
        values["p2"] = values.pop("p_ratio") * values["p1"]
    if "r0" in values:
        r0 = values.pop("r0")
        values["R1"], values["R2"] = (1 + r0) / 2, (1 - r0) / 2
    _require_resonant(values)
    return two_qubit_transport(**_take(values, "p1", "p2", "R1", "R2", "g", "omega"))


def _resolve_qutrit(values: Dict[str, float]) -> ModelSpec:
    if "p_ratio" in values:
        values["p1"] = values.pop("p_ratio") * values["p0"]
    E = (values.pop("E0"), values.pop("E1"), values.pop("E2"))
    delta = values.pop("delta", None)
    omega_d = values.pop("omega_d", None)
    if delta is not None:
        omega_d = E[0] - E[1] - delta
    elif omega_d is None:
        omega_d = E[0] - E[1]
    return driven_qutrit(E, omega_d=omega_d, **_take(values, "p0", "p1", "R0", "R1", "g"))


def _resolve_fridge(values: Dict[str, float]) -> ModelSpec:
    if "p_ratio" in values:
        values["p2"] = values["p3"] = values.pop("p_ratio") * values["p1"]
    _require_resonant(values)
    picks = _take(values, "omega1", "omega2", "omega3", "p1", "p2", "p3", "R1", "R2", "R3", "g")
    return three_qubit_fridge(
        omegas=[picks[f"omega{k}"] for k in (1, 2, 3)],
        p=[picks[f"p{k}"] for k in (1, 2, 3)],
        R=[picks[f"R{k}"] for k in (1, 2, 3)],
        g=picks["g"],
    )


def _resolve_global(values: Dict[str, float]) -> ModelSpec:
    _require_resonant(values)
    kwargs = _take(values, "g", "omega_d", "p0", "p1")
    E = (values.pop("E0"), values.pop("E1"), values.pop("E2"))
    for name in ("R0", "R1", "T0", "T1"):
        kwargs[name] = values.pop(name, None)
    return global_to_local(E, **kwargs)[1]


def _require_resonant(values: Dict[str, float]):
    if values.pop("delta", 0.0) != 0.0:
        raise ConfigError("This family is resonant by construction; delta must be 0")


FAMILIES: Dict[str, Tuple[Dict[str, float], Callable[[Dict[str, float]], ModelSpec], set]] = {
    "qubit": (
        {"p": 1.0, "R": 0.3, "g": 0.25, "delta": 0.0, "omega": 1.0},
        _resolve_qubit,
        {"r0"},
    ),
    "two-qubit": (
        {"p1": 1.0, "p2": 1.0, "R1": 0.7, "R2": 0.3, "g": 0.25, "omega": 1.0},
        _resolve_two_qubit,
        {"p_ratio", "r0", "delta"},
    ),
    "qutrit": (
        {"E0": 0.0, "E1": 1.0, "E2": 0.5, "p0": 1.0, "p1": 1.0, "R0": 0.7, "R1": 0.2, "g": 0.25},
        _resolve_qutrit,
        {"p_ratio", "delta", "omega_d"},
    ),
    "fridge": (
        {
            "omega1": 1.0, "omega2": 3.0, "omega3": 2.0,
            "p1": 1.0, "p2": 1.0, "p3": 1.0,
            "R1": 0.3, "R2": 0.2, "R3": 0.4,
            "g": 0.25,
        },
        _resolve_fridge,
        {"p_ratio", "delta"},
    ),
    "qutrit-global": (
        {"E0": 1.2, "E1": 1.0, "E2": 0.0, "g": 0.3, "omega_d": 0.9, "p0": 1.0, "p1": 1.0, "R0": 0.3, "R1": 0.2},
        _resolve_global,
        {"T0", "T1", "delta"},
    ),
}


class ZooService:
    """Parameterised access to the bundled machine families."""

    def __init__(self):
        logging.debug("Initializing ZooService")

    @staticmethod
    def families():
        return sorted(FAMILIES)

    def build(self, family: str, params: Optional[Dict[str, float]] = None) -> ModelSpec:
        if family not in FAMILIES:
            raise ConfigError(f"Unknown model family {family!r}; choose from {self.families()}")
        defaults, resolver, extras = FAMILIES[family]
        params = dict(params or {})
        unknown = set(params) - set(defaults) - extras - {"r_ratio"}
        if unknown:
            raise ConfigError(f"Unknown parameters for {family}: {sorted(unknown)}")
        values = {**defaults, **params}
        r_ratio = values.pop("r_ratio", None)
        if r_ratio is not None:
            if family == "qutrit-global":
                raise ConfigError("r_ratio is not available for the globally coupled qutrit")
            values["g"] = 0.0
        model = resolver(values)
        if values:
            raise ConfigError(f"Parameters not consumed by {family}: {sorted(values)}")
        if r_ratio is not None:
            model = model.with_g(self.coupling_for_ratio(model, r_ratio))
            model.meta["params"]["g"] = model.g
            model.meta["params"]["r_ratio"] = float(r_ratio)
        return model

    @staticmethod
    def coupling_for_ratio(model: ModelSpec, r_ratio: float) -> float:
        """Coupling g giving r / r0 = r_ratio, from r = p_I r0 / (p_I + p_c)."""
        if not 0.0 < r_ratio <= 1.0:
            raise ConfigError(f"r_ratio must lie in (0, 1], got {r_ratio}")
        steady = SteadyStateService(model, cross_check=False)
        p_I = steady.response_rate()
        gamma = steady.lindblad.decoherence_rate()
        p_c = p_I * (1.0 - r_ratio) / r_ratio
        return math.sqrt(p_c * (gamma**2 + model.delta**2) / (4.0 * gamma))

    def reference_values(self, model: ModelSpec) -> Dict[str, Any]:
        family = model.meta.get("family")
        params = model.meta.get("params", {})
        if family == "qubit":
            return closed_forms.qubit_reference(params["p"], params["R"])
        if family == "two-qubit":
            return closed_forms.two_qubit_reference(params["p1"], params["p2"], params["R1"], params["R2"])
        if family in ("qutrit", "qutrit-global"):
            return closed_forms.qutrit_reference(params["p0"], params["p1"], params["R0"], params["R1"])
        if family == "fridge":
            p = [params[f"p{k}"] for k in (1, 2, 3)]
            reference = closed_forms.fridge_reference(p, [params[f"R{k}"] for k in (1, 2, 3)])
            if all(params[f"R{k}"] == 0.5 for k in (1, 2, 3)):
                reference["p_I"] = closed_forms.fridge_p_I_unbiased(p)
            return reference
        raise ConfigError(f"No reference formulas for model family {family!r}")
