"""Analytic reference values for the bundled machines.

Populations use the convention that level 0 of every qubit is the excited
state with occupation R. Composite indices are little-endian in the qubit
label: qubit 1 is the most significant factor of ``np.kron``.
"""

import math
from typing import Dict, Sequence

import numpy as np


def qubit_reference(p: float, R: float) -> Dict[str, object]:
    return {
        "gamma": p / 2,
        "p_I": p,
        "tau": [R, 1 - R],
        "rho_I": [0.5, 0.5],
        "r0": 2 * R - 1,
        "P": 1.0,
        "A": -1.0,
        "B": 0.0,
        "A1": -3.0,
    }


def qubit_trace_xi(p: float, r0: float, r: float) -> float:
    return (r + 1 / r) / (p * r0)


def qubit_q_d(r0: float, r: float) -> float:
    """Diagonal uncertainty of the resonantly driven qubit."""
    return math.log((1 + r0) / (1 - r0)) / r0 * (1 - r * (r0 - r))


def qubit_q_c(r0: float, r: float) -> float:
    return -math.log((1 + r0) / (1 - r0)) * (2 / r0) * r * (r0 - r)


def two_qubit_reference(p1: float, p2: float, R1: float, R2: float) -> Dict[str, object]:
    gamma = (p1 + p2) / 2
    Rb1, Rb2 = 1 - R1, 1 - R2
    P0, P1 = R1 * Rb2, Rb1 * R2
    P = P0 + P1
    r0 = R1 - R2
    d = (p1 * R1 + p2 * R2) * (p1 * Rb1 + p2 * Rb2) / (2 * gamma**2)
    d0 = (p1 * R1 + p2 * R2) / (p1 * Rb1 + p2 * Rb2) * d / 2
    A = -2 * (p1**2 + p2**2) / ((p1 + p2) ** 2 * P)
    B = -2 * p1 * p2 * r0 / ((p1 + p2) ** 2 * P)
    return {
        "gamma": gamma,
        "p_I": p1 * p2 / gamma,
        "tau": np.kron([R1, Rb1], [R2, Rb2]).tolist(),
        "rho_I": [d0, d / 2, d / 2, 1 - d - d0],
        "d": d,
        "d0": d0,
        "d1": 1 - d - d0,
        "r0": r0,
        "P": P,
        "A": A,
        "B": B,
        "A1": -2 / P,
    }


def two_qubit_symmetric_q_min(R1: float, R2: float) -> float:
    """Optimal uncertainty at equal rates, attained at r = 3 r0 / 8."""
    P0, P1 = R1 * (1 - R2), (1 - R1) * R2
    P, r0 = P0 + P1, P0 - P1
    return math.log(P0 / P1) * (P / r0) * (1 - 25 * r0**2 / (32 * P))


def qutrit_reference(p0: float, p1: float, R0: float, R1: float) -> Dict[str, object]:
    Rb0, Rb1 = 1 - R0, 1 - R1
    norm = 1 - R0 * R1
    P0, P1, P2 = R0 * Rb1 / norm, Rb0 * R1 / norm, Rb0 * Rb1 / norm
    gamma = (p0 * Rb0 + p1 * Rb1) / 2
    denominator = p0 + p1 + p0 * R0 + p1 * R1
    p_I = 2 * p0 * p1 * norm / denominator
    weight = p0 * (1 + R0) + p1 * (1 + R1)
    P = P0 + P1
    A = -2 * (p0**2 * (1 + R0) + p1**2 * (1 + R1) + p0 * p1 * (R0 + R1 + 2 * R0 * R1)) / (weight**2 * P)
    B = -4 * p0 * p1 * (R0 - R1) / (weight**2 * P)
    return {
        "gamma": gamma,
        "p_I": p_I,
        "d": 2 * (p0 * R0 + p1 * R1) / denominator,
        "tau": [P0, P1, P2],
        "r0": P0 - P1,
        "P": P,
        "A": A,
        "B": B,
        "A1": A - p_I / (P * gamma),
    }


def qutrit_delta_min(R: float) -> float:
    """Second-order near-Carnot coefficient at equal rates and R0 = R1 = R."""
    return (4 - 15 * R - 6 * R**2 + R**3) / (24 * R**2 * (1 + R))


def fridge_reference(p: Sequence[float], R: Sequence[float]) -> Dict[str, object]:
    p1, p2, p3 = p
    R1, R2, R3 = R
    tau = np.kron(np.kron([R1, 1 - R1], [R2, 1 - R2]), [R3, 1 - R3])
    return {
        "gamma": (p1 + p2 + p3) / 2,
        "tau": tau.tolist(),
        "r0": float(tau[2] - tau[5]),
        "P": float(tau[2] + tau[5]),
    }


def fridge_p_I_unbiased(p: Sequence[float]) -> float:
    """p_I at R_i = 1/2, from the effective resistance between the two
    virtual-qubit corners of the cube-shaped transition graph with edge
    conductances p_i / 2."""
    c = np.asarray(p, dtype=float) / 2
    s = c.sum()
    coupling = np.array(
        [
            [s, c[2], c[1]],
            [c[2], s, c[0]],
            [c[1], c[0], s],
        ]
    )
    return float(s - c @ np.linalg.solve(coupling, c))


def fridge_symmetric_coefficients(P: float, r0: float) -> Dict[str, float]:
    """A1 and B of the Q_d profile at p1 = p2 = p3."""
    scale = (9 + 4 * P) ** 2 * P
    return {"A1": -6 * (27 + 20 * P) / scale, "B": -108 * r0 / scale}
