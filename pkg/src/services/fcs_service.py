import logging
import math
from functools import cached_property
from typing import Iterable, List, Optional, Tuple

import numpy as np
import scipy.linalg

from ..core.errors import GapCollapse
from ..core.settings import CHI_MAX, CHI_STEPS, TOLERANCES, Tolerances
from ..models.fcs_result import FcsResult
from ..models.model_spec import ModelSpec
from ..utils import superop_utils as so
from ..utils.linalg_utils import constrained_lstsq, null_vector
from .lindblad_service import LindbladService, jump_sandwiches


def dominant_eigenvalue(
    superop: np.ndarray, reference: Optional[float] = None, tolerances: Tolerances = TOLERANCES
) -> float:
    """Eigenvalue with the largest real part.

    With ``reference`` the eigenvalue nearest to it is followed instead, and
    it has to still be the dominant one.
    """
    values = scipy.linalg.eigvals(superop)
    top = int(np.argmax(values.real))
    chosen = top if reference is None else int(np.argmin(np.abs(values - reference)))
    if chosen != top:
        raise GapCollapse(f"Tracked eigenvalue {values[chosen]:.6e} lost dominance to {values[top]:.6e}")
    others = np.delete(values.real, top)
    gap = values[top].real - others.max()
    if gap < tolerances.gap_min:
        raise GapCollapse(f"Spectral gap {gap:.3e} too small to track the dominant eigenvalue")
    if abs(values[top].imag) > tolerances.tol_abs * max(1.0, float(np.max(np.abs(superop)))):
        raise GapCollapse(f"Dominant eigenvalue {values[top]} is not real")
    return float(values[top].real)


def _richardson(estimates: List[float]) -> Tuple[float, float]:
    """Extrapolate O(h^2) estimates taken at halving steps; returns value and residual."""
    table = list(estimates)
    previous = table[-1]
    power = 2
    while len(table) > 1:
        previous = table[-1]
        factor = 2**power
        table = [(factor * fine - coarse) / (factor - 1) for coarse, fine in zip(table, table[1:])]
        power += 2
    return table[0], abs(table[0] - previous)


class FcsService:
    """Counting-field statistics of one reservoir's photon current."""

    def __init__(self, model: ModelSpec, tolerances: Tolerances = TOLERANCES):
        logging.debug("Initializing FcsService")
        self.model = model
        self.tol = tolerances
        self.lindblad = LindbladService(model, tolerances)

    @cached_property
    def liouvillian(self) -> np.ndarray:
        return self.lindblad.assemble_liouvillian()

    def counting_terms(self, label: str) -> Tuple[np.ndarray, np.ndarray]:
        """First- and second-order coefficients of the tilted Liouvillian in chi."""
        res = self.model.reservoir(label)
        absorb, emit = jump_sandwiches(res)
        first = res.p * (-res.R * absorb + res.R_bar * emit)
        second = res.p * (res.R * absorb + res.R_bar * emit)
        return first, second

    def tilted_liouvillian(self, label: str, chi: float) -> np.ndarray:
        res = self.model.reservoir(label)
        absorb, emit = jump_sandwiches(res)
        return (
            self.liouvillian
            + res.p * res.R * (math.exp(-chi) - 1.0) * absorb
            + res.p * res.R_bar * (math.exp(chi) - 1.0) * emit
        )

    def lambda_curve(self, label: str, chis: Iterable[float]) -> List[Tuple[float, float]]:
        """lambda(chi) on a grid, followed outwards from chi = 0 on each side."""
        chis = sorted(set(float(c) for c in chis))
        if any(abs(c) > CHI_MAX for c in chis):
            raise ValueError(f"Counting field restricted to |chi| <= {CHI_MAX}")
        origin = dominant_eigenvalue(self.tilted_liouvillian(label, 0.0), 0.0, self.tol)
        samples = {0.0: origin}
        for branch in ([c for c in chis if c > 0], sorted((c for c in chis if c < 0), reverse=True)):
            previous = origin
            for chi in branch:
                previous = dominant_eigenvalue(self.tilted_liouvillian(label, chi), previous, self.tol)
                samples[chi] = previous
        return [(chi, samples[chi]) for chi in chis]

    def cumulants_numeric(self, label: str, steps: Tuple[float, ...] = CHI_STEPS) -> FcsResult:
        try:
            chis = [s for h in steps for s in (h, -h)]
            samples = dict(self.lambda_curve(label, chis + [0.0]))
        except GapCollapse as e:
            logging.error(f"Failed to track lambda(chi) for {label}: {e}")
            raise
        origin = samples[0.0]
        first = [(samples[h] - samples[-h]) / (2 * h) for h in steps]
        second = [(samples[h] - 2 * origin + samples[-h]) / h**2 for h in steps]
        J, J_err = _richardson(first)
        var, var_err = _richardson(second)
        logging.debug(f"Oracle cumulants for {label}: J={J:.10e} (+-{J_err:.1e}), Var={var:.10e} (+-{var_err:.1e})")
        return FcsResult(
            reservoir=label,
            chi_step=steps[-1],
            J_num=J,
            Var_num=var,
            lambda_samples=sorted(samples.items()),
            J_err=J_err,
            Var_err=var_err,
        )

    def stationary_state(self) -> np.ndarray:
        v = null_vector(self.liouvillian, self.tol.null_ratio)
        return v / (so.trace_row(self.model.dim) @ v)

    def cumulants_perturbative(self, label: str) -> Tuple[float, float]:
        """J = Tr(L1 rho), Var = Tr(L2 rho) + 2 Tr(L1 rho1) with L0 rho1 = J rho - L1 rho, Tr rho1 = 0."""
        first, second = self.counting_terms(label)
        rho = self.stationary_state()
        trace = so.trace_row(self.model.dim)
        J = trace @ first @ rho
        rho1, residual = constrained_lstsq(self.liouvillian, J * rho - first @ rho, trace, 0.0)
        logging.debug(f"First-order state for {label} solved, residual {residual:.2e}")
        var = trace @ second @ rho + 2.0 * trace @ first @ rho1
        return float(np.real(J)), float(np.real(var))
