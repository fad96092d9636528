import logging
import math
from dataclasses import replace
from typing import Dict, Optional, Tuple

import numpy as np

from ..core.errors import CarnotLimit, CrossCheckFailure, ZeroCurrent
from ..core.settings import TOLERANCES, Tolerances
from ..models.model_spec import ModelSpec
from ..models.reservoir import Reservoir
from ..models.steady_report import DiagonalSteady, SteadyReport, ThermalState
from ..models.tur_report import TurReport
from ..utils import superop_utils as so
from .fcs_service import FcsService
from .steady_state_service import SteadyStateService

COUNTERPART_LABEL = "c"


class TurService:
    def __init__(self, model: ModelSpec, tolerances: Tolerances = TOLERANCES, cross_check: bool = True):
        logging.debug("Initializing TurService")
        self.model = model
        self.tol = tolerances
        self.cross_check = cross_check
        self.steady = SteadyStateService(model, tolerances, cross_check)
        self.lindblad = self.steady.lindblad

    @property
    def photon_counts(self) -> Dict[str, int]:
        return self.lindblad.photon_counts

    def reporting_reservoir(self) -> str:
        for res in self.model.reservoirs:
            if self.photon_counts[res.label] != 0:
                return res.label
        raise CrossCheckFailure("No reservoir carries photons along the virtual-qubit path")

    def trace_current(self, res: Reservoir, rho: np.ndarray) -> float:
        """J_i = p Tr(-R G^+ rho G + R_bar G rho G^+)."""
        gamma = res.gamma_op
        absorbed = np.trace(gamma.conj().T @ rho @ gamma)
        emitted = np.trace(gamma @ rho @ gamma.conj().T)
        return float(np.real(res.p * (-res.R * absorbed + res.R_bar * emitted)))

    def currents(self, ds: DiagonalSteady) -> Tuple[float, Dict[str, float]]:
        J_c = ds.p_c * ds.r / 2.0
        J = {res.label: -self.photon_counts[res.label] * J_c for res in self.model.reservoirs}
        if self.cross_check:
            rho = np.diag(ds.q).astype(complex)
            for res in self.model.reservoirs:
                if res.effective:
                    continue
                direct = self.trace_current(res, rho)
                if abs(direct - J[res.label]) > self.tol.tol_rel * max(abs(J_c), self.tol.tol_abs):
                    raise CrossCheckFailure(
                        f"Current into {res.label}: closed form {J[res.label]:.6e}, trace formula {direct:.6e}"
                    )
        return J_c, J

    def entropy_production(self, ts: ThermalState, ds: DiagonalSteady, J: Optional[Dict[str, float]] = None) -> float:
        i0, i1 = self.model.vq
        J_c = ds.p_c * ds.r / 2.0
        if J_c == 0.0:
            return 0.0
        sigma = J_c * math.log(ts.populations[i0] / ts.populations[i1])
        if self.cross_check and J is not None:
            summed = sum(
                J[res.label] * math.log(res.R_bar / res.R) for res in self.model.reservoirs if not res.effective
            )
            if abs(summed - sigma) > self.tol.tol_rel * max(abs(sigma), self.tol.tol_abs):
                raise CrossCheckFailure(f"Entropy production {sigma:.6e} vs reservoir sum {summed:.6e}")
        return sigma

    def variance_decomposition(self, ss: SteadyReport, J: Dict[str, float]) -> Tuple[Dict[str, float], Dict[str, float]]:
        if ss.xi is None:
            raise CarnotLimit("r0 = 0: no xi_d gauge, variance decomposition is undefined")
        gamma = ss.gamma
        coherence_factor = self.coherence_factor(ss)
        var_d, var_c = {}, {}
        for res in self.model.reservoirs:
            n = self.photon_counts[res.label]
            if n == 0:
                var_d[res.label] = var_c[res.label] = 0.0
                continue
            current = J[res.label]
            var_d[res.label] = 0.5 * ss.p_c * ss.diagonal.qsum * n**2 - 2.0 * current**2 * ss.xi.trace
            var_c[res.label] = -2.0 / gamma * coherence_factor * (ss.r / ss.r0) * current**2
        return var_d, var_c

    def coherence_factor(self, ss: SteadyReport) -> float:
        """(gamma^2 - Delta^2) / (gamma^2 + Delta^2); zero when the drive is replaced by an effective channel."""
        if self.model.g == 0.0:
            return 0.0
        return (ss.gamma**2 - ss.delta**2) / (ss.gamma**2 + ss.delta**2)

    def uncertainty(self, ss: Optional[SteadyReport] = None) -> TurReport:
        ss = ss or self.steady.steady_report()
        if ss.carnot_limit:
            raise CarnotLimit("r0 = 0: evaluate Q through the near-Carnot expansion")
        if ss.p_c == 0.0:
            raise ZeroCurrent("g = 0: currents vanish and Q is undefined")
        J_c, J = self.currents(ss.diagonal)
        sigma = self.entropy_production(ss.thermal, ss.diagonal, J)
        var_d, var_c = self.variance_decomposition(ss, J)

        i0, i1 = self.model.vq
        log_ratio = math.log(ss.thermal.populations[i0] / ss.thermal.populations[i1])
        Q_d = log_ratio * (ss.diagonal.qsum / ss.r - ss.p_c * ss.r * ss.xi.trace)
        Q_c = -log_ratio * (ss.p_c * ss.r**2 / (ss.r0 * ss.gamma)) * self.coherence_factor(ss)

        label = self.reporting_reservoir()
        logging.debug(f"Reporting Q from reservoir {label}")
        for res in self.model.reservoirs:
            if self.photon_counts[res.label] == 0:
                continue
            current = J[res.label]
            q_total = sigma * (var_d[res.label] + var_c[res.label]) / current**2
            if self.cross_check and abs(q_total - (Q_d + Q_c)) > self.tol.tol_rel * max(1.0, abs(Q_d + Q_c)):
                raise CrossCheckFailure(f"Q from reservoir {res.label} is {q_total}, closed form gives {Q_d + Q_c}")
        return TurReport(
            J_c=J_c, J=J, sigma=sigma, var_d=var_d, var_c=var_c, Q_d=Q_d, Q_c=Q_c, Q=Q_d + Q_c, reservoir=label
        )

    def classical_counterpart(self, ds: Optional[DiagonalSteady] = None) -> ModelSpec:
        """g = 0 copy of the model with H_I replaced by an infinite-temperature channel of rate p_c."""
        ds = ds or self.steady.diagonal_steady_state()
        i0, i1 = self.model.vq
        channel = Reservoir(
            label=COUNTERPART_LABEL,
            p=ds.p_c,
            R=0.5,
            gamma_op=so.ket_bra(self.model.dim, i1, i0),
            n=-1,
            effective=True,
        )
        meta = dict(self.model.meta, counterpart=True)
        return replace(self.model, g=0.0, reservoirs=list(self.model.reservoirs) + [channel], meta=meta)

    def counterpart_uncertainty(self) -> float:
        """Q of the classical counterpart from its own first two cumulants."""
        counterpart = self.classical_counterpart()
        fcs = FcsService(counterpart, self.tol)
        label = self.reporting_reservoir()
        J = {}
        var = None
        for res in counterpart.reservoirs:
            if res.effective:
                continue
            J[res.label], variance = fcs.cumulants_perturbative(res.label)
            if res.label == label:
                var = variance
        sigma = sum(J[res.label] * math.log(res.R_bar / res.R) for res in counterpart.reservoirs if not res.effective)
        return sigma * var / J[label] ** 2
