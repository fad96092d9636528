import logging
from functools import cached_property
from typing import Optional

import numpy as np

from ..core.errors import CrossCheckFailure, InvalidModel, SingularGauge
from ..core.settings import TOLERANCES, Tolerances
from ..models.model_spec import ModelSpec
from ..models.steady_report import (
    CoherentBlock,
    DiagonalSteady,
    StrongCouplingState,
    SteadyReport,
    ThermalState,
    XiOperator,
)
from ..utils import superop_utils as so
from ..utils.linalg_utils import constrained_lstsq, null_vector, probability_null_vector
from .lindblad_service import LindbladService


class SteadyStateService:
    """Steady state of the driven machine, assembled from three population-sector solves."""

    def __init__(self, model: ModelSpec, tolerances: Tolerances = TOLERANCES, cross_check: bool = True):
        logging.debug("Initializing SteadyStateService")
        self.model = model
        self.tol = tolerances
        self.cross_check = cross_check
        self.lindblad = LindbladService(model, tolerances)

    def _require_valid(self):
        report = self.lindblad.validation
        if not report.passed:
            logging.error(f"Model failed validation: {report.summary()}")
            raise InvalidModel(report.summary())

    @cached_property
    def rates(self) -> np.ndarray:
        """Population generator of the undriven machine."""
        return self.lindblad.population_generator(include_effective=False)

    def _imbalance(self) -> np.ndarray:
        i0, i1 = self.model.vq
        e = np.zeros(self.model.dim)
        e[i0], e[i1] = 1.0, -1.0
        return e

    def thermal_fixed_point(self) -> ThermalState:
        self._require_valid()
        tau = probability_null_vector(self.rates, self.tol.null_ratio)
        if np.min(tau) <= 0.0:
            raise InvalidModel(f"Thermal fixed point has non-positive populations: {tau}")
        i0, i1 = self.model.vq
        return ThermalState(populations=tau, P=float(tau[i0] + tau[i1]), r0=float(tau[i0] - tau[i1]))

    def response_rate(self) -> float:
        """p_I from W y = |Phi0><Phi0| - |Phi1><Phi1|, sum(y) = 0; independent of r0."""
        i0, i1 = self.model.vq
        y, residual = constrained_lstsq(self.rates, self._imbalance(), np.ones(self.model.dim), 0.0)
        logging.debug(f"Imbalance response solved, residual {residual:.2e}")
        return -2.0 / (y[i0] - y[i1])

    def strong_coupling_state(self, ts: Optional[ThermalState] = None) -> StrongCouplingState:
        ts = ts or self.thermal_fixed_point()
        i0, i1 = self.model.vq
        dim = self.model.dim
        p_response = self.response_rate()
        if abs(ts.r0) <= self.tol.tol_abs:
            logging.warning("r0 = 0: strong-coupling state equals tau, p_I taken from the imbalance response")
            return StrongCouplingState(
                populations=ts.populations.copy(),
                d=float(2.0 * ts.populations[i0]),
                p_I=float(p_response),
                carnot_limit=True,
            )

        # unknowns: populations v and c = p_I r0 / 2, with W v - c e = 0
        e = self._imbalance()
        matrix = np.hstack([self.rates, -e[:, None]])
        rows = np.vstack([np.append(np.ones(dim), 0.0), np.append(e, 0.0)])
        x, residual = constrained_lstsq(matrix, np.zeros(dim), rows, np.array([1.0, 0.0]))
        if residual > self.tol.tol_abs:
            raise CrossCheckFailure(f"Strong-coupling solve residual {residual:.2e} exceeds tolerance")
        v, c = x[:dim], x[dim]
        p_I = 2.0 * c / ts.r0
        if self.cross_check and abs(p_I - p_response) > self.tol.tol_rel * abs(p_response):
            raise CrossCheckFailure(f"p_I disagrees between solves: {p_I} vs {p_response}")
        if not p_I > 0:
            raise InvalidModel(f"Strong-coupling rate p_I = {p_I} is not positive")
        return StrongCouplingState(populations=v, d=float(v[i0] + v[i1]), p_I=float(p_I))

    def effective_rate(self, gamma: float) -> float:
        """p_c = 4 g^2 gamma / (gamma^2 + Delta^2), plus the rate of any effective channel."""
        return 4.0 * self.model.g**2 * gamma / (gamma**2 + self.model.delta**2) + self.channel_rate

    @cached_property
    def channel_rate(self) -> float:
        """Strength of the effective channels, which must act as a symmetric Phi0 <-> Phi1 exchange."""
        if not any(res.effective for res in self.model.reservoirs):
            return 0.0
        if self.model.g != 0.0:
            raise InvalidModel("A model carries either the coherent drive or an effective channel, not both")
        i0, i1 = self.model.vq
        exchange = self.lindblad.population_generator(include_effective=True) - self.rates
        forward, backward = exchange[i1, i0], exchange[i0, i1]
        rest = exchange.copy()
        rest[np.ix_([i0, i1], [i0, i1])] = 0.0
        if np.max(np.abs(rest)) > self.tol.tol_abs or abs(forward - backward) > self.tol.tol_abs * max(1.0, abs(forward)):
            raise InvalidModel("Effective channels must exchange the virtual-qubit levels symmetrically")
        return float(2.0 * forward)

    def direct_steady_state(self) -> np.ndarray:
        """Density matrix spanning the kernel of the full Liouvillian."""
        liouvillian = self.lindblad.assemble_liouvillian()
        rho = so.unvec(null_vector(liouvillian, self.tol.null_ratio), self.model.dim)
        rho = rho / np.trace(rho)
        return (rho + rho.conj().T) / 2

    def diagonal_steady_state(
        self, ts: Optional[ThermalState] = None, sc: Optional[StrongCouplingState] = None
    ) -> DiagonalSteady:
        ts = ts or self.thermal_fixed_point()
        sc = sc or self.strong_coupling_state(ts)
        i0, i1 = self.model.vq
        p_c = self.effective_rate(self.lindblad.decoherence_rate())
        q = (sc.p_I * ts.populations + p_c * sc.populations) / (sc.p_I + p_c)
        if self.cross_check:
            direct = np.real(np.diag(self.direct_steady_state()))
            mismatch = float(np.max(np.abs(direct - q)))
            if mismatch > self.tol.tol_rel:
                raise CrossCheckFailure(f"rho_d differs from the direct steady state by {mismatch:.2e}")
        return DiagonalSteady(q=q, r=float(q[i0] - q[i1]), qsum=float(q[i0] + q[i1]), p_c=float(p_c))

    def coherent_block(self, ds: DiagonalSteady, gamma: Optional[float] = None) -> CoherentBlock:
        gamma = gamma if gamma is not None else self.lindblad.decoherence_rate()
        g, delta = self.model.g, self.model.delta
        denominator = delta**2 + gamma**2
        block = CoherentBlock(x=g * delta * ds.r / denominator, y=-g * gamma * ds.r / denominator)
        if self.cross_check:
            self._check_full_state(ds, block)
        return block

    def _check_full_state(self, ds: DiagonalSteady, block: CoherentBlock):
        i0, i1 = self.model.vq
        rho = np.diag(ds.q).astype(complex)
        rho[i0, i1] = block.z
        rho[i1, i0] = np.conj(block.z)
        liouvillian = self.lindblad.assemble_liouvillian()
        residual = float(np.max(np.abs(liouvillian @ so.vec(rho))))
        if residual > self.tol.tol_abs * max(1.0, float(np.max(np.abs(liouvillian)))):
            raise CrossCheckFailure(f"Assembled steady state leaves residual {residual:.2e}")
        if np.linalg.eigvalsh(rho).min() < -self.tol.tol_psd:
            raise CrossCheckFailure("Assembled steady state is not positive semidefinite")

    def solve_xi(self, ds: DiagonalSteady, ts: Optional[ThermalState] = None) -> XiOperator:
        ts = ts or self.thermal_fixed_point()
        if abs(ts.r0) <= self.tol.tol_abs or ds.r == 0.0:
            raise SingularGauge("r0 = 0: the xi_d gauge cannot fix the tau component")
        i0, i1 = self.model.vq
        dim = self.model.dim
        q0, q1 = ds.q[i0], ds.q[i1]
        rhs = ds.q.copy()
        rhs[i1] -= q0 / ds.r
        rhs[i0] += q1 / ds.r
        xi, residual = constrained_lstsq(self.rates, rhs, self._imbalance(), 0.0)
        scale = max(1.0, float(np.max(np.abs(xi))))
        if residual > self.tol.tol_abs * scale:
            raise SingularGauge(f"xi_d solve residual {residual:.2e} exceeds tolerance")
        logging.debug(f"xi_d solved over {dim} levels, residual {residual:.2e}")
        return XiOperator(diagonal=xi)

    def steady_report(self) -> SteadyReport:
        try:
            ts = self.thermal_fixed_point()
            sc = self.strong_coupling_state(ts)
            gamma = self.lindblad.decoherence_rate()
            ds = self.diagonal_steady_state(ts, sc)
            block = self.coherent_block(ds, gamma)
            xi = None if sc.carnot_limit else self.solve_xi(ds, ts)
        except Exception as e:
            logging.error(f"Failed to solve steady state: {e}")
            raise
        return SteadyReport(
            thermal=ts,
            strong=sc,
            diagonal=ds,
            coherence=block,
            xi=xi,
            gamma=gamma,
            delta=self.model.delta,
            vq=self.model.vq,
        )
