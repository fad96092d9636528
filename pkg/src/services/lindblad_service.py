import logging
import math
from collections import deque
from functools import cached_property
from typing import Dict, List, Tuple

import numpy as np
from scipy.sparse.csgraph import connected_components

from ..core.errors import (
    DimensionMismatch,
    Disconnected,
    InconsistentPaths,
    InvalidModel,
    NonUniqueNullSpace,
    NotConfined,
)
from ..core.settings import TOLERANCES, Tolerances
from ..models.model_spec import ModelSpec
from ..models.reservoir import Reservoir
from ..models.validation_report import ValidationReport
from ..utils import superop_utils as so
from ..utils.linalg_utils import population_generator, probability_null_vector


def build_dissipator(res: Reservoir, dim: int) -> np.ndarray:
    """Superoperator of p R (G^+ rho G - {G G^+, rho}/2) + p R_bar (G rho G^+ - {G^+ G, rho}/2)."""
    gamma = res.gamma_op
    if gamma.shape != (dim, dim):
        raise DimensionMismatch(f"Reservoir {res.label}: jump operator {gamma.shape} does not match dim {dim}")
    gamma_dag = gamma.conj().T
    gain = so.sandwich(gamma_dag, gamma_dag) - 0.5 * so.anticommutator(gamma @ gamma_dag)
    loss = so.sandwich(gamma, gamma) - 0.5 * so.anticommutator(gamma_dag @ gamma)
    return res.p * (res.R * gain + res.R_bar * loss)


def jump_sandwiches(res: Reservoir) -> Tuple[np.ndarray, np.ndarray]:
    """(G^+ rho G, G rho G^+) superoperators, without rates."""
    gamma = res.gamma_op
    gamma_dag = gamma.conj().T
    return so.sandwich(gamma_dag, gamma_dag), so.sandwich(gamma, gamma)


class LindbladService:
    def __init__(self, model: ModelSpec, tolerances: Tolerances = TOLERANCES):
        logging.debug("Initializing LindbladService")
        self.model = model
        self.tol = tolerances

    @cached_property
    def dissipators(self) -> Dict[str, np.ndarray]:
        return {res.label: build_dissipator(res, self.model.dim) for res in self.model.reservoirs}

    def dissipator_sum(self, include_effective: bool = True) -> np.ndarray:
        total = np.zeros((self.model.dim**2, self.model.dim**2), dtype=complex)
        for res in self.model.reservoirs:
            if include_effective or not res.effective:
                total += self.dissipators[res.label]
        return total

    def hamiltonian(self) -> np.ndarray:
        """Rotating-frame Hamiltonian: Delta |Phi0><Phi0| + g (|Phi0><Phi1| + h.c.)."""
        m = self.model
        i0, i1 = m.vq
        h = np.zeros((m.dim, m.dim), dtype=complex)
        h[i0, i0] = m.delta
        h[i0, i1] = h[i1, i0] = m.g
        return h

    def assemble_liouvillian(self) -> np.ndarray:
        report = self.validation
        if not report.passed:
            logging.error(f"Refusing to assemble Liouvillian: {report.summary()}")
            raise InvalidModel(report.summary())
        return -1j * so.commutator(self.hamiltonian()) + self.dissipator_sum()

    def population_generator(self, include_effective: bool = True) -> np.ndarray:
        return population_generator(self.dissipator_sum(include_effective), self.model.dim)

    def _transition_edges(self) -> Dict[int, List[Tuple[int, str, int]]]:
        adjacency: Dict[int, List[Tuple[int, str, int]]] = {k: [] for k in range(self.model.dim)}
        for res in self.model.reservoirs:
            if res.effective:
                continue
            for k, l in res.edges():
                if k == l:
                    continue
                # G = |k><l| carries l -> k on emission and k -> l on absorption
                adjacency[l].append((k, res.label, +1))
                adjacency[k].append((l, res.label, -1))
        return adjacency

    def enumerate_paths(self) -> List[Dict[str, int]]:
        """Photon-count vectors of every simple Phi0 -> Phi1 path."""
        i0, i1 = self.model.vq
        adjacency = self._transition_edges()
        labels = [res.label for res in self.model.reservoirs if not res.effective]
        found = []
        queue = deque([(i0, (i0,), dict.fromkeys(labels, 0))])
        while queue:
            node, visited, counts = queue.popleft()
            if node == i1:
                found.append(counts)
                continue
            for nxt, label, sign in adjacency[node]:
                if nxt in visited:
                    continue
                step = dict(counts)
                step[label] += sign
                queue.append((nxt, visited + (nxt,), step))
        return found

    def derive_photon_counts(self) -> Dict[str, int]:
        paths = self.enumerate_paths()
        if not paths:
            raise Disconnected(f"No transition path joins levels {self.model.vq}")
        reference = paths[0]
        for counts in paths[1:]:
            if counts != reference:
                raise InconsistentPaths(f"Paths disagree on photon counts: {reference} vs {counts}")
        result = {}
        for res in self.model.reservoirs:
            if res.effective:
                result[res.label] = res.n if res.n is not None else -1
                continue
            if res.n is not None and res.n != reference[res.label]:
                raise InconsistentPaths(
                    f"Reservoir {res.label} declares n={res.n}, paths give n={reference[res.label]}"
                )
            result[res.label] = reference[res.label]
        logging.debug(f"Photon counts over {len(paths)} paths: {result}")
        return result

    @cached_property
    def photon_counts(self) -> Dict[str, int]:
        return self.derive_photon_counts()

    def physical_photon_counts(self) -> Dict[str, int]:
        """Counts in the energy-ordered convention, sign(omega) * n."""
        counts = dict(self.photon_counts)
        for res in self.model.reservoirs:
            if res.omega is not None and res.omega < 0:
                counts[res.label] = -counts[res.label]
        return counts

    def _confined(self, res: Reservoir) -> bool:
        i0, i1 = self.model.vq
        action = so.apply(self.dissipators[res.label], so.ket_bra(self.model.dim, i0, i1))
        action[i0, i1] = 0.0
        return bool(np.max(np.abs(action)) <= self.tol.tol_abs)

    def _connected(self) -> bool:
        adjacency = np.zeros((self.model.dim, self.model.dim))
        for res in self.model.reservoirs:
            for k, l in res.edges():
                adjacency[k, l] = adjacency[l, k] = 1.0
        count, _ = connected_components(adjacency, directed=False)
        return count == 1

    def _thermally_consistent(self, res: Reservoir) -> bool:
        if res.omega is None:
            return True
        if res.temperature is not None:
            expected = math.exp(-res.omega / res.temperature)
            if abs(res.R / res.R_bar - expected) > self.tol.tol_rel * max(1.0, expected):
                return False
        energies = self.model.energies
        gap_tol = self.tol.tol_rel * max(1.0, abs(res.omega))
        return all(abs(energies[l] - energies[k] - res.omega) <= gap_tol for k, l in res.edges() if k != l)

    def _detailed_balance(self) -> Tuple[bool, str]:
        try:
            tau = probability_null_vector(self.population_generator(include_effective=False), self.tol.null_ratio)
        except NonUniqueNullSpace as e:
            return False, str(e)
        if np.min(tau) <= 0.0:
            return False, "g=0 fixed point has non-positive populations"
        rho = np.diag(tau).astype(complex)
        for res in self.model.reservoirs:
            if res.effective:
                continue
            residual = np.max(np.abs(so.apply(self.dissipators[res.label], rho)))
            if residual > self.tol.tol_abs * max(1.0, res.p):
                return False, f"reservoir {res.label} is not in detailed balance (residual {residual:.2e})"
        return True, ""

    def validate_model(self) -> ValidationReport:
        messages = []
        confinement = True
        for res in self.model.reservoirs:
            if not self._confined(res):
                confinement = False
                messages.append(f"reservoir {res.label} creates coherence outside the virtual qubit")
        connectivity = self._connected()
        if not connectivity:
            messages.append("transition graph is disconnected")
        counts: Dict[str, int] = {}
        try:
            counts = self.derive_photon_counts()
            photon_ok = True
        except (Disconnected, InconsistentPaths) as e:
            photon_ok = False
            messages.append(str(e))
        balance_ok, detail = (self._detailed_balance() if connectivity else (False, "skipped: disconnected"))
        if detail:
            messages.append(detail)
        thermal_ok = True
        for res in self.model.reservoirs:
            if not self._thermally_consistent(res):
                thermal_ok = False
                messages.append(f"reservoir {res.label} has inconsistent (omega, temperature) or gaps")
        negative = [res.label for res in self.model.reservoirs if not res.effective and res.negative_temperature]
        for label in negative:
            logging.warning(f"Reservoir {label} has a negative effective temperature")
        report = ValidationReport(
            confinement=confinement,
            connectivity=connectivity,
            photon_counts=photon_ok,
            detailed_balance=balance_ok,
            thermal_consistency=thermal_ok,
            n=counts,
            negative_temperature=negative,
            messages=messages,
        )
        logging.debug(f"Validation passed={report.passed} for {self.model}")
        return report

    @cached_property
    def validation(self) -> ValidationReport:
        return self.validate_model()

    def decoherence_rate(self) -> float:
        m = self.model
        i0, i1 = m.vq
        action = so.apply(self.dissipator_sum(include_effective=False), so.ket_bra(m.dim, i1, i0))
        coefficient = action[i1, i0]
        action[i1, i0] = 0.0
        if np.max(np.abs(action)) > self.tol.tol_abs:
            raise NotConfined("Dissipators move the virtual-qubit coherence out of its subspace")
        gamma = -float(np.real(coefficient))
        if not gamma > 0:
            raise NotConfined(f"Virtual-qubit coherence does not decay (gamma = {gamma})")
        return gamma
