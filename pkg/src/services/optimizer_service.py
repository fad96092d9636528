import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import scipy.optimize
from tqdm import tqdm

from ..core.errors import (
    AllStartsFailed,
    CarnotLimit,
    ConfigError,
    NotQuadratic,
    TurboxError,
    ZeroCurrent,
)
from ..core.settings import (
    CARNOT_R0_SAMPLES,
    OPTIMIZER_MAXITER,
    OPTIMIZER_STARTS,
    OPTIMIZER_XATOL,
    PROFILE_HOLDOUT,
    PROFILE_RATIOS,
    TOLERANCES,
    Tolerances,
    thread_count,
)
from ..models.model_spec import ModelSpec
from ..models.quadratic_profile import QuadraticProfile
from ..models.steady_report import SteadyReport
from ..models.tur_report import TurReport
from .steady_state_service import SteadyStateService
from .tur_service import TurService
from .zoo_service import ZooService

TABLE_COLUMNS = ["r0", "r", "p_c", "J_c", "sigma", "var_d", "var_c", "Q_d", "Q_c", "Q", "status"]


class OptimizerService:
    """Profiles, limits and searches of Q over one model family."""

    def __init__(
        self,
        family: str,
        fixed: Optional[Dict[str, float]] = None,
        tolerances: Tolerances = TOLERANCES,
    ):
        logging.debug(f"Initializing OptimizerService for {family}")
        self.family = family
        self.fixed = dict(fixed or {})
        self.tol = tolerances
        self.zoo = ZooService()

    def build(self, params: Optional[Dict[str, float]] = None) -> ModelSpec:
        return self.zoo.build(self.family, {**self.fixed, **(params or {})})

    def evaluate(self, params: Optional[Dict[str, float]] = None, cross_check: bool = False) -> Tuple[SteadyReport, TurReport]:
        tur = TurService(self.build(params), self.tol, cross_check=cross_check)
        steady = tur.steady.steady_report()
        return steady, tur.uncertainty(steady)

    def _resonant_params(self, params: Optional[Dict[str, float]]) -> Dict[str, float]:
        if self.family == "qutrit-global":
            raise ConfigError("The globally coupled qutrit has no free zero-detuning coupling")
        base = {**self.fixed, **(params or {})}
        base.pop("g", None)
        base.pop("r_ratio", None)
        base.pop("omega_d", None)
        base["delta"] = 0.0
        return base

    def quadratic_profile(self, params: Optional[Dict[str, float]] = None) -> QuadraticProfile:
        base = self._resonant_params(params)
        ratios = list(PROFILE_RATIOS) + [PROFILE_HOLDOUT]
        samples = []
        for ratio in ratios:
            steady, report = self.evaluate({**base, "r_ratio": ratio})
            samples.append((steady.r, report.Q_d))
        P, r0 = steady.thermal.P, steady.r0
        p_I, gamma = steady.p_I, steady.gamma
        i0, i1 = steady.vq
        log_ratio = math.log(steady.thermal.populations[i0] / steady.thermal.populations[i1])
        scale = log_ratio * P / r0

        r_fit = np.array([r for r, _ in samples[:3]])
        q_fit = np.array([q for _, q in samples[:3]]) / scale
        c2, c1, c0 = np.polyfit(r_fit, q_fit, 2)
        A = -c2
        B = A * r0 - c1
        r_hold, q_hold = samples[3]
        predicted = scale * (1.0 + (r0 - r_hold) * (A * r_hold + B))
        residual = max(abs(predicted - q_hold), abs(scale) * abs(c0 - 1.0 - B * r0))
        if residual > self.tol.tol_rel * max(1.0, abs(q_hold)):
            logging.error(f"Q_d is not quadratic in r for {self.family}: residual {residual:.2e}")
            raise NotQuadratic(f"Held-out residual {residual:.2e} exceeds tolerance")

        A1 = A - p_I / (P * gamma)
        r_star = r0 / 2 - B / (2 * A1)
        Q_min = scale * (1.0 + (A1 * r0 + B) ** 2 / (4 * A1))
        F_d = (r0 - r_star) * (A * r_star + B) / r0**2
        F_c = (r0 - r_star) * (A1 - A) * r_star / r0**2
        carnot_coeff = (A1 * r0 + B) ** 2 / (4 * A1 * r0**2) + 1 / (3 * P**2)
        conjecture = A1 < 0 and 0 < r_star / r0 <= 0.5 + self.tol.tol_rel
        if not conjecture:
            logging.warning(
                f"Finding: optimum outside 0 < r*/r0 <= 1/2 for {self.family} "
                f"(A1={A1:.6g}, r*/r0={r_star / r0:.6g})"
            )
        return QuadraticProfile(
            P=P,
            r0=r0,
            A=A,
            B=B,
            A1=A1,
            r_star=r_star,
            Q_min=Q_min,
            Qc_min=-log_ratio * p_I * r0 / (4 * gamma),
            F_c=F_c,
            F_d=F_d,
            carnot_coeff=carnot_coeff,
            p_I=p_I,
            gamma=gamma,
            log_ratio=log_ratio,
            conjecture_holds=conjecture,
        )

    def thermal_imbalance(self, params: Dict[str, float]) -> float:
        model = self.build({**params, "g": 0.0})
        return SteadyStateService(model, self.tol, cross_check=False).thermal_fixed_point().r0

    def carnot_criterion(
        self,
        vary: str,
        params: Optional[Dict[str, float]] = None,
        r0_values: Sequence[float] = CARNOT_R0_SAMPLES,
        bracket: Tuple[float, float] = (1e-6, 1 - 1e-6),
    ) -> float:
        """lim r0 -> 0 of (A1 r0 + B)^2 / (4 A1 r0^2) + 1 / (3 P^2), moving ``vary`` alone."""
        base = self._resonant_params(params)

        def imbalance(value: float, target: float) -> float:
            return self.thermal_imbalance({**base, vary: value}) - target

        values = []
        for target in r0_values:
            low, high = bracket
            if imbalance(low, target) * imbalance(high, target) > 0:
                raise ConfigError(f"Varying {vary} over {bracket} never reaches r0 = {target}")
            root = scipy.optimize.brentq(imbalance, low, high, args=(target,), xtol=1e-14, rtol=1e-14)
            profile = self.quadratic_profile({**base, vary: root})
            values.append(profile.carnot_coeff)
            logging.debug(f"Near-Carnot sample r0={profile.r0:.3e} ({vary}={root:.10f}): {profile.carnot_coeff:.8f}")
        coeffs = np.polyfit(np.asarray(r0_values), np.asarray(values), len(values) - 1)
        limit = float(coeffs[-1])
        if limit < 0:
            logging.info(f"{self.family}: Q < 2 is reachable near the Carnot limit (coefficient {limit:.6f})")
        return limit

    def _objective(self, names: List[str], x: np.ndarray) -> float:
        try:
            return self.evaluate(dict(zip(names, x)))[1].Q
        except CarnotLimit:
            return 2.0
        except (TurboxError, ValueError, ZeroDivisionError, OverflowError, np.linalg.LinAlgError):
            return math.inf

    def minimize_Q(
        self,
        free: Sequence[Dict[str, Any]],
        seed: int = 0,
        starts: int = OPTIMIZER_STARTS,
        maxiter: int = OPTIMIZER_MAXITER,
    ) -> Tuple[Dict[str, float], TurReport]:
        names = [item["name"] for item in free]
        bounds = [(float(item["min"]), float(item["max"])) for item in free]
        if any(not (math.isfinite(lo) and math.isfinite(hi) and lo < hi) for lo, hi in bounds):
            raise ConfigError(f"Search bounds must be finite and ordered: {bounds}")
        rng = np.random.default_rng(seed)
        lower, upper = np.array(bounds).T
        initial = rng.uniform(lower, upper, size=(starts, len(names)))

        def descend(x0: np.ndarray):
            return scipy.optimize.minimize(
                lambda x: self._objective(names, x),
                x0,
                method="Nelder-Mead",
                bounds=bounds,
                options={"maxiter": maxiter, "xatol": OPTIMIZER_XATOL, "fatol": 1e-12},
            )

        results = {}
        with ThreadPoolExecutor(max_workers=thread_count()) as executor:
            futures = {executor.submit(descend, x0): index for index, x0 in enumerate(initial)}
            for future in tqdm(as_completed(futures), total=len(futures), desc="Multi-start", unit="start", disable=None):
                results[futures[future]] = future.result()

        finite = [res for _, res in sorted(results.items()) if math.isfinite(res.fun)]
        if not finite:
            logging.error(f"All {starts} starts for {self.family} hit invalid regions")
            raise AllStartsFailed(f"No start produced a finite Q for {self.family}")
        best = min(finite, key=lambda res: (res.fun, tuple(res.x)))
        best_params = {name: float(value) for name, value in zip(names, best.x)}
        _, report = self.evaluate(best_params, cross_check=True)
        logging.info(f"Best Q for {self.family}: {report.Q:.6f} at {best_params}")
        return best_params, report

    def violation_window(self, params: Optional[Dict[str, float]] = None, edge: float = 1e-4) -> Optional[Tuple[float, float]]:
        """Interval of r / r0 with Q < 2 at zero detuning, or None."""
        base = self._resonant_params(params)

        def excess(ratio: float) -> float:
            return self.evaluate({**base, "r_ratio": ratio})[1].Q - 2.0

        best = scipy.optimize.minimize_scalar(excess, bounds=(edge, 1 - edge), method="bounded", options={"xatol": 1e-10})
        if best.fun >= 0:
            return None
        low = scipy.optimize.brentq(excess, edge, best.x, xtol=1e-12)
        high = scipy.optimize.brentq(excess, best.x, 1 - edge, xtol=1e-12)
        return low, high

    @staticmethod
    def expand_grid(grid: Sequence[Dict[str, Any]]) -> List[Tuple[str, List[float]]]:
        axes = []
        for axis in grid:
            if "values" in axis:
                values = [float(v) for v in axis["values"]]
            elif {"start", "stop", "num"} <= set(axis):
                values = np.linspace(axis["start"], axis["stop"], int(axis["num"])).tolist()
            else:
                raise ConfigError(f"Grid axis {axis.get('name')!r} needs values or start/stop/num")
            axes.append((axis["name"], values))
        return axes

    def _row(self, params: Dict[str, float]) -> Dict[str, Any]:
        row: Dict[str, Any] = dict(params)
        row.update({column: math.nan for column in TABLE_COLUMNS})
        try:
            tur = TurService(self.build(params), self.tol, cross_check=False)
            steady = tur.steady.steady_report()
            row.update(r0=steady.r0, r=steady.r, p_c=steady.p_c, J_c=steady.p_c * steady.r / 2)
            report = tur.uncertainty(steady)
            row.update(report.csv_row(), status="ok")
        except CarnotLimit:
            row.update(sigma=0.0, Q_d=2.0, Q_c=0.0, Q=2.0, status="carnot-limit")
        except ZeroCurrent:
            row.update(sigma=0.0, status="zero-current")
        except TurboxError as e:
            logging.warning(f"Sweep point {params} failed: {e}")
            row["status"] = type(e).__name__
        return row

    def sweep(self, grid: Sequence[Dict[str, Any]]) -> pd.DataFrame:
        axes = self.expand_grid(grid)
        names = [name for name, _ in axes]
        points = [dict(zip(names, combo)) for combo in itertools.product(*(values for _, values in axes))]
        rows: Dict[int, Dict[str, Any]] = {}
        with ThreadPoolExecutor(max_workers=thread_count()) as executor:
            futures = {executor.submit(self._row, point): index for index, point in enumerate(points)}
            for future in tqdm(as_completed(futures), total=len(futures), desc="Sweep", unit="point", disable=None):
                rows[futures[future]] = future.result()
        table = pd.DataFrame([rows[index] for index in range(len(points))], columns=names + TABLE_COLUMNS)
        failed = int((table["status"] != "ok").sum())
        if failed:
            logging.warning(f"{failed} of {len(points)} sweep points were flagged")
        return table
