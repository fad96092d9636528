import logging
import os
from dataclasses import dataclass

import psutil


@dataclass(frozen=True)
class Tolerances:
    tol_abs: float = 1e-10
    tol_rel: float = 1e-8
    tol_psd: float = 1e-9
    # second-smallest |eigenvalue| must exceed this multiple of the smallest
    null_ratio: float = 1e3
    gap_min: float = 1e-8


TOLERANCES = Tolerances()

CHI_STEPS = (1e-3, 5e-4, 2.5e-4)
CHI_MAX = 1.0
CARNOT_R0_SAMPLES = (1e-2, 5e-3, 2.5e-3)
PROFILE_RATIOS = (0.25, 0.5, 0.75)
PROFILE_HOLDOUT = 0.6

OPTIMIZER_STARTS = 20
OPTIMIZER_MAXITER = 500
OPTIMIZER_XATOL = 1e-7


def thread_count() -> int:
    value = os.environ.get("TURBOX_THREADS")
    if value:
        try:
            return max(1, int(value))
        except ValueError:
            logging.warning(f"Ignoring non-integer TURBOX_THREADS={value!r}")
    return psutil.cpu_count(logical=False) or 1


def log_level() -> str:
    return os.environ.get("TURBOX_LOG_LEVEL", "INFO").upper()
