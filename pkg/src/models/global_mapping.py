from dataclasses import dataclass

import numpy as np

from .serialization import ReportMixin


@dataclass(eq=False)
class GlobalMapping(ReportMixin):
    """Dressed-basis parameters of a strongly driven qutrit in local form."""

    theta: float
    eps: np.ndarray
    g_tilde: float
    delta_tilde: float
    _arrays = ("eps",)
