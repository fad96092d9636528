import logging
from typing import Tuple

import numpy as np
import scipy.linalg

from ..core.errors import NonUniqueNullSpace
from .superop_utils import diagonal_indices


def population_generator(superop: np.ndarray, dim: int) -> np.ndarray:
    """Rate matrix W acting on populations: W[k, l] is the rate l -> k."""
    idx = diagonal_indices(dim)
    return np.real(superop[np.ix_(idx, idx)])


def null_vector(matrix: np.ndarray, null_ratio: float) -> np.ndarray:
    """Eigenvector of the smallest-magnitude eigenvalue, rejecting degenerate kernels."""
    values, vectors = scipy.linalg.eig(matrix)
    order = np.argsort(np.abs(values))
    smallest, runner_up = np.abs(values[order[0]]), np.abs(values[order[1]])
    if runner_up < null_ratio * smallest or runner_up == 0.0:
        raise NonUniqueNullSpace(
            f"Null space is not one-dimensional (|lambda| = {smallest:.3e}, next {runner_up:.3e})"
        )
    logging.debug(f"Null vector found, |lambda| = {smallest:.3e}, gap {runner_up:.3e}")
    return vectors[:, order[0]]


def probability_null_vector(rates: np.ndarray, null_ratio: float) -> np.ndarray:
    v = np.real(null_vector(rates, null_ratio))
    return v / v.sum()


def constrained_lstsq(
    matrix: np.ndarray, rhs: np.ndarray, rows: np.ndarray, values: np.ndarray
) -> Tuple[np.ndarray, float]:
    """Least-squares solve of matrix x = rhs stacked with extra rows x = values.

    Returns the solution and the max residual over every stacked equation.
    """
    a = np.vstack([matrix, np.atleast_2d(rows)])
    b = np.concatenate([rhs, np.atleast_1d(values)])
    x, *_ = scipy.linalg.lstsq(a, b)
    residual = float(np.max(np.abs(a @ x - b)))
    return x, residual
