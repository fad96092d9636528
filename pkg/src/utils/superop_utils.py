"""Column-stacking vectorization helpers.

vec(A rho B) = (B^T kron A) vec(rho), so the superoperator of A rho B^dagger
is kron(conj(B), A).
"""

import numpy as np

MAX_DIM = 16


def vec(op: np.ndarray) -> np.ndarray:
    return np.asarray(op, dtype=complex).reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int) -> np.ndarray:
    return np.asarray(v).reshape((dim, dim), order="F")


def ket_bra(dim: int, k: int, l: int) -> np.ndarray:
    op = np.zeros((dim, dim), dtype=complex)
    op[k, l] = 1.0
    return op


def spre(a: np.ndarray) -> np.ndarray:
    return np.kron(np.eye(a.shape[0]), a)


def spost(b: np.ndarray) -> np.ndarray:
    return np.kron(b.T, np.eye(b.shape[0]))


def sandwich(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Superoperator of rho -> a rho b^dagger."""
    return np.kron(b.conj(), a)


def commutator(h: np.ndarray) -> np.ndarray:
    return spre(h) - spost(h)


def anticommutator(a: np.ndarray) -> np.ndarray:
    return spre(a) + spost(a)


def trace_row(dim: int) -> np.ndarray:
    return vec(np.eye(dim)).conj()


def diagonal_indices(dim: int) -> np.ndarray:
    return np.arange(dim) * (dim + 1)


def apply(superop: np.ndarray, op: np.ndarray) -> np.ndarray:
    return unvec(superop @ vec(op), op.shape[0])


def is_density_matrix(rho: np.ndarray, tol_psd: float, tol: float) -> bool:
    if not np.allclose(rho, rho.conj().T, atol=tol):
        return False
    if abs(np.trace(rho) - 1.0) > tol:
        return False
    return bool(np.linalg.eigvalsh((rho + rho.conj().T) / 2).min() >= -tol_psd)
