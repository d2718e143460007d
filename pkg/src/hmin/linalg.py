"""Dense complex linear algebra used by every other module.

All tolerances are absolute and assume unit-trace-scale matrices.
"""

from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatch, NoConvergence, NotHermitian, NotPSD

HERMITIAN_TOL = 1e-9
PSD_TOL = 1e-10
STATE_TOL = 1e-10
DEGENERACY_TOL = 1e-8
CLIP_TOL = 1e-10


class Spectrum(NamedTuple):
    """Ascending eigenvalues and orthonormal eigenvectors (as columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def hs_norm(a) -> float:
    return float(np.linalg.norm(a))


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.transpose(a))


def is_hermitian(h, tol: float = HERMITIAN_TOL) -> bool:
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        return False
    return hs_norm(h - dagger(h)) <= tol * max(1.0, hs_norm(h))


def herm_eig(h) -> Spectrum:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    h = np.asarray(h, dtype=complex)
    if not is_hermitian(h):
        raise NotHermitian("matrix is not Hermitian")
    h = 0.5 * (h + dagger(h))
    try:
        w, v = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    return Spectrum(w, v)


def psd_sqrt(rho) -> np.ndarray:
    """Principal square root of a positive semidefinite Hermitian matrix.

    Eigenvalues in ``[-PSD_TOL, 0)`` are treated as round-off and clipped to 0.
    """
    w, v = herm_eig(rho)
    if w.size and w[0] < -PSD_TOL:
        raise NotPSD(f"smallest eigenvalue {w[0]:.3e} < {-PSD_TOL:g}")
    s = np.sqrt(np.clip(w, 0.0, None))
    out = (v * s) @ dagger(v)
    return 0.5 * (out + dagger(out))


def kron(a, b) -> np.ndarray:
    return np.kron(np.asarray(a), np.asarray(b))


def partial_trace(m, dims, keep: str = "a") -> np.ndarray:
    """Reduced operator of a bipartite ``m x n`` operator.

    ``keep="a"`` traces out subsystem b and returns an ``m x m`` matrix;
    ``keep="b"`` returns ``n x n``.
    """
    m_mat = np.asarray(m)
    da, db = dims
    if m_mat.ndim != 2 or m_mat.shape != (da * db, da * db):
        raise DimensionMismatch(f"operator of shape {m_mat.shape} is not {da}x{db} bipartite")
    t = m_mat.reshape(da, db, da, db)
    if keep == "a":
        return np.einsum("ibjb->ij", t)
    if keep == "b":
        return np.einsum("aiaj->ij", t)
    raise ValueError(f"keep must be 'a' or 'b', got {keep!r}")


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product tr(a^dagger b)."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    return complex(np.vdot(a, b))


def commutator(a, b) -> np.ndarray:
    return a @ b - b @ a
