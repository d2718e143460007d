"""Orthonormal Hermitian operator bases and Bloch/correlation decomposition.

Coefficient matrices are stored zero-based: row/column 0 is the identity slot
(``X_1 = I/sqrt(m)`` in one-based notation), rows 1.. are the traceless
elements. Coefficients are the raw expansion coefficients
``gamma[i, j] = tr(M X_i (x) Y_j)``, so that ``sum gamma[i, j] X_i (x) Y_j``
reconstructs ``M`` exactly. The local vectors ``x`` and ``y`` are the
identity-row/column blocks of this matrix; extra ``1/sqrt(m)``-type factors
used in some presentations only rescale them and never change a direction.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionMismatch, HminError, InvalidDimension, NotHermitian
from .linalg import is_hermitian, psd_sqrt

IMAG_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class OperatorBasis:
    dim: int
    elements: np.ndarray  # shape (dim**2, dim, dim)

    def __len__(self):
        return len(self.elements)

    def gram(self) -> np.ndarray:
        flat = self.elements.reshape(len(self.elements), -1)
        return flat.conj() @ flat.T


@lru_cache(maxsize=None)
def _gell_mann(m: int) -> np.ndarray:
    elems = [np.eye(m, dtype=complex) / np.sqrt(m)]
    for j in range(m):
        for k in range(j + 1, m):
            s = np.zeros((m, m), dtype=complex)
            s[j, k] = s[k, j] = 1.0
            elems.append(s / np.sqrt(2))
    for j in range(m):
        for k in range(j + 1, m):
            a = np.zeros((m, m), dtype=complex)
            a[j, k] = -1j
            a[k, j] = 1j
            elems.append(a / np.sqrt(2))
    for l in range(1, m):
        d = np.zeros(m)
        d[:l] = 1.0
        d[l] = -l
        elems.append(np.diag(d).astype(complex) / np.sqrt(l * (l + 1)))
    out = np.array(elems)
    out.setflags(write=False)
    return out


def gell_mann_basis(m: int) -> OperatorBasis:
    """Normalized generalized Gell-Mann basis, identity first.

    Ordering after the identity: symmetric, antisymmetric, then diagonal
    families. For ``m = 2`` this gives ``I, sx, sy, sz`` (each over sqrt 2).
    """
    if int(m) != m or m < 2:
        raise InvalidDimension(f"basis dimension must be >= 2, got {m}")
    return OperatorBasis(int(m), _gell_mann(int(m)))


@dataclass(frozen=True, eq=False)
class BlochDecomposition:
    m: int
    n: int
    gamma: np.ndarray

    @property
    def x(self) -> np.ndarray:
        return self.gamma[1:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.gamma[0, 1:]

    @property
    def T(self) -> np.ndarray:
        return self.gamma[1:, 1:]

    def reconstruct(self) -> np.ndarray:
        xs = gell_mann_basis(self.m).elements
        ys = gell_mann_basis(self.n).elements
        out = np.einsum("ij,iac,jbd->abcd", self.gamma, xs, ys)
        d = self.m * self.n
        return out.reshape(d, d)


def bloch_decompose(mat, m: int, n: int) -> BlochDecomposition:
    mat = np.asarray(mat, dtype=complex)
    if mat.shape != (m * n, m * n):
        raise DimensionMismatch(f"operator of shape {mat.shape} is not {m}x{n} bipartite")
    if not is_hermitian(mat):
        raise NotHermitian("Bloch decomposition needs a Hermitian operator")
    xs = gell_mann_basis(m).elements
    ys = gell_mann_basis(n).elements
    t = mat.reshape(m, n, m, n)
    # tr(M X_i (x) Y_j) = sum M[a b, c d] X_i[c, a] Y_j[d, b]
    g = np.einsum("abcd,ica,jdb->ij", t, xs, ys)
    if np.max(np.abs(g.imag), initial=0.0) > IMAG_TOL:
        raise HminError("complex Bloch coefficients; operator is not Hermitian")
    return BlochDecomposition(m, n, np.ascontiguousarray(g.real))


def gamma_of_sqrt(rho) -> BlochDecomposition:
    """Correlation matrix of the square root of a state."""
    return bloch_decompose(psd_sqrt(rho.matrix), rho.m, rho.n)
