"""Bipartite density matrices: validation, state families, random states, file I/O.

Computational kets are ordered a-major, ``|ij> = |i>_a (x) |j>_b``.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    DimensionMismatch,
    HminError,
    InvalidRank,
    InvalidSchmidt,
    NotHermitian,
    NotPSD,
    NotUnitary,
    OutOfRange,
)
from .linalg import STATE_TOL, dagger, hs_norm, partial_trace

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    matrix: np.ndarray
    m: int
    n: int

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=complex)
        d = self.m * self.n
        if mat.shape != (d, d):
            raise DimensionMismatch(f"matrix shape {mat.shape} does not match {self.m}x{self.n}")
        if hs_norm(mat - dagger(mat)) > STATE_TOL:
            raise NotHermitian("density matrix is not Hermitian")
        mat = 0.5 * (mat + dagger(mat))
        tr = np.trace(mat).real
        if abs(tr - 1.0) > STATE_TOL:
            raise HminError(f"trace is {float(tr):.6g}, expected 1")
        lo = np.linalg.eigvalsh(mat)[0]
        if lo < -STATE_TOL:
            raise NotPSD(f"smallest eigenvalue {lo:.3e} is negative")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @property
    def dims(self):
        return (self.m, self.n)

    def marginal(self, keep: str = "a") -> np.ndarray:
        return partial_trace(self.matrix, self.dims, keep)

    def purity(self) -> float:
        return float(np.vdot(self.matrix, self.matrix).real)

    def conjugate_by(self, u_a, u_b) -> "DensityMatrix":
        """Apply the local unitary ``u_a (x) u_b``."""
        w = np.kron(u_a, u_b)
        return DensityMatrix(w @ self.matrix @ dagger(w), self.m, self.n)


@dataclass(frozen=True)
class SchmidtForm:
    coefficients: tuple
    dim_a: int
    dim_b: int
    tol: float = field(default=1e-12, repr=False)

    def __post_init__(self):
        s = np.asarray(self.coefficients, dtype=float)
        if s.ndim != 1 or s.size == 0:
            raise InvalidSchmidt("need a non-empty list of coefficients")
        if np.any(s < 0):
            raise InvalidSchmidt("Schmidt coefficients must be non-negative")
        if abs(s.sum() - 1.0) > self.tol:
            raise InvalidSchmidt(f"Schmidt coefficients sum to {s.sum()!r}")
        if s.size > min(self.dim_a, self.dim_b):
            raise InvalidSchmidt("more coefficients than min(dim_a, dim_b)")
        object.__setattr__(self, "coefficients", tuple(float(v) for v in s))


def _check_unitary(u, dim, name):
    if u is None:
        return np.eye(dim, dtype=complex)
    u = np.asarray(u, dtype=complex)
    if u.shape != (dim, dim):
        raise DimensionMismatch(f"{name} has shape {u.shape}, expected {(dim, dim)}")
    if hs_norm(dagger(u) @ u - np.eye(dim)) > STATE_TOL:
        raise NotUnitary(f"{name} is not unitary")
    return u


def pure_state(psi, m: int, n: int) -> DensityMatrix:
    psi = np.asarray(psi, dtype=complex).ravel()
    psi = psi / np.linalg.norm(psi)
    return DensityMatrix(np.outer(psi, psi.conj()), m, n)


def pure_from_schmidt(s: SchmidtForm, u_a=None, u_b=None) -> DensityMatrix:
    ua = _check_unitary(u_a, s.dim_a, "u_a")
    ub = _check_unitary(u_b, s.dim_b, "u_b")
    psi = np.zeros(s.dim_a * s.dim_b, dtype=complex)
    for i, si in enumerate(s.coefficients):
        psi += np.sqrt(si) * np.kron(ua[:, i], ub[:, i])
    return DensityMatrix(np.outer(psi, psi.conj()), s.dim_a, s.dim_b)


BELL_SIGNS = np.array(
    # <sx sx>, <sy sy>, <sz sz> on Phi+, Phi-, Psi+, Psi-
    [[1, -1, 1], [-1, 1, 1], [1, 1, -1], [-1, -1, -1]],
    dtype=float,
)


def bell_diagonal_eigenvalues(c) -> np.ndarray:
    """Eigenvalues on |Phi+>, |Phi->, |Psi+>, |Psi-> in that order."""
    c = np.asarray(c, dtype=float)
    return 0.25 * (1.0 + BELL_SIGNS @ c)


def bell_diagonal(c) -> DensityMatrix:
    c = np.asarray(c, dtype=float)
    if c.shape != (3,):
        raise DimensionMismatch("bell_diagonal needs three correlation coefficients")
    lam = bell_diagonal_eigenvalues(c)
    if lam.min() < -STATE_TOL:
        raise NotPSD(f"c = {tuple(c)} lies outside the physical tetrahedron")
    rho = np.eye(4, dtype=complex)
    for ci, s in zip(c, PAULI):
        rho = rho + ci * np.kron(s, s)
    return DensityMatrix(rho / 4, 2, 2)


def max_entangled_vector(n: int) -> np.ndarray:
    return np.eye(n, dtype=complex).ravel() / np.sqrt(n)


def bell_state() -> DensityMatrix:
    """(|00> + |11>)/sqrt 2."""
    return pure_state(max_entangled_vector(2), 2, 2)


def isotropic(n: int, x: float) -> DensityMatrix:
    if not 0.0 <= x <= 1.0:
        raise OutOfRange(f"isotropic parameter x={x} outside [0, 1]")
    phi = max_entangled_vector(n)
    d = n * n
    rho = (1 - x) / (d - 1) * np.eye(d) + (d * x - 1) / (d - 1) * np.outer(phi, phi.conj())
    return DensityMatrix(rho, n, n)


def flip_operator(d: int) -> np.ndarray:
    f = np.zeros((d * d, d * d), dtype=complex)
    for a in range(d):
        for b in range(d):
            f[a * d + b, b * d + a] = 1.0
    return f


def werner(d: int, x: float) -> DensityMatrix:
    if not -1.0 <= x <= 1.0:
        raise OutOfRange(f"Werner parameter x={x} outside [-1, 1]")
    norm = d**3 - d
    rho = (d - x) / norm * np.eye(d * d) + (x * d - 1) / norm * flip_operator(d)
    return DensityMatrix(rho, d, d)


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_density(m: int, n: int, rank: int = None, seed=None) -> DensityMatrix:
    """Ginibre-distributed state ``G G^dagger / tr(G G^dagger)`` with ``G`` of shape (mn, rank)."""
    d = m * n
    rank = d if rank is None else rank
    if not 1 <= rank <= d:
        raise InvalidRank(f"rank {rank} outside [1, {d}]")
    rng = _rng(seed)
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ dagger(g)
    return DensityMatrix(rho / np.trace(rho).real, m, n)


def random_unitary(d: int, seed=None) -> np.ndarray:
    """Haar unitary via QR with phase correction."""
    rng = _rng(seed)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_schmidt(dim_a: int, dim_b: int, seed=None) -> SchmidtForm:
    rng = _rng(seed)
    k = min(dim_a, dim_b)
    s = rng.dirichlet(np.ones(k))
    s = s / s.sum()
    return SchmidtForm(tuple(s), dim_a, dim_b, tol=1e-10)


def product_state(rho_a, rho_b) -> DensityMatrix:
    rho_a = np.asarray(rho_a)
    rho_b = np.asarray(rho_b)
    return DensityMatrix(np.kron(rho_a, rho_b), rho_a.shape[0], rho_b.shape[0])


def attach_ancilla(rho: DensityMatrix, sigma_c) -> DensityMatrix:
    """``rho (x) sigma_c`` with the ancilla appended to subsystem b."""
    sigma = np.atleast_2d(np.asarray(sigma_c, dtype=complex))
    k = sigma.shape[0]
    DensityMatrix(sigma, k, 1)
    return DensityMatrix(np.kron(rho.matrix, sigma), rho.m, rho.n * k)


def with_maximally_mixed_marginal(rho: DensityMatrix) -> DensityMatrix:
    """Local filter ``(A (x) I) rho (A (x) I)`` with ``A = (m rho_a)^(-1/2)``.

    The result has ``rho_a = I/m`` and keeps the correlations of ``rho``.
    ``rho_a`` must be full rank.
    """
    w, v = np.linalg.eigh(rho.marginal("a"))
    if w[0] <= 1e-12:
        raise HminError("marginal is singular; cannot rebalance")
    a = (v / np.sqrt(rho.m * w)) @ dagger(v)
    f = np.kron(a, np.eye(rho.n))
    out = f @ rho.matrix @ dagger(f)
    return DensityMatrix(out / np.trace(out).real, rho.m, rho.n)


def swap_subsystems(rho: DensityMatrix) -> DensityMatrix:
    t = rho.matrix.reshape(rho.m, rho.n, rho.m, rho.n).transpose(1, 0, 3, 2)
    d = rho.m * rho.n
    return DensityMatrix(t.reshape(d, d), rho.n, rho.m)


# -- file format: {"m": int, "n": int, "matrix": [[[re, im], ...], ...]}


def state_to_json(rho: DensityMatrix) -> dict:
    rows = [[[float(z.real), float(z.imag)] for z in row] for row in rho.matrix]
    return {"m": rho.m, "n": rho.n, "matrix": rows}


def state_from_json(obj) -> DensityMatrix:
    try:
        m = obj["m"]
        n = obj["n"]
        rows = obj["matrix"]
    except (KeyError, TypeError) as exc:
        raise HminError(f"state file missing field: {exc}") from exc
    if not (isinstance(m, int) and isinstance(n, int)) or m < 1 or n < 1:
        raise HminError("'m' and 'n' must be positive integers")
    try:
        arr = np.array(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise HminError(f"malformed matrix entries: {exc}") from exc
    if arr.ndim != 3 or arr.shape[-1] != 2:
        raise HminError("matrix must be nested rows of [re, im] pairs")
    return DensityMatrix(arr[..., 0] + 1j * arr[..., 1], m, n)


def save_state(rho: DensityMatrix, path) -> None:
    Path(path).write_text(json.dumps(state_to_json(rho)) + "\n")


def load_state(path) -> DensityMatrix:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise HminError(f"state file is not valid JSON: {exc}") from exc
    return state_from_json(obj)
