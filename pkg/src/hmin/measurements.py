"""Von Neumann measurements on subsystem a, weak two-outcome measurements,
and sequential weak-measurement states."""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotUnitary, OutOfRange
from .linalg import DEGENERACY_TOL, STATE_TOL, dagger, hs_norm
from .states import DensityMatrix


@dataclass(frozen=True, eq=False)
class ProjectiveMeasurement:
    """Rank-1 measurement ``{|u_k><u_k|}`` given by the columns of a unitary."""

    vectors: np.ndarray

    @property
    def m(self) -> int:
        return self.vectors.shape[0]

    @property
    def projectors(self) -> list:
        return [np.outer(v, v.conj()) for v in self.vectors.T]

    def violations(self) -> dict:
        """Largest deviation for each measurement invariant."""
        ps = self.projectors
        eye = np.eye(self.m)
        cross = [hs_norm(p @ q) for i, p in enumerate(ps) for j, q in enumerate(ps) if i != j]
        return {
            "hermitian": max(hs_norm(p - dagger(p)) for p in ps),
            "idempotent": max(hs_norm(p @ p - p) for p in ps),
            "rank_one": max(abs(np.trace(p).real - 1.0) for p in ps),
            "orthogonal": max(cross, default=0.0),
            "complete": hs_norm(sum(ps) - eye),
        }


def projective_from_unitary(u) -> ProjectiveMeasurement:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise DimensionMismatch(f"unitary must be square, got shape {u.shape}")
    if hs_norm(dagger(u) @ u - np.eye(u.shape[0])) > STATE_TOL:
        raise NotUnitary("measurement basis is not unitary")
    return ProjectiveMeasurement(u)


def qubit_measurement(axis) -> ProjectiveMeasurement:
    """Qubit measurement along a Bloch axis; first projector is ``(I + e.sigma)/2``."""
    e = np.asarray(axis, dtype=float)
    e = e / np.linalg.norm(e)
    theta = np.arccos(np.clip(e[2], -1.0, 1.0))
    phi = np.arctan2(e[1], e[0])
    return ProjectiveMeasurement(bloch_basis(theta, phi))


def bloch_basis(theta: float, phi: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    ph = np.exp(1j * phi)
    return np.array([[c, -s], [s * ph, c * ph]], dtype=complex)


def _split_dims(mat, m):
    mat = np.asarray(mat)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] % m:
        raise DimensionMismatch(f"operator of shape {mat.shape} does not act on a {m} x n space")
    return mat.shape[0] // m


def apply_projectors(mat, projectors) -> np.ndarray:
    """``sum_k (P_k (x) I) M (P_k (x) I)`` for any list of projectors on subsystem a."""
    m = projectors[0].shape[0]
    n = _split_dims(mat, m)
    eye = np.eye(n)
    out = np.zeros_like(mat, dtype=complex)
    for p in projectors:
        big = np.kron(p, eye)
        out += big @ mat @ big
    return out


def apply_local_measurement(mat, meas: ProjectiveMeasurement) -> np.ndarray:
    n = _split_dims(mat, meas.m)
    u = meas.vectors
    t = np.asarray(mat, dtype=complex).reshape(meas.m, n, meas.m, n)
    # rotate a into the measurement basis, keep diagonal a-blocks, rotate back
    rot = np.einsum("ak,abcd,cl->kbld", u.conj(), t, u)
    blocks = np.einsum("kbkd->kbd", rot)
    out = np.einsum("ak,kbd,ck->abcd", u, blocks, u.conj())
    d = meas.m * n
    return out.reshape(d, d)


@dataclass(frozen=True, eq=False)
class Degenerate:
    """Marginal with at least one eigenvalue gap below tolerance.

    ``blocks`` groups eigenvector indices of (near-)equal eigenvalues; any
    measurement that is diagonal within ``eigenvectors`` up to a unitary on
    each block leaves the marginal invariant.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    blocks: tuple

    def __bool__(self):
        return False


def _fix_phases(v):
    out = v.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        j = np.argmax(np.abs(col))
        out[:, k] = col * (abs(col[j]) / col[j])
    return out


def eigen_blocks(w, tol):
    blocks = [[0]]
    for i in range(1, len(w)):
        if w[i] - w[i - 1] <= tol:
            blocks[-1].append(i)
        else:
            blocks.append([i])
    return tuple(tuple(b) for b in blocks)


def marginal_invariant_measurement(rho: DensityMatrix, tol: float = DEGENERACY_TOL):
    """The unique measurement leaving ``rho_a`` invariant, or ``Degenerate``.

    Eigenvectors are phase-fixed so that the largest-magnitude component is
    real and positive.
    """
    w, v = np.linalg.eigh(rho.marginal("a"))
    v = _fix_phases(v)
    blocks = eigen_blocks(w, tol)
    if len(blocks) < len(w):
        return Degenerate(w, v, blocks)
    return ProjectiveMeasurement(v)


@dataclass(frozen=True, eq=False)
class WeakScheme:
    strength: float
    split: tuple  # (P1, P2), orthogonal, summing to identity

    @property
    def tau1(self) -> float:
        return float(np.sqrt((1 - np.tanh(self.strength)) / 2))

    @property
    def tau2(self) -> float:
        return float(np.sqrt((1 + np.tanh(self.strength)) / 2))

    @property
    def tau(self) -> float:
        return 1.0 / np.cosh(self.strength)

    def operators(self):
        p1, p2 = self.split
        return (self.tau1 * p1 + self.tau2 * p2, self.tau2 * p1 + self.tau1 * p2)


def weak_scheme(strength: float, meas: ProjectiveMeasurement, k: int = 1) -> WeakScheme:
    """Two-outcome weak measurement from the first ``k`` and remaining projectors."""
    if not strength > 0:
        raise OutOfRange(f"weak measurement strength must be > 0, got {strength}")
    if not 1 <= k < meas.m:
        raise OutOfRange(f"split index k={k} outside [1, {meas.m - 1}]")
    ps = meas.projectors
    return WeakScheme(float(strength), (sum(ps[:k]), sum(ps[k:])))


def weak_apply(mat, scheme: WeakScheme) -> np.ndarray:
    """``sum_{+-x} (Omega (x) I) S (Omega (x) I)``, summed literally."""
    m = scheme.split[0].shape[0]
    n = _split_dims(mat, m)
    eye = np.eye(n)
    out = np.zeros_like(mat, dtype=complex)
    for om in scheme.operators():
        big = np.kron(om, eye)
        out += big @ mat @ big
    return out


def _projectors_of(obj):
    if isinstance(obj, ProjectiveMeasurement):
        return obj.projectors
    if isinstance(obj, WeakScheme):
        return list(obj.split)
    return list(obj)


def sequential_state(sqrt_rho, measurement, tau: float, n_steps: int) -> np.ndarray:
    """State after ``n_steps`` weak measurements: ``tau^n S + (1 - tau^n) Pi(S)``.

    ``measurement`` is a ProjectiveMeasurement, a WeakScheme (its split is
    used) or a list of orthogonal projectors.
    """
    if not 0 < tau < 1:
        raise OutOfRange(f"tau={tau} outside (0, 1)")
    if n_steps < 0 or int(n_steps) != n_steps:
        raise OutOfRange(f"n_steps must be a non-negative integer, got {n_steps}")
    s = np.asarray(sqrt_rho, dtype=complex)
    if n_steps == 0:
        return s.copy()
    t = tau**n_steps
    return t * s + (1 - t) * apply_projectors(s, _projectors_of(measurement))
