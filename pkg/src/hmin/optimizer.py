"""Derivative-free search over von Neumann measurements on subsystem a.

Qubits are parameterized by the Bloch axis ``(theta, phi)`` of the first
projector and searched by a 32 x 64 grid followed by Nelder-Mead polishing
from the five best grid points. Larger dimensions use
``U = V exp(i sum_k a_k G_k)`` with seeded random restarts. With a marginal
constraint, ``V`` holds the marginal's eigenvectors and the generators only
mix eigenvectors within a degenerate eigenspace, so every candidate leaves
the marginal invariant.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .basis import gell_mann_basis
from .linalg import DEGENERACY_TOL, dagger
from .measurements import ProjectiveMeasurement, bloch_basis, eigen_blocks

DEFAULT_BUDGET = 20_000
GRID_SHAPE = (32, 64)
GRID_STARTS = 5
RANDOM_RESTARTS = 20
CONVERGED_TOL = 1e-8
NM_OPTIONS = {"xatol": 1e-7, "fatol": 1e-14, "adaptive": True}
# per simplex pass; fixed so that a larger budget only extends the same evaluation sequence
SPHERE_MAXFEV = 2000
RESTART_MAXFEV = 450


class _BudgetHit(Exception):
    pass


@dataclass
class OptimizerResult:
    best_value: float
    best_params: np.ndarray
    best_measurement: ProjectiveMeasurement
    evaluations: int
    restarts: int
    converged: bool
    budget_exhausted: bool = False
    restart_values: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "best_value": float(self.best_value),
            "best_params": [float(p) for p in np.ravel(self.best_params)],
            "evaluations": int(self.evaluations),
            "restarts": int(self.restarts),
            "converged": bool(self.converged),
            "budget_exhausted": bool(self.budget_exhausted),
        }


class _Tracker:
    """Counts evaluations and remembers the best point seen so far."""

    def __init__(self, fn, sign, budget):
        self.fn = fn
        self.sign = sign
        self.budget = budget
        self.count = 0
        self.best = np.inf
        self.best_params = None
        self.hit = False

    def __call__(self, params):
        if self.count >= self.budget:
            self.hit = True
            raise _BudgetHit
        self.count += 1
        val = self.sign * float(self.fn(params))
        if val < self.best:
            self.best = val
            self.best_params = np.array(params, dtype=float)
        return val


class _UnitaryChart:
    def __init__(self, frame, blocks):
        self.frame = frame
        m = frame.shape[0]
        gens = []
        for blk in blocks:
            k = len(blk)
            if k < 2:
                continue
            # diagonal generators only rephase basis vectors and leave the measurement unchanged
            for g in gell_mann_basis(k).elements[1 : k * k - k + 1]:
                full = np.zeros((m, m), dtype=complex)
                full[np.ix_(blk, blk)] = g
                gens.append(full)
        self.generators = np.array(gens) if gens else np.zeros((0, m, m), dtype=complex)

    @property
    def size(self):
        return len(self.generators)

    def __call__(self, a):
        h = np.tensordot(a, self.generators, axes=1)
        w, v = np.linalg.eigh(h)
        return self.frame @ ((v * np.exp(1j * w)) @ dagger(v))


def optimize_measurement(
    objective,
    m: int,
    mode: str = "min",
    constraint=None,
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
    degeneracy_tol: float = DEGENERACY_TOL,
) -> OptimizerResult:
    """Optimize ``objective(ProjectiveMeasurement) -> float`` over measurements.

    ``constraint`` is an optional ``m x m`` marginal that every candidate must
    leave invariant. When its spectrum is nondegenerate the feasible set is a
    single measurement and exactly one evaluation is made.

    Exhausting ``budget`` does not raise: the best point found so far is
    returned with ``converged=False`` and ``budget_exhausted=True``.
    """
    if mode not in ("min", "max"):
        raise ValueError(f"mode must be 'min' or 'max', got {mode!r}")
    if budget < 1:
        raise ValueError("budget must be >= 1")
    sign = 1.0 if mode == "min" else -1.0

    if constraint is not None:
        w, v = np.linalg.eigh(np.asarray(constraint))
        blocks = eigen_blocks(w, degeneracy_tol)
    else:
        v = np.eye(m, dtype=complex)
        blocks = (tuple(range(m)),)

    if len(blocks) == m:
        meas = ProjectiveMeasurement(v)
        val = float(objective(meas))
        return OptimizerResult(val, np.zeros(0), meas, 1, 1, True, False, [val])

    if m == 2:
        def to_unitary(p):
            return bloch_basis(p[0], p[1])

        tracker = _Tracker(lambda p: objective(ProjectiveMeasurement(to_unitary(p))), sign, budget)
        restart_values = _sphere_search(tracker)
    else:
        chart = _UnitaryChart(v, blocks)
        to_unitary = chart
        tracker = _Tracker(lambda p: objective(ProjectiveMeasurement(chart(p))), sign, budget)
        restart_values = _random_restarts(tracker, chart.size, seed)

    exhausted = tracker.hit
    finished = sorted(restart_values)
    converged = (
        not exhausted
        and len(finished) >= 2
        and finished[1] - finished[0] <= CONVERGED_TOL
    )
    if len(finished) == 1 and not exhausted:
        converged = True
    params = tracker.best_params
    return OptimizerResult(
        best_value=sign * tracker.best,
        best_params=params,
        best_measurement=ProjectiveMeasurement(to_unitary(params)),
        evaluations=tracker.count,
        restarts=len(restart_values),
        converged=converged,
        budget_exhausted=exhausted,
        restart_values=[sign * r for r in restart_values],
    )


def _sphere_search(tracker):
    nt, nphi = GRID_SHAPE
    thetas = (np.arange(nt) + 0.5) * np.pi / nt
    phis = np.arange(nphi) * 2 * np.pi / nphi
    scored = []
    try:
        for t in thetas:
            for p in phis:
                scored.append((tracker((t, p)), t, p))
    except _BudgetHit:
        return []
    # stable sort keeps grid order among ties
    scored.sort(key=lambda r: r[0])
    return _polish(tracker, [np.array(s[1:]) for s in scored[:GRID_STARTS]], maxfev=SPHERE_MAXFEV)


def _random_restarts(tracker, dim, seed):
    rng = np.random.default_rng(seed)
    starts = [rng.uniform(-np.pi, np.pi, dim) for _ in range(RANDOM_RESTARTS)]
    return _polish(tracker, starts, maxfev=RESTART_MAXFEV)


def _polish(tracker, starts, maxfev):
    values = []
    for x0 in starts:
        try:
            res = minimize(tracker, x0, method="Nelder-Mead", options={**NM_OPTIONS, "maxfev": maxfev})
            # one restart from the simplex optimum guards against premature collapse
            res = minimize(tracker, res.x, method="Nelder-Mead", options={**NM_OPTIONS, "maxfev": maxfev})
        except _BudgetHit:
            break
        values.append(float(res.fun))
    return values
