"""End-to-end verification battery.

Each ``check_*`` function runs one group of closed-form/search comparisons or
invariance properties on seeded states and returns a :class:`CheckResult`.
``run_verification`` strings them together for the ``verify`` command.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from . import states as st
from .measurements import marginal_invariant_measurement, projective_from_unitary
from .measures import (
    affinity_min,
    h_min,
    h_min_2xn_closed,
    h_min_bell_diagonal,
    h_min_isotropic,
    h_min_pure,
    h_min_upper_bound,
    h_min_werner,
    hs_min,
    hs_min_bell_diagonal,
    optimal_measurement,
    seq_distance,
    seq_distance_paths,
    skew_min,
    weak_h_min,
)


@dataclass
class CheckResult:
    name: str
    passed: bool
    max_residual: float
    tolerance: float
    info: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "passed": bool(self.passed),
            "max_residual": float(self.max_residual),
            "tolerance": float(self.tolerance),
            "info": self.info,
        }

    def line(self):
        flag = "PASS" if self.passed else "FAIL"
        return f"{flag} {self.name}: max residual {self.max_residual:.3e} (tol {self.tolerance:g})"


def _check(name, residuals, tol, **info):
    worst = float(max(residuals, default=0.0))
    return CheckResult(name, worst <= tol, worst, tol, info)


def _search_value(rep):
    """H-MIN implied by the search certificate of an ``h_min`` report."""
    return 1.0 - rep.optimizer_certificate.best_value


# -- state batteries -----------------------------------------------------------


def random_battery(count, seed, dims=((2, 2), (2, 3))):
    """Seeded random states cycling through ``dims`` with ranks 1..mn."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        m, n = dims[i % len(dims)]
        rank = int(rng.integers(1, m * n + 1))
        out.append((f"random_{m}x{n}_r{rank}_{i}", st.random_density(m, n, rank, rng)))
    return out


def family_battery():
    return [
        ("bell", st.bell_state()),
        ("bell_diagonal_-0.5", st.bell_diagonal([-0.5, -0.5, -0.5])),
        ("bell_diagonal_mixed", st.bell_diagonal([0.8, -0.6, 0.4])),
        ("isotropic_2_0.6", st.isotropic(2, 0.6)),
        ("werner_2_-0.3", st.werner(2, -0.3)),
    ]


def full_battery(count, seed):
    return family_battery() + random_battery(count, seed)


def random_product(m, n, rng):
    a = st.random_density(m, 1, seed=rng).matrix
    b = st.random_density(n, 1, seed=rng).matrix
    return st.product_state(a, b)


def balanced_marginal_battery(count, seed):
    """States with maximally mixed qubit marginal (the x = 0 branch)."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        n = 2 if i % 2 == 0 else 3
        rank = int(rng.integers(1, 2 * n + 1))
        base = st.random_density(2, n, rank, rng)
        out.append((f"balanced_2x{n}_r{rank}_{i}", st.with_maximally_mixed_marginal(base)))
    return out


# -- checks ----------------------------------------------------------------------


def check_pure_states(count=50, seed=11):
    rng = np.random.default_rng(seed)
    dims = ((2, 2), (2, 3), (3, 3))
    res = []
    for i in range(count):
        m, n = dims[i % 3]
        s = st.random_schmidt(m, n, rng)
        rho = st.pure_from_schmidt(s, st.random_unitary(m, rng), st.random_unitary(n, rng))
        rep = h_min(rho)
        expected = h_min_pure(s)
        res += [abs(rep.value - expected), abs(_search_value(rep) - expected)]
    return _check("pure_state_formula", res, 1e-6, states=count)


def check_bell_maximum():
    bell = st.bell_state()
    closed = [
        h_min_2xn_closed(bell, arbitrate=False).value,
        h_min_bell_diagonal([1.0, -1.0, 1.0]),
        h_min_pure(st.SchmidtForm((0.5, 0.5), 2, 2)),
    ]
    rep = h_min(bell)
    closed_res = max(abs(v - 0.5) for v in closed)
    search_res = abs(_search_value(rep) - 0.5)
    passed = closed_res <= 1e-8 and search_res <= 1e-6
    return CheckResult(
        "bell_maximum",
        passed,
        max(closed_res, search_res),
        1e-6,
        {"closed_form_residual": closed_res, "search_residual": search_res, "closed_tol": 1e-8},
    )


def bell_diagonal_curve(steps=101):
    cs = np.linspace(0.0, 1.0, steps)
    h = np.array([2 * h_min_bell_diagonal([-c] * 3) for c in cs])
    hs = np.array([2 * hs_min_bell_diagonal([-c] * 3) for c in cs])
    return cs, h, hs


def check_figure1(steps=101, spot_points=11):
    _, h, hs = bell_diagonal_curve(steps)
    ends = [abs(h[0]), abs(hs[0]), abs(h[-1] - 1), abs(hs[-1] - 1)]
    monotone = bool(np.all(np.diff(h) >= -1e-12) and np.all(np.diff(hs) >= -1e-12))
    above = int(np.sum(h >= hs - 1e-12))
    spots = []
    for c in np.linspace(0.0, 1.0, spot_points):
        rho = st.bell_diagonal([-c] * 3)
        spots.append(abs(_search_value(h_min(rho)) - h_min_bell_diagonal([-c] * 3)))
        spots.append(abs(hs_min(rho).optimizer_certificate.best_value - hs_min_bell_diagonal([-c] * 3)))
    passed = max(ends) <= 1e-8 and monotone and max(spots) <= 1e-6
    return CheckResult(
        "figure1_bell_diagonal",
        passed,
        max(spots),
        1e-6,
        {
            "endpoint_residual": max(ends),
            "monotone": monotone,
            "points_h_min_ge_hs_min": above,
            "points": steps,
        },
    )


def check_figure2(n=2):
    root = brentq(lambda x: np.sqrt((n - 1) * x) - np.sqrt((1 - x) / (n + 1)), 0.0, 1.0, xtol=1e-14)
    root_res = abs(root - 1 / n**2)
    value_at_root = h_min_isotropic(n, 1 / n**2)
    mixed = np.linalg.norm(st.isotropic(n, 1 / n**2).matrix - np.eye(n * n) / n**2)
    end = abs(h_min_isotropic(n, 1.0) - (n - 1) / n)
    search_end = abs(_search_value(h_min(st.isotropic(n, 1.0))) - h_min_isotropic(n, 1.0))
    passed = root_res <= 1e-9 and value_at_root <= 1e-9 and mixed <= 1e-12 and end <= 1e-9 and search_end <= 1e-6
    return CheckResult(
        "figure2_isotropic",
        passed,
        max(root_res, value_at_root, end),
        1e-9,
        {
            "root": root,
            "state_at_root_minus_identity": float(mixed),
            "endpoint_x1": h_min_isotropic(n, 1.0),
            "endpoint_search_residual": search_end,
        },
    )


def check_figure3(d=2):
    f = lambda x: h_min_werner(d, x)  # noqa: E731
    at_root = abs(f(1 / d))
    # double root: locate the minimizer, the value tolerance is the sharp test
    loc = minimize_scalar(f, bounds=(-1, 1), method="bounded", options={"xatol": 1e-12}).x
    grid = np.linspace(-1, 1, 201)
    positive_off_root = bool(all(f(x) > 0 for x in grid if abs(x - 1 / d) > 1e-9))
    e_minus = abs(f(-1.0) - 0.5)
    e_plus = abs(f(1.0) - 1 / 6) if d == 2 else 0.0
    search_plus = abs(_search_value(h_min(st.werner(d, 1.0))) - f(1.0))
    passed = (
        at_root <= 1e-9
        and abs(loc - 1 / d) <= 1e-6
        and positive_off_root
        and e_minus <= 1e-9
        and e_plus <= 1e-9
        and search_plus <= 1e-6
    )
    return CheckResult(
        "figure3_werner",
        passed,
        max(at_root, e_minus, e_plus),
        1e-9,
        {
            "minimizer": float(loc),
            "positive_off_root": positive_off_root,
            "endpoint_search_residual": search_plus,
        },
    )


def check_upper_bound(count=100, seed=21):
    violations = []
    worst = -np.inf
    for label, rho in random_battery(count, seed):
        gap = h_min(rho).value - h_min_upper_bound(rho)
        worst = max(worst, gap)
        if gap > 1e-8:
            violations.append(label)
    return CheckResult(
        "upper_bound",
        not violations,
        max(worst, 0.0),
        1e-8,
        {"violations": violations, "states": count, "max_h_min_minus_bound": float(worst)},
    )


def check_weak_scaling(count=20, seed=31, strengths=(0.5, 1.0, 2.0, 5.0)):
    res = []
    for _, rho in random_battery(count, seed):
        for x in strengths:
            res.append(weak_h_min(rho, x).cross_check)
    return _check("weak_scaling", res, 1e-6, states=count, strengths=list(strengths))


def check_sequential(count=10, seed=41, strength=1.0, steps=6):
    res = []
    for _, rho in random_battery(count, seed):
        meas = optimal_measurement(rho)
        for a in range(steps):
            for b in range(steps):
                direct, formula = seq_distance_paths(rho, meas, strength, a, b)
                res.append(abs(direct - formula))
    dual = _check("sequential_dual_path", res, 1e-10, states=count)

    bell = st.bell_state()
    meas = optimal_measurement(bell)
    xs = (0.5, 1.0, 1.5, 3.0)
    ns = range(1, 21)
    grid = np.array([[seq_distance(bell, meas, x, 0, n) for n in ns] for x in xs])
    mono_n = bool(np.all(np.diff(grid, axis=1) >= -1e-14))
    mono_x = bool(np.all(np.diff(grid, axis=0) >= -1e-14))
    near_max = abs(seq_distance(bell, meas, 3.0, 0, 10) - 0.5)
    dual.passed = dual.passed and mono_n and mono_x and near_max <= 1e-3
    dual.info.update(monotone_in_n=mono_n, monotone_in_x=mono_x, bell_x3_n10_gap=near_max)
    return dual


def check_skew_equivalence(battery):
    res = [abs(skew_min(rho).value - h_min(rho).value) for _, rho in battery]
    return _check("skew_equals_h_min", res, 1e-6, states=len(battery))


def check_affinity_flag(count=6, seed=51):
    rng = np.random.default_rng(seed)
    res = []
    flags_ok = True
    for i in range(count):
        n = 2 + i % 2
        p = rng.dirichlet(np.ones(2))
        blocks = [st.random_density(n, 1, seed=rng).matrix for _ in range(2)]
        cq = sum(np.kron(np.diag(np.eye(2)[k]), p[k] * blocks[k]) for k in range(2))
        rho = st.DensityMatrix(cq, 2, n)
        rep = affinity_min(rho)
        flags_ok &= rep.details["equals_h_min"]
        res.append(abs(rep.value - h_min(rho).value))
    bell_rep = affinity_min(st.bell_state())
    flags_ok &= not bell_rep.details["equals_h_min"]
    check = _check("affinity_flag", res, 1e-8, block_diagonal_states=count)
    check.passed = check.passed and flags_ok
    check.info.update(
        flags_consistent=flags_ok,
        bell_affinity_min=bell_rep.value,
        bell_h_min_minus_affinity_min=0.5 - bell_rep.value,
    )
    return check


def check_products(count=30, seed=61):
    rng = np.random.default_rng(seed)
    res = []
    for i in range(count):
        rho = random_product(2, 2 + i % 2, rng)
        res += [
            h_min(rho).value,
            hs_min(rho).value,
            skew_min(rho).value,
            affinity_min(rho).value,
            weak_h_min(rho, 1.0).value,
        ]
    return _check("product_faithfulness", res, 1e-8, states=count)


def check_local_unitary(trials=20, seed=71):
    rng = np.random.default_rng(seed)
    targets = [st.bell_diagonal([-0.5, -0.5, -0.5])] + [
        s for _, s in random_battery(3, seed + 1, dims=((2, 2), (2, 3), (3, 2)))
    ]
    res = []
    for rho in targets:
        base = h_min(rho).value
        for _ in range(trials):
            u, v = st.random_unitary(rho.m, rng), st.random_unitary(rho.n, rng)
            res.append(abs(h_min(rho.conjugate_by(u, v)).value - base))
    return _check("local_unitary_invariance", res, 1e-6, states=len(targets), trials=trials)


def check_ancilla(seed=81):
    rng = np.random.default_rng(seed)
    targets = [st.bell_state(), st.bell_diagonal([-0.5, -0.5, -0.5])] + [
        s for _, s in random_battery(2, seed + 1)
    ]
    res = []
    for rho in targets:
        base = h_min(rho).value
        for k in (2, 3):
            sigma = st.random_density(k, 1, seed=rng).matrix
            res.append(abs(h_min(st.attach_ancilla(rho, sigma)).value - base))
    return _check("local_ancilla_invariance", res, 1e-6, states=len(targets), ancilla_dims=[2, 3])


def check_arbitration(count=50, seed=91):
    wins = {"literal": 0, "restricted": 0}
    exactly_one = True
    worst = 0.0
    for _, rho in balanced_marginal_battery(count, seed):
        rep = h_min_2xn_closed(rho)
        r = rep.details["residuals"]
        lit = r["literal"] <= 1e-6
        res = r["restricted"] <= 1e-6
        exactly_one &= lit != res
        wins["literal"] += int(lit)
        wins["restricted"] += int(res)
        worst = max(worst, min(r["literal"], r["restricted"]))
    winner = max(wins, key=wins.get) if exactly_one else None
    return CheckResult(
        "x0_branch_arbitration",
        exactly_one and wins[winner] == count,
        worst,
        1e-6,
        {"winner": winner, "matches": wins, "states": count},
    )


def check_measurement_invariants(count=10, seed=101):
    """Invariant eigenprojectors commute with the marginal."""
    res = []
    for _, rho in random_battery(count, seed):
        meas = marginal_invariant_measurement(rho)
        ra = rho.marginal("a")
        res += [np.linalg.norm(p @ ra - ra @ p) for p in meas.projectors]
        res += list(projective_from_unitary(meas.vectors).violations().values())
    return _check("invariant_measurements", res, 1e-9, states=count)


def run_verification(battery_size=20, seed=7, extra_states=()):
    """Run every check; ``battery_size`` scales the random-state suites."""
    k = max(1, battery_size)
    battery = full_battery(k, seed) + list(extra_states)
    checks = [
        check_pure_states(count=max(3, k), seed=seed + 1),
        check_bell_maximum(),
        check_figure1(),
        check_figure2(),
        check_figure3(),
        check_upper_bound(count=2 * k, seed=seed + 2),
        check_weak_scaling(count=k, seed=seed + 3),
        check_sequential(count=max(1, k // 2), seed=seed + 4),
        check_skew_equivalence(battery),
        check_affinity_flag(seed=seed + 5),
        check_products(count=k, seed=seed + 6),
        check_local_unitary(seed=seed + 7),
        check_ancilla(seed=seed + 8),
        check_arbitration(count=k, seed=seed + 9),
        check_measurement_invariants(seed=seed + 10),
    ]
    return checks
