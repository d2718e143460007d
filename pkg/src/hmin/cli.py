"""Command-line interface.

Exit codes: 0 success, 1 verification failure, 2 input error,
3 search did not converge (unless ``--allow-unconverged``).
"""

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import measures as ms
from . import states as st
from .errors import HminError
from .verify import run_verification

DEFAULT_SEED = 7
EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_UNCONVERGED = 0, 1, 2, 3

FAMILY_RANGES = {"bell_diagonal": (0.0, 1.0), "isotropic": (0.0, 1.0), "werner": (-1.0, 1.0)}
SWEEP_MEASURES = ("h_min", "hs_min", "skew_min", "affinity_min", "upper_bound")
REPORT_MEASURES = SWEEP_MEASURES + ("weak_h_min",)


class InputError(Exception):
    pass


@dataclass
class SweepSpec:
    family: str
    start: float
    stop: float
    steps: int
    dim: int = 2
    measures: list = field(default_factory=lambda: ["h_min", "hs_min"])
    scale_by_two: bool = False
    numeric: bool = False

    def __post_init__(self):
        if self.family not in FAMILY_RANGES:
            raise InputError(f"unknown family {self.family!r}")
        if self.steps < 2:
            raise InputError("steps must be >= 2")
        lo, hi = FAMILY_RANGES[self.family]
        if not (lo <= self.start <= hi and lo <= self.stop <= hi):
            raise InputError(f"{self.family} parameter range must lie in [{lo}, {hi}]")
        if self.family == "bell_diagonal" and self.dim != 2:
            raise InputError("bell_diagonal is a two-qubit family")
        if self.dim < 2:
            raise InputError("dimension must be >= 2")
        bad = [m for m in self.measures if m not in SWEEP_MEASURES]
        if bad:
            raise InputError(f"unknown measures {bad}; choose from {list(SWEEP_MEASURES)}")

    def grid(self):
        return np.linspace(self.start, self.stop, self.steps)


def family_state(family, dim, p):
    if family == "bell_diagonal":
        return st.bell_diagonal([-p] * 3)
    if family == "isotropic":
        return st.isotropic(dim, p)
    return st.werner(dim, p)


def _closed_h_min(family, dim, p):
    if family == "bell_diagonal":
        return ms.h_min_bell_diagonal([-p] * 3)
    if family == "isotropic":
        return ms.h_min_isotropic(dim, p)
    return ms.h_min_werner(dim, p)


def sweep_point(spec: SweepSpec, p: float) -> list:
    """Measure values at one grid point, unscaled."""
    rho = family_state(spec.family, spec.dim, p)
    row = []
    for name in spec.measures:
        if name == "h_min" and not spec.numeric:
            row.append(_closed_h_min(spec.family, spec.dim, p))
        elif name == "hs_min" and not spec.numeric and rho.m == 2:
            row.append(ms.hs_min_2xn(rho, search=False).value)
        elif name == "upper_bound":
            row.append(ms.h_min_upper_bound(rho))
        else:
            row.append(ms.MEASURES[name](rho).value)
    return row


def _sweep_point_args(args):
    return sweep_point(*args)


def run_sweep(spec: SweepSpec, jobs: int = 1) -> str:
    grid = spec.grid()
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_point_args, [(spec, p) for p in grid]))
    else:
        rows = [sweep_point(spec, p) for p in grid]
    scale = 2.0 if spec.scale_by_two else 1.0
    lines = [",".join(["param"] + list(spec.measures))]
    for p, row in zip(grid, rows):
        lines.append(",".join([f"{p:.12g}"] + [f"{scale * v:.12g}" for v in row]))
    return "\n".join(lines) + "\n"


def seqweak_csv(rho, strengths, n_max) -> str:
    meas = ms.optimal_measurement(rho)
    lines = ["x,n,H0n"]
    for x in strengths:
        for n in range(n_max + 1):
            lines.append(f"{x:.12g},{n},{ms.seq_distance(rho, meas, x, 0, n):.12g}")
    return "\n".join(lines) + "\n"


def _write(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)


def _measure_list(text, allowed):
    names = [t.strip() for t in text.split(",") if t.strip()]
    bad = [n for n in names if n not in allowed]
    if bad or not names:
        raise InputError(f"unknown measures {bad}; choose from {list(allowed)}")
    return names


def _floats(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise InputError(str(exc)) from exc


# -- subcommands -----------------------------------------------------------------


def cmd_measure(args):
    rho = st.load_state(args.state)
    names = _measure_list(args.measures, REPORT_MEASURES)
    scale = 2.0 if args.paper_scale else 1.0
    reports = []
    unconverged = []
    for name in names:
        if name == "upper_bound":
            value = ms.h_min_upper_bound(rho)
            rep = ms.MeasureReport("upper_bound", value, "closed_form")
        elif name == "weak_h_min":
            rep = ms.weak_h_min(rho, args.strength, budget=args.budget, seed=args.seed)
        else:
            rep = ms.MEASURES[name](rho, budget=args.budget, seed=args.seed)
        cert = rep.optimizer_certificate
        if cert is not None and not cert.converged:
            unconverged.append(name)
        d = rep.to_dict()
        d["value"] = scale * d["value"]
        reports.append(d)
    out = {"state": {"m": rho.m, "n": rho.n}, "paper_scale": bool(args.paper_scale), "measures": reports}
    print(json.dumps(out, indent=2))
    if unconverged and not args.allow_unconverged:
        print(f"search did not converge for: {', '.join(unconverged)}", file=sys.stderr)
        return EXIT_UNCONVERGED
    return EXIT_OK


def cmd_sweep(args):
    lo, hi, steps = args.range
    spec = SweepSpec(
        family=args.family,
        start=float(lo),
        stop=float(hi),
        steps=int(steps),
        dim=args.dim,
        measures=_measure_list(args.measures, SWEEP_MEASURES),
        scale_by_two=args.paper_scale,
        numeric=args.numeric,
    )
    _write(run_sweep(spec, jobs=args.jobs), args.out)
    return EXIT_OK


def cmd_seqweak(args):
    rho = st.load_state(args.state)
    xs = _floats(args.x)
    if not xs or any(x <= 0 for x in xs):
        raise InputError("--x values must be > 0")
    if args.n_max < 1:
        raise InputError("--n-max must be >= 1")
    _write(seqweak_csv(rho, xs, args.n_max), args.out)
    return EXIT_OK


def cmd_verify(args):
    if args.battery_size < 1:
        raise InputError("--battery-size must be >= 1")
    extra = [(Path(p).name, st.load_state(p)) for p in args.state]
    checks = run_verification(args.battery_size, args.seed, extra)
    report = {
        "battery_size": args.battery_size,
        "seed": args.seed,
        "passed": all(c.passed for c in checks),
        "checks": {c.name: c.to_dict() for c in checks},
    }
    _write(json.dumps(report, indent=2, sort_keys=True) + "\n", args.out)
    for c in checks:
        print(c.line(), file=sys.stderr)
    failed = [c.name for c in checks if not c.passed]
    if failed:
        print(f"failed checks: {', '.join(failed)}", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


def cmd_state(args):
    """Write a family or random state to a JSON state file."""
    if args.kind == "bell":
        rho = st.bell_state()
    elif args.kind == "bell_diagonal":
        rho = st.bell_diagonal(_floats(args.params))
    elif args.kind == "isotropic":
        rho = st.isotropic(args.dim, float(args.params))
    elif args.kind == "werner":
        rho = st.werner(args.dim, float(args.params))
    elif args.kind == "product":
        rng = np.random.default_rng(args.seed)
        rho = st.product_state(
            st.random_density(2, 1, seed=rng).matrix, st.random_density(args.dim, 1, seed=rng).matrix
        )
    else:
        rho = st.random_density(2, args.dim, args.rank, seed=args.seed)
    _write(json.dumps(st.state_to_json(rho)) + "\n", args.out)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="hmin", description="Measurement-induced nonlocality measures.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("measure", help="compute measures for a state file")
    p.add_argument("state")
    p.add_argument("--measures", default="h_min", help=f"comma list from {','.join(REPORT_MEASURES)}")
    p.add_argument("--strength", type=float, default=1.0, help="weak measurement strength for weak_h_min")
    p.add_argument("--paper-scale", action="store_true", help="multiply values by 2")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--budget", type=int, default=20_000)
    p.add_argument("--allow-unconverged", action="store_true")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("sweep", help="sweep a state family and write CSV")
    p.add_argument("family", choices=sorted(FAMILY_RANGES))
    p.add_argument("--range", nargs=3, metavar=("START", "STOP", "STEPS"), required=True)
    p.add_argument("--dim", type=int, default=2, help="n for isotropic, d for Werner")
    p.add_argument("--measures", default="h_min,hs_min")
    p.add_argument("--paper-scale", action="store_true")
    p.add_argument("--numeric", action="store_true", help="evaluate every point by search, not closed forms")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("seqweak", help="sequential weak-measurement distances H^0_n as CSV")
    p.add_argument("state")
    p.add_argument("--x", default="1,1.5,3", help="comma list of strengths")
    p.add_argument("--n-max", type=int, default=10)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_seqweak)

    p = sub.add_parser("verify", help="run the verification battery")
    p.add_argument("--battery-size", type=int, default=20)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--state", action="append", default=[], help="extra state file(s) for the battery")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("state", help="write a state file")
    p.add_argument("kind", choices=["bell", "bell_diagonal", "isotropic", "werner", "product", "random"])
    p.add_argument("--params", default="0", help="c1,c2,c3 for bell_diagonal; x for isotropic/werner")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--rank", type=int, default=None)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_state)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (HminError, InputError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
