"""Write the four figure datasets as CSV files.

    python3 scripts/figures.py --out results/

fig1: Bell-diagonal c_i = -c, H-MIN and HS-MIN (both x2), c in [0, 1]
fig2: isotropic n = 2, H-MIN, x in [0, 1]
fig3: Werner d = 2, H-MIN, x in [-1, 1]
fig4: Bell state, sequential weak distance H^0_n for x in {1, 1.5, 3}
"""

import argparse
import logging
from pathlib import Path

from hmin import states as st
from hmin.cli import SweepSpec, run_sweep, seqweak_csv

log = logging.getLogger("figures")


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", default="results")
    ap.add_argument("--steps", type=int, default=101)
    ap.add_argument("--n-max", type=int, default=20)
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    specs = {
        "fig1_bell_diagonal.csv": SweepSpec("bell_diagonal", 0.0, 1.0, args.steps, scale_by_two=True),
        "fig2_isotropic.csv": SweepSpec("isotropic", 0.0, 1.0, args.steps, measures=["h_min"]),
        "fig3_werner.csv": SweepSpec("werner", -1.0, 1.0, args.steps, measures=["h_min"]),
    }
    for name, spec in specs.items():
        (out / name).write_text(run_sweep(spec))
        log.info("wrote %s", out / name)
    (out / "fig4_seqweak.csv").write_text(seqweak_csv(st.bell_state(), [1.0, 1.5, 3.0], args.n_max))
    log.info("wrote %s", out / "fig4_seqweak.csv")


if __name__ == "__main__":
    main()
