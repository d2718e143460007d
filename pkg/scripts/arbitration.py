"""Compare the x = 0 closed-form candidates against the search on states
with a maximally mixed qubit marginal and print a summary table."""

import argparse

import numpy as np

from hmin.measures import h_min_2xn_closed
from hmin.verify import balanced_marginal_battery


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=50)
    ap.add_argument("--seed", type=int, default=91)
    args = ap.parse_args()

    names = ("literal", "restricted", "trailing_only")
    resid = {k: [] for k in names}
    for _, rho in balanced_marginal_battery(args.count, args.seed):
        r = h_min_2xn_closed(rho).details["residuals"]
        for k in names:
            resid[k].append(r[k])
    print(f"{'candidate':<15}{'matches':>9}{'max residual':>15}{'min residual':>15}")
    for k in names:
        v = np.array(resid[k])
        print(f"{k:<15}{int(np.sum(v <= 1e-6)):>6}/{args.count:<3}{v.max():>14.3e}{v.min():>15.3e}")


if __name__ == "__main__":
    main()
