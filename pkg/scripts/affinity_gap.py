"""Affinity-MIN versus H-MIN on random states, with the square-root
commutation gap at the affinity optimum."""

import argparse

from hmin import states as st
from hmin.measures import affinity_min, h_min


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=10)
    ap.add_argument("--seed", type=int, default=3)
    args = ap.parse_args()
    print("state,h_min,affinity_min,sqrt_commutation_gap")
    print(f"bell,{h_min(st.bell_state()).value:.10f},{affinity_min(st.bell_state()).value:.10f},"
          f"{affinity_min(st.bell_state()).details['sqrt_commutation_gap']:.3e}")
    for i in range(args.count):
        rho = st.random_density(2, 2 + i % 2, seed=args.seed + i)
        a = affinity_min(rho)
        print(f"random_{i},{h_min(rho).value:.10f},{a.value:.10f},{a.details['sqrt_commutation_gap']:.3e}")


if __name__ == "__main__":
    main()
