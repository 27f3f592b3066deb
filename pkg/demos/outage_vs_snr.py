"""Outage of the three NOMA users and the orthogonal user versus SNR.

Prints closed-form, high-SNR and simulated values side by side for the
default single-element scenario.

    python3 demos/outage_vs_snr.py --trials 200000
"""

import argparse

from irsnoma import analytic as an
from irsnoma import montecarlo as mc
from irsnoma.system import db_to_linear, derive_stats, default_config


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=200_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--elements", type=int, default=1, help="K, with one element per column")
    args = ap.parse_args()

    K = args.elements
    config = default_config(reflecting_elements=K, partition=K, group_size=1)
    stats = derive_stats(config)
    grid = list(range(0, 41, 5))
    rhos = [float(db_to_linear(x)) for x in grid]
    sim = mc.mc_noma_sweep(config, stats, rhos, args.trials, args.seed)
    sim_oma = mc.mc_oma_sweep(config, stats, rhos, args.trials, args.seed)

    print(f"K = P = {K}, Q = 1, {args.trials} trials per point")
    print(f"{'SNR':>4} {'user':>5} {'closed form':>12} {'high SNR':>10} {'simulated':>10}")
    for x, rho, row, oma in zip(grid, rhos, sim, sim_oma):
        exact = an.outage_psic(config, stats, rho)
        asym = an.outage_asymptotic(config, stats, rho, "psic-q1")
        for m in range(1, 4):
            print(f"{x:4d} {m:5d} {exact[m]:12.4e} {asym[m]:10.3e} {row[m - 1].value:10.3e}")
        print(f"{x:4d} {'oma':>5} {an.outage_oma(config, stats, rho)[1]:12.4e} "
              f"{an.outage_asymptotic(config, stats, rho, 'oma-q1')[1]:10.3e} {oma.value:10.3e}")

    # slope of the closed form far out, where the logarithmic factor has mostly faded
    for m in range(1, 4):
        d = an.diversity_fit(lambda r, m=m: an.outage_psic(config, stats, r)[m], 50, 80)
        print(f"user {m}: fitted slope over 50-80 dB {d:.3f} (order {m * K})")


if __name__ == "__main__":
    main()
