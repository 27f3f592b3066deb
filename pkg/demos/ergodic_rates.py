"""Ergodic rates per user against their high-SNR ceilings.

Users below the strongest saturate at log2(1 + a_m / abar_m); the strongest
user keeps growing by about log2(10) bits per 10 dB.

    python3 demos/ergodic_rates.py --trials 200000
"""

import argparse

from irsnoma import analytic as an
from irsnoma import montecarlo as mc
from irsnoma.system import db_to_linear, derive_stats, default_config


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=200_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    config = default_config()
    stats = derive_stats(config)
    ceil = [an.ergodic_ceiling(config, m).rate for m in (1, 2)]
    print(f"ceilings: user 1 {ceil[0]:.4f}, user 2 {ceil[1]:.4f} bits/s/Hz")
    print(f"{'SNR':>4} {'u1':>7} {'u2':>7} {'u3':>7} {'u3 bound':>9} {'oma':>7} | simulated u1 u2 u3")
    for x in range(0, 61, 10):
        rho = float(db_to_linear(x))
        rates = an.ergodic_psic_all(config, stats, rho)
        ub = an.ergodic_upper_bound_M(config, stats, rho).rate
        oma = an.ergodic_oma(config, stats, rho).rate
        sim = mc.mc_ergodic_noma(config, stats, rho, args.trials, args.seed)
        print(f"{x:4d} " + " ".join(f"{r.rate:7.4f}" for r in rates)
              + f" {ub:9.4f} {oma:7.4f} | " + " ".join(f"{e.value:.4f}" for e in sim))


if __name__ == "__main__":
    main()
