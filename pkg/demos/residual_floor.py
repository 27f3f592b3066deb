"""How residual interference from imperfect SIC caps outage performance.

Sweeps the SNR to 80 dB for several residual levels and prints the outage
of user 2 next to the residual-only floor.

    python3 demos/residual_floor.py
"""

import argparse

from irsnoma import analytic as an
from irsnoma.system import db_to_linear, derive_stats, default_config


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--user", type=int, default=2)
    ap.add_argument("--levels-db", type=float, nargs="+", default=[-30.0, -20.0, -10.0])
    args = ap.parse_args()

    base = default_config(reflecting_elements=2, partition=1, group_size=2, sic_mode="ipsic")
    stats = derive_stats(base)
    m = args.user
    print(f"user {m}, K = Q = 2, P = 1")
    print(f"{'SNR':>4} {'perfect SIC':>12} " + " ".join(f"{v:>8.0f} dB" for v in args.levels_db))
    for x in range(0, 81, 10):
        rho = float(db_to_linear(x))
        cells = [an.outage_psic(base, stats, rho)[m]]
        for lvl in args.levels_db:
            cfg = base.with_(residual_interference=float(db_to_linear(lvl)))
            cells.append(an.outage_ipsic(cfg, stats, rho)[m])
        print(f"{x:4d} " + " ".join(f"{c:11.3e}" for c in cells))
    print("floors:", " ".join(
        f"{an.outage_asymptotic(base.with_(residual_interference=float(db_to_linear(l))), stats, 1.0, 'ipsic-floor')[m]:.3e}"
        for l in args.levels_db))


if __name__ == "__main__":
    main()
