"""Freeze arbitrary-precision reference values used by the test-suite.

Run from the repository root:  python3 tools/bessel_oracle.py
Writes tests/data/bessel_k_oracle.json and tests/data/cascade_cdf_oracle.json.
"""

import json
import pathlib

import mpmath as mp

mp.mp.dps = 50
OUT = pathlib.Path(__file__).resolve().parent.parent / "tests" / "data"

ORDERS = [0, 1, 2, 3, 7, 16, 30, 64]
GRID = [float(v) for v in mp.linspace(mp.log10(1e-8), mp.log10(700), 200)]


def bessel():
    rows = []
    for v in ORDERS:
        for e in GRID:
            x = float(mp.mpf(10) ** e)
            k = mp.besselk(v, x)
            if k > mp.mpf("1e300"):
                continue  # outside double range, exercised by the overflow test
            rows.append({"order": v, "x": x, "k": mp.nstr(k, 25, min_fixed=-1, max_fixed=-1)})
    return rows


def cascade():
    rows = []
    for q in [1, 2, 3, 5, 16, 64]:
        for e in mp.linspace(-12, 2, 29):
            z = float(mp.mpf(10) ** e)
            tail = 2 / mp.gamma(q) * mp.mpf(z) ** (mp.mpf(q) / 2) * mp.besselk(q, 2 * mp.sqrt(z))
            rows.append({"Q": q, "z": z,
                         "cdf": mp.nstr(1 - tail, 25, min_fixed=-1, max_fixed=-1),
                         "ccdf": mp.nstr(tail, 25, min_fixed=-1, max_fixed=-1)})
    return rows


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / "bessel_k_oracle.json").write_text(json.dumps(bessel(), indent=0) + "\n")
    (OUT / "cascade_cdf_oracle.json").write_text(json.dumps(cascade(), indent=0) + "\n")
