#!/usr/bin/env python3
"""Regenerate the frozen arbitrary-precision oracle fixtures in tests/data.

The fixtures pin down values that the test suite asserts against without
paying the mpmath cost on every run:

  zeta_oracle.json      zeta^(k), k=0..3, at 100 seeded random points of the
                        box sigma in [-5, 10], t in [10, 2000]
  gamma_oracle.json     log-gamma / psi / psi' / psi'' spot values
  critical_zeros.json   ordinates of the first 100 nontrivial zeta zeros

Run from the repository root:  python3 scripts/build_oracle_fixtures.py
"""

import json
import pathlib

import mpmath as mp
import numpy as np

OUT = pathlib.Path(__file__).resolve().parent.parent / "tests" / "data"
POINT_SEED = 20260808
N_POINTS = 100


def cpair(z) -> list[float]:
    return [float(z.real), float(z.imag)]


def zeta_oracle() -> dict:
    mp.mp.dps = 40
    rng = np.random.default_rng(POINT_SEED)
    sigmas = rng.uniform(-5.0, 10.0, N_POINTS)
    ts = rng.uniform(10.0, 2000.0, N_POINTS)
    rows = []
    for sig, t in zip(sigmas, ts):
        s = mp.mpc(float(sig), float(t))
        vals = [mp.zeta(s, 1, k) for k in range(4)]
        rows.append({
            "s": [float(sig), float(t)],
            "zeta_derivs": [cpair(v) for v in vals],
        })
    return {"point_seed": POINT_SEED, "count": N_POINTS, "rows": rows}


def gamma_oracle() -> dict:
    mp.mp.dps = 40
    pts = [
        [2.0, 3.0], [0.25, 7.067], [-3.5, 0.2], [-7.9, 0.01],
        [6.0, 2400.0], [-4.0, 2499.0], [51.5, 0.0], [2.0, 1500.0],
        [0.1, 0.05], [1.0, -40.0],
    ]
    rows = []
    for re, im in pts:
        z = mp.mpc(re, im)
        rows.append({
            "z": [re, im],
            "log_gamma": cpair(mp.loggamma(z)),
            "digamma": cpair(mp.psi(0, z)),
            "trigamma": cpair(mp.psi(1, z)),
            "tetragamma": cpair(mp.psi(2, z)),
        })
    return {"rows": rows}


def critical_zeros() -> dict:
    mp.mp.dps = 30
    ordinates = [float(mp.zetazero(k).imag) for k in range(1, 101)]
    return {"count": 100, "ordinates": ordinates}


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    jobs = {
        "zeta_oracle.json": zeta_oracle,
        "gamma_oracle.json": gamma_oracle,
        "critical_zeros.json": critical_zeros,
    }
    for name, fn in jobs.items():
        path = OUT / name
        print(f"building {path} ...", flush=True)
        payload = fn()
        path.write_text(json.dumps(payload, indent=1, sort_keys=True))
    print("done")


if __name__ == "__main__":
    main()
