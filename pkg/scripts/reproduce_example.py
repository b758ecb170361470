"""Solver, certified bounds and transfer-matrix values side by side for one potential."""
from __future__ import annotations

import argparse
import json
import math
from dataclasses import asdict, dataclass

from kpbloch import oracle
from kpbloch.potential import new_potential
from kpbloch.series import TruncationParams
from kpbloch.solver import solve_spectrum

# Published reference values for a = -pi^2, c = 1/2, in units of pi^2.
REFERENCE = {
    "lambda_0": -0.100720167503,
    "lambda_1,1": 3.953707280198,
    "lambda_1,2": 3.976894161836,
    "lambda_2,1": 15.974913551204,
    "lambda_2,2": 15.983422370241,
    "mu_1,1": 0.317539742073,
    "mu_1,2": 1.578063115969,
    "mu_2,1": 8.768711027230,
    "mu_2,2": 9.180457181326,
}


@dataclass
class ExampleConfig:
    a: float = -math.pi**2
    c: float = 0.5
    r: int = 5
    s: int = 5
    n_max: int = 2


def reproduce(cfg: ExampleConfig) -> list[dict]:
    p = new_potential(cfg.a, cfg.c)
    spectrum = solve_spectrum(p, TruncationParams(r=cfg.r, s=cfg.s), cfg.n_max)
    table = oracle.bands_and_gaps(p, cfg.n_max)
    truth = {"lambda_0": table.lambda0}
    for (n, l1, l2), (_, m1, m2) in zip(table.periodic, table.antiperiodic):
        truth.update({f"lambda_{n},1": l1, f"lambda_{n},2": l2, f"mu_{n},1": m1, f"mu_{n},2": m2})
    unit = math.pi**2
    rows = []
    for label, sol in spectrum.items():
        err = abs(sol.value - truth[label])
        rows.append({
            "sector": label,
            "solver": sol.value / unit,
            "oracle": truth[label] / unit,
            "reference": REFERENCE.get(label) if (cfg.a, cfg.c) == (-unit, 0.5) else None,
            "error": err / unit,
            "bound": sol.total_bound / unit,
            "sound": err <= sol.total_bound,
            "iterations": sol.iterations,
        })
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--a", type=float, default=-math.pi**2)
    ap.add_argument("--c", type=float, default=0.5)
    ap.add_argument("--r", type=int, default=5)
    ap.add_argument("--s", type=int, default=5)
    ap.add_argument("--n-max", type=int, default=2)
    ap.add_argument("--json", action="store_true", help="emit JSON instead of a table")
    args = ap.parse_args()
    cfg = ExampleConfig(args.a, args.c, args.r, args.s, args.n_max)
    rows = reproduce(cfg)
    if args.json:
        print(json.dumps({"config": asdict(cfg), "rows": rows}, indent=2))
        return
    print(f"{'sector':<12}{'solver/pi^2':>18}{'oracle/pi^2':>18}{'reference':>16}"
          f"{'error':>11}{'bound':>11}  sound  it")
    for r in rows:
        ref = "" if r["reference"] is None else f"{r['reference']:.12f}"
        print(f"{r['sector']:<12}{r['solver']:>18.12f}{r['oracle']:>18.12f}{ref:>16}"
              f"{r['error']:>11.2e}{r['bound']:>11.2e}  {str(r['sound']):<6} {r['iterations']}")


if __name__ == "__main__":
    main()
