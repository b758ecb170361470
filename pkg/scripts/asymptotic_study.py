"""Log-log decay of gap and eigenvalue asymptotics against the transfer-matrix spectrum."""
from __future__ import annotations

import argparse
import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from kpbloch import asymptotics, oracle
from kpbloch.potential import KroneckerPotential, new_potential
from kpbloch.series import antiperiodic, periodic


@dataclass
class StudyConfig:
    a: float = -math.pi**2
    c: float = 0.5
    k_min: int = 5
    k_max: int = 40
    n_min: int = 5
    n_max: int = 40


@dataclass
class Slope:
    slope: float
    stderr: float


def loglog_slope(k, y) -> Slope:
    """Least-squares slope of log y against log k, with its standard error."""
    x = np.log(np.asarray(k, dtype=float))
    y = np.log(np.asarray(y, dtype=float))
    (slope, icpt), cov = np.polyfit(x, y, 1, cov=True)
    return Slope(float(slope), float(math.sqrt(cov[0, 0])))


def gap_residuals(p: KroneckerPotential, k_min: int, k_max: int):
    table = oracle.bands_and_gaps(p, (k_max + 1) // 2)
    gaps = dict(table.gaps)
    ks = list(range(k_min, k_max + 1))
    first = [abs(gaps[k] - asymptotics.gap_prediction(p, k).first_order) for k in ks]
    second = [abs(gaps[k] - asymptotics.gap_prediction(p, k).second_order) for k in ks]
    return ks, first, second


def eigen_residuals(p: KroneckerPotential, n_min: int, n_max: int):
    """``n^2 max_j |eigen_asym - oracle|`` for periodic and antiperiodic pairs."""
    table = oracle.bands_and_gaps(p, n_max)
    ns = list(range(n_min, n_max + 1))
    per, anti = [], []
    for n in ns:
        _, l1, l2 = table.periodic[n - 1]
        _, m1, m2 = table.antiperiodic[n - 1]
        per.append(n * n * max(abs(asymptotics.eigen_asym(p, periodic(n, 1)) - l1),
                               abs(asymptotics.eigen_asym(p, periodic(n, 2)) - l2)))
        anti.append(n * n * max(abs(asymptotics.eigen_asym(p, antiperiodic(n, 1)) - m1),
                                abs(asymptotics.eigen_asym(p, antiperiodic(n, 2)) - m2)))
    return ns, per, anti


def study(cfg: StudyConfig) -> dict:
    p = new_potential(cfg.a, cfg.c)
    ks, first, second = gap_residuals(p, cfg.k_min, cfg.k_max)
    ns, per, anti = eigen_residuals(p, cfg.n_min, cfg.n_max)
    return {
        "config": asdict(cfg),
        "first_order": asdict(loglog_slope(ks, first)),
        "second_order": asdict(loglog_slope(ks, second)),
        "scaled_periodic": asdict(loglog_slope(ns, per)),
        "scaled_antiperiodic": asdict(loglog_slope(ns, anti)),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--a", type=float, default=-math.pi**2)
    ap.add_argument("--c", type=float, default=0.5)
    ap.add_argument("--k-max", type=int, default=40)
    args = ap.parse_args()
    cfg = StudyConfig(a=args.a, c=args.c, k_max=args.k_max, n_max=args.k_max)
    print(json.dumps(study(cfg), indent=2))


if __name__ == "__main__":
    main()
