"""Transfer-matrix ground truth for the step potential.

Solutions of ``-y'' + q y = lam y`` are propagated across the two constant
pieces; the trace of the one-period matrix (Hill discriminant) equals ``2``
at periodic and ``-2`` at antiperiodic eigenvalues.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

PI = math.pi
TURNING_SWITCH = 1e-6
ROOT_XTOL = 1e-12
TANGENCY_TOL = 1e-10


class BracketExhaustedError(RuntimeError):
    def __init__(self, found, wanted, ceiling):
        super().__init__(f"found {found} of {wanted} roots below lam = {ceiling:.6g}")
        self.found = found
        self.wanted = wanted


@dataclass(frozen=True)
class Monodromy:
    m11: float
    m12: float
    m21: float
    m22: float

    @property
    def trace(self) -> float:
        return self.m11 + self.m22

    @property
    def det(self) -> float:
        return self.m11 * self.m22 - self.m12 * self.m21

    def as_array(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]])


@dataclass
class SpectralTable:
    lambda0: float
    periodic: list = field(default_factory=list)
    antiperiodic: list = field(default_factory=list)
    gaps: list = field(default_factory=list)
    bands: list = field(default_factory=list)

    def edges(self) -> list:
        """All band edges in the interlacing order lambda_0, mu_1,1, mu_1,2, lambda_1,1, ..."""
        out = [self.lambda0]
        for (n, m1, m2), (_, l1, l2) in zip(self.antiperiodic, self.periodic):
            out += [m1, m2, l1, l2]
        return out


def _cos_sin(e, length):
    """``cos(k L)`` and ``sin(k L) / k`` for ``k^2 = e``, any sign of ``e``.

    Near ``e = 0`` a short Taylor series in ``e L^2`` is used.
    """
    e = np.asarray(e, dtype=float)
    z = e * length * length
    small = np.abs(e) < TURNING_SWITCH
    k_osc = np.sqrt(np.where(e > 0, e, 1.0))
    k_hyp = np.sqrt(np.where(e < 0, -e, 1.0))
    cs = np.where(e > 0, np.cos(k_osc * length), np.cosh(k_hyp * length))
    sn = np.where(e > 0, np.sin(k_osc * length) / k_osc, np.sinh(k_hyp * length) / k_hyp)
    cs_ser = 1.0 - z / 2.0 + z * z / 24.0 - z**3 / 720.0
    sn_ser = length * (1.0 - z / 6.0 + z * z / 120.0 - z**3 / 5040.0)
    return np.where(small, cs_ser, cs), np.where(small, sn_ser, sn)


def _propagator(value: float, length: float, lam: float) -> np.ndarray:
    e = lam - value
    cs, sn = (float(v) for v in _cos_sin(e, length))
    return np.array([[cs, sn], [-e * sn, cs]])


def monodromy(p, lam: float) -> Monodromy:
    """Map ``(y(0), y'(0))`` to ``(y(1), y'(1))`` at energy ``lam``."""
    m = _propagator(p.b, 1.0 - p.c, lam) @ _propagator(p.a, p.c, lam)
    return Monodromy(m[0, 0], m[0, 1], m[1, 0], m[1, 1])


def discriminant(p, lam):
    """Trace of the monodromy matrix; accepts scalars or arrays."""
    ea = np.asarray(lam, dtype=float) - p.a
    eb = np.asarray(lam, dtype=float) - p.b
    ca, sa = _cos_sin(ea, p.c)
    cb, sb = _cos_sin(eb, 1.0 - p.c)
    out = 2.0 * ca * cb - (ea + eb) * sa * sb
    return float(out) if np.ndim(out) == 0 else out


def _scan_roots(f, lo, hi, step):
    """Roots of ``f`` on ``[lo, hi]``, including touching (double) roots."""
    xs = np.arange(lo, hi + step, step)
    ys = f(xs)
    roots = []
    for i in range(len(xs) - 1):
        x0, x1, y0, y1 = xs[i], xs[i + 1], ys[i], ys[i + 1]
        pieces = [(x0, y0), (x1, y1)]
        # An interior extremum can hide a pair of roots between two samples.
        ext = _interior_extremum(f, x0, x1, y0, y1, xs, ys, i)
        if ext is not None:
            pieces.insert(1, ext)
        if ext is not None and abs(ext[1]) < TANGENCY_TOL:
            # Tangency: sign changes this close to the extremum are rounding noise.
            if y0 == 0.0:
                roots.append(x0)
            roots += [ext[0], ext[0]]
            continue
        for (u0, v0), (u1, v1) in zip(pieces, pieces[1:]):
            if v0 == 0.0:
                roots.append(u0)
            elif v0 * v1 < 0:
                roots.append(brentq(f, u0, u1, xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps))
    if ys[-1] == 0.0:
        roots.append(xs[-1])
    return sorted(roots)


def _interior_extremum(f, x0, x1, y0, y1, xs, ys, i):
    """Locate an extremum of ``f`` strictly inside ``(x0, x1)`` if the samples hint at one."""
    left_slope = y0 - ys[i - 1] if i > 0 else None
    right_slope = ys[i + 2] - y1 if i + 2 < len(xs) else None
    mid = y1 - y0
    hint = (left_slope is not None and left_slope * mid < 0) or (
        right_slope is not None and right_slope * mid < 0
    )
    if not hint:
        return None
    # Extremum towards zero: minimise |f| with the sign of the endpoints.
    sign = 1.0 if y0 + y1 > 0 else -1.0
    res = minimize_scalar(lambda x: sign * f(x), bounds=(x0, x1), method="bounded",
                          options={"xatol": 1e-13})
    xm = float(res.x)
    if not (x0 < xm < x1):
        return None
    return xm, float(f(xm))


def half_period(p, lam):
    """Entries ``(h11, h12, h21, h22)`` of the transfer matrix from ``c/2`` to ``(1+c)/2``.

    The cell is mirror-symmetric about ``c/2``, so the full-period trace
    factorises as ``disc - 2 = 4 h12 h21`` and ``disc + 2 = 4 h11 h22``.
    Accepts scalars or arrays.
    """
    lam = np.asarray(lam, dtype=float)
    ea, eb = lam - p.a, lam - p.b
    ca, sa = _cos_sin(ea, 0.5 * p.c)
    cb, sb = _cos_sin(eb, 0.5 * (1.0 - p.c))
    da, db = -ea * sa, -eb * sb
    return cb * ca + sb * da, cb * sa + sb * ca, db * ca + cb * da, db * sa + cb * ca


def _scan_ceiling(p, kind, count):
    pairs = count // 2 + 1
    if kind == "periodic":
        return (2 * PI * (pairs + 1)) ** 2 + p.M + 1.0
    return ((2 * pairs + 1) * PI) ** 2 + p.M + 1.0


def _sign_change_roots(f, lo, hi, step):
    xs = np.arange(lo, hi + step, step)
    ys = f(xs)
    roots = [float(x) for x, y in zip(xs, ys) if y == 0.0]
    for i in np.flatnonzero(ys[:-1] * ys[1:] < 0):
        roots.append(brentq(f, xs[i], xs[i + 1], xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps))
    return roots


def find_eigen(p, kind: str, count: int, step: float = PI**2 / 8,
               method: str = "factored") -> list:
    """First ``count`` periodic (``disc = 2``) or antiperiodic (``disc = -2``) eigenvalues.

    ``method="factored"`` brackets the simple roots of the two half-period
    factors, which stays well conditioned at nearly closed gaps;
    ``method="trace"`` scans ``disc -/+ 2`` directly, looking for extrema
    between samples, and reports tangencies as double roots. In both cases
    the scan step is halved until the number of roots found stabilises.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if kind not in ("periodic", "antiperiodic"):
        raise ValueError("kind must be 'periodic' or 'antiperiodic'")
    if method not in ("factored", "trace"):
        raise ValueError("method must be 'factored' or 'trace'")
    lo = -p.M - 1.0
    ceiling = _scan_ceiling(p, kind, count)

    if method == "trace":
        level = 2.0 if kind == "periodic" else -2.0

        def scan(h):
            return _scan_roots(lambda x: discriminant(p, x) - level, lo, ceiling, h)
    else:
        picks = (1, 2) if kind == "periodic" else (0, 3)

        def scan(h):
            out = []
            for idx in picks:
                out += _sign_change_roots(lambda x: half_period(p, x)[idx], lo, ceiling, h)
            return sorted(out)

    roots = scan(step)
    for _ in range(4):
        step /= 2.0
        finer = scan(step)
        if len(finer) == len(roots):
            break
        roots = finer
    if len(roots) < count:
        raise BracketExhaustedError(len(roots), count, ceiling)
    return roots[:count]


def bands_and_gaps(p, count: int) -> SpectralTable:
    """Band edges, bands and gaps for ``count`` periodic and antiperiodic pairs.

    Gaps are indexed ``Delta_{2n-1} = (mu_n,1, mu_n,2)`` and
    ``Delta_{2n} = (lambda_n,1, lambda_n,2)``; band ``Gamma_k`` is the
    closed interval between gaps ``k-1`` and ``k``.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    per = find_eigen(p, "periodic", 2 * count + 1)
    anti = find_eigen(p, "antiperiodic", 2 * count)
    table = SpectralTable(lambda0=per[0])
    for n in range(1, count + 1):
        table.periodic.append((n, per[2 * n - 1], per[2 * n]))
        table.antiperiodic.append((n, anti[2 * n - 2], anti[2 * n - 1]))
    for n in range(1, count + 1):
        _, m1, m2 = table.antiperiodic[n - 1]
        _, l1, l2 = table.periodic[n - 1]
        table.gaps.append((2 * n - 1, m2 - m1))
        table.gaps.append((2 * n, l2 - l1))
    edges = table.edges()
    # edges: lambda_0, mu11, mu12, lambda11, lambda12, mu21, ...
    left = [edges[0]] + edges[2::2]
    right = edges[1::2]
    for k, (lo, hi) in enumerate(zip(left, right), start=1):
        table.bands.append((k, lo, hi))
    return table
