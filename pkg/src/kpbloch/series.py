"""Truncated perturbation series a, b (periodic) and eta, nu (antiperiodic).

Every sum runs over index tuples ``(n_1, ..., n_k)`` with entries in
``[-s, s] \\ {0}`` whose partial sums avoid ``{0, 2n}`` (periodic) or
``{0, 2n-1}`` (antiperiodic). The k-th term for one tuple is

    q_{n_1} ... q_{n_k} q_{target - n_1 - ... - n_k} / prod_l den(n_1 + ... + n_l)

with ``target = 0`` for a/eta and ``target = 2n`` (``2n - 1``) for b (nu).
The sums are evaluated by dynamic programming over the partial sum, which is
the only state the denominators depend on. A brute-force enumeration over
tuples is kept as an independent check.
"""
from __future__ import annotations

import cmath
import enum
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .potential import TWO_PI, q_fourier

DEGENERATE_DENOMINATOR = 1e-8
REALITY_RTOL = 1e-9


class SeriesError(ArithmeticError):
    pass


class DegenerateDenominatorError(SeriesError):
    pass


class RealityError(SeriesError):
    pass


class SectorKind(enum.Enum):
    PERIODIC = "periodic"
    ANTIPERIODIC = "antiperiodic"
    FIRST = "first"


@dataclass(frozen=True)
class TruncationParams:
    r: int = 5
    s: int = 5
    tol: float = 1e-14
    max_iter: int = 100

    def __post_init__(self):
        if self.r < 1:
            raise ValueError("r must be >= 1")
        if self.s < 1:
            raise ValueError("s must be >= 1")
        if not (0.0 < self.tol < 1.0):
            raise ValueError("tol must be in (0,1)")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


@dataclass(frozen=True)
class SectorIndex:
    """Which eigenvalue to target.

    ``FIRST`` is the ground state ``lambda_0`` (``n = 0``). ``PERIODIC`` and
    ``ANTIPERIODIC`` with ``n >= 1`` target the pair ``lambda_{n,j}`` /
    ``mu_{n,j}``; ``j`` in {1, 2}.
    """

    kind: SectorKind
    n: int = 0
    j: int = 1

    def __post_init__(self):
        if self.kind is SectorKind.FIRST:
            if self.n != 0:
                raise ValueError("FIRST sector requires n = 0")
        elif self.n < 1:
            raise ValueError("periodic/antiperiodic sectors require n >= 1")
        if self.j not in (1, 2):
            raise ValueError("j must be 1 or 2")

    @property
    def center(self) -> float:
        if self.kind is SectorKind.ANTIPERIODIC:
            return ((2 * self.n - 1) * math.pi) ** 2
        return (TWO_PI * self.n) ** 2

    @property
    def label(self) -> str:
        if self.kind is SectorKind.FIRST:
            return "lambda_0"
        sym = "lambda" if self.kind is SectorKind.PERIODIC else "mu"
        return f"{sym}_{self.n},{self.j}"


def first() -> SectorIndex:
    return SectorIndex(SectorKind.FIRST, 0, 1)


def periodic(n: int, j: int) -> SectorIndex:
    return SectorIndex(SectorKind.PERIODIC, n, j)


def antiperiodic(n: int, j: int) -> SectorIndex:
    return SectorIndex(SectorKind.ANTIPERIODIC, n, j)


def _target(n: int, antiperiodic_: bool) -> int:
    return 2 * n - 1 if antiperiodic_ else 2 * n


def _denominator(lam: float, n: int, m, antiperiodic_: bool):
    if antiperiodic_:
        return lam - ((2 * (n - m) - 1) * math.pi) ** 2
    return lam - (TWO_PI * (n - m)) ** 2


def _q_table(p, width: int) -> np.ndarray:
    """``q_k`` for ``k`` in ``[-width, width]`` (index ``k + width``), ``q_0 = 0``."""
    out = np.zeros(2 * width + 1, dtype=complex)
    for k in range(-width, width + 1):
        if k:
            out[k + width] = q_fourier(p, k)
    return out


def _check_denominators(lam, n, level, s, excluded, antiperiodic_):
    ms = np.arange(-level * s, level * s + 1)
    ms = ms[~np.isin(ms, list(excluded))]
    den = _denominator(lam, n, ms, antiperiodic_)
    bad = np.flatnonzero(np.abs(den) < DEGENERATE_DENOMINATOR)
    if bad.size:
        m = int(ms[bad[0]])
        raise DegenerateDenominatorError(
            f"denominator {den[bad[0]]:.3e} vanishes at term {level} for index "
            f"tuples with partial sum n_1+...+n_{level} = {m}"
        )


def series_terms(p, n: int, lam: float, r: int, s: int, antiperiodic_: bool = False):
    """Return ``(a_terms, b_terms)``: lists of the k = 1..r truncated sums.

    ``a_terms`` are the target-0 sums (a or eta), ``b_terms`` the
    target-2n / 2n-1 sums (b or nu); both complex.
    """
    target = _target(n, antiperiodic_)
    excluded = {0, target}
    width = r * s + abs(target) + s
    qt = _q_table(p, width)
    step = qt[width - s: width + s + 1]  # q_d for d in [-s, s]; q_0 = 0 skips d = 0

    state = np.array([1.0 + 0j])  # partial sums in [-l*s, l*s]
    a_terms, b_terms = [], []
    for level in range(1, r + 1):
        _check_denominators(lam, n, level, s, excluded, antiperiodic_)
        state = np.convolve(state, step)
        ms = np.arange(-level * s, level * s + 1)
        keep = ~np.isin(ms, list(excluded))
        with np.errstate(divide="ignore", invalid="ignore"):
            state = np.where(keep, state / _denominator(lam, n, ms, antiperiodic_), 0.0)
        a_terms.append(_fsum_complex(state * qt[width - ms]))
        b_terms.append(_fsum_complex(state * qt[width + target - ms]))
    return a_terms, b_terms


def _fsum_complex(values) -> complex:
    values = np.asarray(values)
    return complex(math.fsum(values.real), math.fsum(values.imag))


def enumerate_terms(p, n: int, lam: float, r: int, s: int, antiperiodic_: bool = False,
                    reverse: bool = False):
    """Brute-force counterpart of :func:`series_terms` over explicit tuples.

    Exponential in ``r``; intended only as a test oracle. ``reverse`` flips the
    nesting order of the tuple loops.
    """
    target = _target(n, antiperiodic_)
    excluded = {0, target}
    steps = [d for d in range(-s, s + 1) if d]
    if reverse:
        steps = steps[::-1]

    def q(k):
        return 0j if k == 0 else q_fourier(p, k)

    a_terms, b_terms = [], []
    for k in range(1, r + 1):
        acc_a, acc_b = [], []
        for tup in itertools.product(steps, repeat=k):
            partial = 0
            weight = 1.0 + 0j
            for d in tup:
                partial += d
                if partial in excluded:
                    break
                den = _denominator(lam, n, partial, antiperiodic_)
                if abs(den) < DEGENERATE_DENOMINATOR:
                    raise DegenerateDenominatorError(f"denominator vanishes for tuple {tup}")
                weight *= q(d) / den
            else:
                acc_a.append(weight * q(-partial))
                acc_b.append(weight * q(target - partial))
        a_terms.append(_fsum_complex(acc_a) if acc_a else 0j)
        b_terms.append(_fsum_complex(acc_b) if acc_b else 0j)
    return a_terms, b_terms


def _real_part(z: complex, what: str) -> float:
    if abs(z.imag) > REALITY_RTOL * (1.0 + abs(z.real)):
        raise RealityError(f"{what} has imaginary part {z.imag:.3e} (real part {z.real:.6e})")
    return z.real


def _check_k(t: TruncationParams, k: int):
    if not 1 <= k <= t.r:
        raise ValueError(f"k must be in [1, {t.r}]")


def a_trunc(p, t: TruncationParams, n: int, k: int, lam: float) -> float:
    _check_k(t, k)
    a_terms, _ = series_terms(p, n, lam, k, t.s)
    return _real_part(a_terms[k - 1], f"a_{{s,{k},{n}}}")


def b_trunc(p, t: TruncationParams, n: int, k: int, lam: float) -> complex:
    _check_k(t, k)
    if n < 1:
        raise ValueError("n must be >= 1")
    return series_terms(p, n, lam, k, t.s)[1][k - 1]


def eta_trunc(p, t: TruncationParams, n: int, k: int, mu: float) -> float:
    _check_k(t, k)
    if n < 1:
        raise ValueError("n must be >= 1")
    a_terms, _ = series_terms(p, n, mu, k, t.s, antiperiodic_=True)
    return _real_part(a_terms[k - 1], f"eta_{{s,{k},{n}}}")


def nu_trunc(p, t: TruncationParams, n: int, k: int, mu: float) -> complex:
    _check_k(t, k)
    if n < 1:
        raise ValueError("n must be >= 1")
    return series_terms(p, n, mu, k, t.s, antiperiodic_=True)[1][k - 1]


def coupling_phase(p, sector: SectorIndex) -> complex:
    """Unit factor that makes the rotated off-diagonal coupling real."""
    idx = _target(sector.n, sector.kind is SectorKind.ANTIPERIODIC)
    return cmath.exp(1j * math.pi * idx * p.c)


def map_parts(p, t: TruncationParams, sector: SectorIndex, lam: float):
    """Return the real diagonal sum and the real rotated coupling at ``lam``.

    The coupling is ``e^{i pi m c} (q_m + sum_k b_k)`` with ``m = 2n`` or
    ``2n - 1``; it is 0 for the FIRST sector.
    """
    anti = sector.kind is SectorKind.ANTIPERIODIC
    a_terms, b_terms = series_terms(p, sector.n, lam, t.r, t.s, antiperiodic_=anti)
    diag = _real_part(_fsum_complex(a_terms), "diagonal series")
    if sector.kind is SectorKind.FIRST:
        return diag, 0.0
    idx = _target(sector.n, anti)
    coupling = coupling_phase(p, sector) * (q_fourier(p, idx) + _fsum_complex(b_terms))
    return diag, _real_part(coupling, "rotated coupling series")


def g_map(p, t: TruncationParams, sector: SectorIndex, lam: float) -> float:
    """Right side of the fixed-point equation ``lam = center + g(lam)``.

    For periodic/antiperiodic sectors ``j`` selects the sign branch
    ``diag - (-1)^j * coupling``; which branch is the lower eigenvalue depends
    on the sign of the coupling.
    """
    diag, coupling = map_parts(p, t, sector, lam)
    if sector.kind is SectorKind.FIRST:
        return diag
    return diag - (-1) ** sector.j * coupling


def residual(p, t: TruncationParams, sector: SectorIndex, lam: float) -> float:
    """``K(lam) = lam - center - g(lam)``; zero at the fixed point."""
    return lam - sector.center - g_map(p, t, sector, lam)


def closed_first_order(p, n: int):
    """Closed forms of ``a_1((2 pi n)^2)`` and of the rotated ``q_{2n} + b_1((2 pi n)^2)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    a, b, c = p.a, p.b, p.c
    pi = math.pi
    a1 = (
        -a * b / (16 * pi**2 * n**2)
        + (b * b - a * a) * math.sin(4 * pi * n * c) / (64 * pi**3 * n**3)
        + 3 * (b - a) ** 2 * (math.cos(4 * pi * n * c) - 1.0) / (128 * pi**4 * n**4)
    )
    rotated = (
        (a - b) * math.sin(2 * pi * n * c) / (2 * pi * n)
        + a * b * math.cos(2 * pi * n * c) / (8 * pi**2 * n**2)
        + (a * a - b * b) * math.sin(2 * pi * n * c) / (16 * pi**3 * n**3)
    )
    return a1, rotated


def closed_coupling(p, n: int) -> complex:
    """``q_{2n} + 2 Q_0 Q_{2n} - S_{2n}`` written out for the step potential."""
    if n < 1:
        raise ValueError("n must be >= 1")
    a, b, c = p.a, p.b, p.c
    pi = math.pi
    e = cmath.exp(-4j * pi * n * c)
    return (
        (a - b) * (1.0 - e) / (4 * pi * n * 1j)
        + a * b * (1.0 + e) / (16 * pi**2 * n**2)
        + (a * a - b * b) * (1.0 - e) / (32 * pi**3 * n**3 * 1j)
    )
