"""Fixed-point solver for the small periodic and antiperiodic eigenvalues.

Each sector is solved by iterating ``x <- center + g(x)`` from ``x = center``.
Under the strict size condition on ``M = max(|a|, b)`` the map is a
contraction on the localization interval ``[center - M, center + M]`` and the
result carries an a-priori error bound (truncation part plus iteration part).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .series import (
    SectorIndex,
    SectorKind,
    TruncationParams,
    first,
    g_map,
)

PI = math.pi
UNCERTIFIED = float("nan")


class SolverError(RuntimeError):
    pass


class ApplicabilityError(SolverError):
    pass


class ContractionError(SolverError):
    pass


class LocalizationError(SolverError):
    pass


class Condition(enum.Enum):
    STRICT = "strict"
    RELAXED = "relaxed"
    VIOLATED = "violated"


@dataclass(frozen=True)
class LocalizationInterval:
    center: float
    half_width: float

    @property
    def lo(self) -> float:
        return self.center - self.half_width

    @property
    def hi(self) -> float:
        return self.center + self.half_width

    def __contains__(self, x: float) -> bool:
        return self.lo <= x <= self.hi


@dataclass(frozen=True)
class EigenSolution:
    """One computed eigenvalue with its certificate.

    ``branch`` is the sign choice of the map that produced it; ``sector.j``
    is the position in the ordered pair. Bounds are NaN when the result was
    obtained under the relaxed condition only.
    """

    sector: SectorIndex
    value: float
    iterations: int
    last_step: float
    truncation_bound: float
    iteration_bound: float
    total_bound: float
    condition: Condition
    branch: int = 1
    tol: float = 0.0

    @property
    def converged(self) -> bool:
        return self.last_step <= self.tol

    @property
    def certified(self) -> bool:
        return self.condition is Condition.STRICT and math.isfinite(self.total_bound)


def localization_interval(p, sector: SectorIndex) -> LocalizationInterval:
    return LocalizationInterval(sector.center, p.M)


def _strict_limit(sector: SectorIndex) -> float:
    n = sector.n
    if sector.kind is SectorKind.FIRST:
        return 4 * PI**2 / 3
    if sector.kind is SectorKind.PERIODIC:
        return 4 * PI**2 * (2 * n - 1) / 3
    if n == 1:
        return 8 * PI**2 / 3
    return 8 * PI**2 * (n - 1) / 3


def _relaxed_limit(sector: SectorIndex) -> float:
    n = sector.n
    if sector.kind is SectorKind.FIRST:
        return 2 * PI**2
    if sector.kind is SectorKind.PERIODIC:
        return 2 * PI**2 * (2 * n - 1)
    if n == 1:
        return 4 * PI**2
    return 4 * PI**2 * (n - 1)


def check_applicability(p, sector: SectorIndex, relaxed: bool = False) -> Condition:
    if p.M <= _strict_limit(sector):
        return Condition.STRICT
    if relaxed and p.M < _relaxed_limit(sector):
        return Condition.RELAXED
    return Condition.VIOLATED


def separation(sector: SectorIndex) -> float:
    """Lower bound on the distance from the center to every other unperturbed level."""
    n = sector.n
    if sector.kind is SectorKind.PERIODIC:
        return 4 * PI**2 * (2 * n - 1)
    if sector.kind is SectorKind.ANTIPERIODIC:
        return 8 * PI**2 if n == 1 else 4 * PI**2 * (2 * n - 2)
    return 4 * PI**2


def lipschitz_constant(p, sector: SectorIndex) -> float:
    width = p.b - p.a
    M = p.M
    if sector.kind is SectorKind.FIRST:
        d1 = 2 * PI**2 - M
        d2 = PI * (4 * PI**2 - M) - width
        C = 3 * width**2 / (4 * PI * d1 * d2) if d1 > 0 and d2 > 0 else math.inf
    else:
        gap = separation(sector) - M
        d2 = PI * gap - width
        C = 4 * width**2 / (PI * gap * d2) if gap > 0 and d2 > 0 else math.inf
    if not C < 1.0:
        raise ContractionError(f"contraction constant {C:.4g} >= 1 for {sector.label}")
    return C


def _tail_factor(s: int, sector: SectorIndex) -> int:
    """``min |m| |target - m|`` over tail indices ``|m| >= s + 1``, ``m != target``.

    Equals ``(s+1) |s+1-target|`` whenever ``target < s + 1``.
    """
    target = 2 * sector.n - (1 if sector.kind is SectorKind.ANTIPERIODIC else 0)
    best = None
    for m in (-(s + 1), s + 1, s + 2, target - 1, target + 1):
        if abs(m) < s + 1 or m in (0, target):
            continue
        v = abs(m) * abs(target - m)
        best = v if best is None else min(best, v)
    return best


def truncation_bound(p, t: TruncationParams, sector: SectorIndex) -> float:
    """Bound on ``|eigenvalue - exact fixed point of the truncated map|``."""
    C = lipschitz_constant(p, sector)
    width = p.b - p.a
    M = p.M
    r, s = t.r, t.s
    tail = _tail_factor(s, sector)
    tail_den = 4 * PI**2 * tail - M
    if sector.kind is SectorKind.FIRST:
        depth = 9 * width ** (r + 2) / (
            16 * PI ** (r + 1) * (4 * PI**2 - M) ** (r - 1) * (2 * PI**2 - M)
            * (PI * (4 * PI**2 - M) - width) * (1 - C)
        )
        window_num = 3 * width**2
    else:
        gap = separation(sector) - M
        depth = 3 * width ** (r + 2) / (
            2 * PI ** (r + 1) * gap**r * (PI * gap - width) * (1 - C)
        )
        window_num = 6 * width**2
    if tail_den <= 0:
        return math.inf
    window = window_num / (PI**2 * (s + 1) ** 2 * tail_den * (1 - C))
    return depth + window


def iteration_prefactor(p, sector: SectorIndex) -> float:
    """Bound on ``|x_0 - fixed point|`` for ``x_0 = center``."""
    C = lipschitz_constant(p, sector)
    width = p.b - p.a
    n = sector.n
    if sector.kind is SectorKind.FIRST:
        return width**2 / (2 * PI * (2 * PI**3 - width) * (1 - C))
    coupling = width / (PI * (2 * n if sector.kind is SectorKind.PERIODIC else 2 * n - 1))
    sep = separation(sector)
    return (coupling + 3 * width**2 / (2 * PI * (PI * sep - width))) / (1 - C)


def iteration_bound(p, t: TruncationParams, sector: SectorIndex, i: int) -> float:
    if i < 0:
        raise ValueError("iteration index must be >= 0")
    C = lipschitz_constant(p, sector)
    return C**i * iteration_prefactor(p, sector)


def _iterate(p, t: TruncationParams, sector: SectorIndex, interval: LocalizationInterval):
    center = sector.center
    x = center
    step = math.inf
    it = 0
    while it < t.max_iter:
        x_new = center + g_map(p, t, sector, x)
        it += 1
        step = abs(x_new - x)
        x = x_new
        if x not in interval:
            raise LocalizationError(
                f"iterate {x:.12g} left [{interval.lo:.6g}, {interval.hi:.6g}] "
                f"for {sector.label}"
            )
        if step <= t.tol:
            break
    return x, it, step


def _solution(p, t, sector, branch, value, iterations, step, condition):
    if condition is Condition.STRICT:
        tb = truncation_bound(p, t, sector)
        ib = iteration_bound(p, t, sector, iterations)
        total = tb + ib
    else:
        tb = ib = total = UNCERTIFIED
    return EigenSolution(
        sector=sector,
        value=value,
        iterations=iterations,
        last_step=step,
        truncation_bound=tb,
        iteration_bound=ib,
        total_bound=total,
        condition=condition,
        branch=branch,
        tol=t.tol,
    )


def solve_branch(p, t: TruncationParams, sector: SectorIndex, relaxed: bool = False) -> EigenSolution:
    """Iterate the map with the sign branch ``sector.j`` literally (no reordering)."""
    condition = check_applicability(p, sector, relaxed)
    if condition is Condition.VIOLATED:
        raise ApplicabilityError(f"M = {p.M:.6g} violates the size condition for {sector.label}")
    if condition is Condition.STRICT:
        lipschitz_constant(p, sector)
    interval = localization_interval(p, sector)
    value, iterations, step = _iterate(p, t, sector, interval)
    return _solution(p, t, sector, sector.j, value, iterations, step, condition)


def solve_pair(p, t: TruncationParams, kind: SectorKind, n: int, relaxed: bool = False):
    """Both eigenvalues of sector ``n``, ordered so that the first is the smaller."""
    sols = [solve_branch(p, t, SectorIndex(kind, n, j), relaxed) for j in (1, 2)]
    sols.sort(key=lambda sol: sol.value)
    return tuple(
        EigenSolution(**{**sol.__dict__, "sector": SectorIndex(kind, n, pos)})
        for pos, sol in enumerate(sols, start=1)
    )


def solve(p, t: TruncationParams, sector: SectorIndex, relaxed: bool = False) -> EigenSolution:
    """Compute the eigenvalue targeted by ``sector``.

    For ``n >= 1`` both branches are solved and ``sector.j`` picks the
    smaller (``j = 1``) or larger (``j = 2``) of the pair.
    """
    if sector.kind is SectorKind.FIRST:
        return solve_branch(p, t, sector, relaxed)
    return solve_pair(p, t, sector.kind, sector.n, relaxed)[sector.j - 1]


def solve_spectrum(p, t: TruncationParams, n_max: int, relaxed: bool = False):
    """Solve ``lambda_0`` and every pair with ``n <= n_max``.

    Returns a dict keyed by sector label; sectors whose condition is violated
    map to the raised :class:`SolverError` instead of a solution.
    """
    out = {}
    try:
        out["lambda_0"] = solve(p, t, first(), relaxed)
    except SolverError as exc:
        out["lambda_0"] = exc
    for n in range(1, n_max + 1):
        for kind, sym in ((SectorKind.PERIODIC, "lambda"), (SectorKind.ANTIPERIODIC, "mu")):
            try:
                pair = solve_pair(p, t, kind, n, relaxed)
            except SolverError as exc:
                pair = (exc, exc)
            for j in (1, 2):
                out[f"{sym}_{n},{j}"] = pair[j - 1]
    return out
