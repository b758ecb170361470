"""Large-index formulas for gap lengths and band-edge eigenvalues."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .potential import Q0, Q_fourier, S_fourier, d_term, q_fourier
from .series import SectorIndex, SectorKind

PI = math.pi


@dataclass(frozen=True)
class GapPrediction:
    k: int
    first_order: float
    second_order: float
    theta: float


def coupling_modulus(p, k: int) -> float:
    """``|q_k - S_k + 2 Q_0 Q_k|``."""
    return abs(q_fourier(p, k) - S_fourier(p, k) + 2.0 * Q0(p) * Q_fourier(p, k))


def gap_phase(p, k: int) -> float:
    """Angle ``theta_k`` in ``[0, 2 pi)`` with ``cos``, ``sin`` proportional to ``alpha``, ``beta``.

    ``alpha = (a - b) / (pi k)`` and ``beta = a b / (2 pi^2 k^2)``.
    """
    alpha = (p.a - p.b) / (PI * k)
    beta = p.a * p.b / (2.0 * PI**2 * k * k)
    return math.atan2(beta, alpha) % (2.0 * PI)


def gap_prediction(p, k: int) -> GapPrediction:
    if k < 1:
        raise ValueError("gap index k must be >= 1")
    return GapPrediction(
        k=k,
        first_order=2.0 * abs(q_fourier(p, k)),
        second_order=2.0 * coupling_modulus(p, k),
        theta=gap_phase(p, k),
    )


def eigen_asym(p, sector: SectorIndex, exact_shift: bool = False) -> float:
    """Two-term large-``n`` estimate of ``lambda_{n,j}`` or ``mu_{n,j}``.

    The shift term is ``-ab / (4 pi^2 m^2)`` with ``m = 2n`` or ``2n - 1``;
    ``exact_shift`` replaces it by ``D(m)``.
    """
    if sector.kind is SectorKind.FIRST or sector.n < 1:
        raise ValueError("eigen_asym needs a periodic or antiperiodic sector with n >= 1")
    m = 2 * sector.n if sector.kind is SectorKind.PERIODIC else 2 * sector.n - 1
    center = (PI * m) ** 2
    shift = d_term(p, m) if exact_shift else -p.a * p.b / (4.0 * PI**2 * m * m)
    return center + shift + (-1) ** sector.j * coupling_modulus(p, m)


def condition_c_value(p, k: int) -> float:
    """``|sin(pi k c + theta_k)|``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return abs(math.sin(PI * k * p.c + gap_phase(p, k)))


def condition_c(p, k: int, eps: float) -> bool:
    """Whether ``|sin(pi k c + theta_k)| > eps / k`` holds at index ``k``."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    return condition_c_value(p, k) > eps / k
