"""Kronig-Penney step potential and its closed-form Fourier data.

The potential is 1-periodic, equal to ``a`` on ``[0, c]`` and ``b`` on ``(c, 1]``,
with zero mean. Fourier coefficients use the convention
``f_k = int_0^1 f(x) exp(-2 pi i k x) dx``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

TWO_PI = 2.0 * math.pi

#: q_0 is zero by the mean-zero normalisation; never computed.
Q_FOURIER_ZERO = 0j

MEAN_ZERO_RTOL = 1e-12
REALITY_RTOL = 1e-10
REALITY_FAIL_RTOL = 1e-8


class PotentialError(ValueError):
    pass


@dataclass(frozen=True)
class KroneckerPotential:
    """Step potential ``(a, b, c)`` with ``a < 0 < b``, ``0 < c < 1`` and zero mean.

    Constructing directly validates the mean-zero constraint to a relative
    ``1e-12``; :func:`new_potential` derives ``b`` so that it holds by construction.
    """

    a: float
    b: float
    c: float

    def __post_init__(self):
        a, b, c = float(self.a), float(self.b), float(self.c)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        if not (0.0 < c < 1.0):
            raise PotentialError("c must be in (0,1)")
        if not a < 0.0:
            raise PotentialError("a must be negative")
        if not b > 0.0:
            raise PotentialError("b must be positive")
        mean = a * c + (1.0 - c) * b
        if abs(mean) > MEAN_ZERO_RTOL * max(abs(a), b):
            raise PotentialError(
                f"potential mean a*c+(1-c)*b = {mean:.3e} is not zero"
            )

    @property
    def M(self) -> float:
        return max(abs(self.a), self.b)

    def __call__(self, x: float) -> float:
        return eval_potential(self, x)


def new_potential(a: float, c: float) -> KroneckerPotential:
    """Build the mean-zero potential with step value ``a`` on ``[0, c]``."""
    a = float(a)
    c = float(c)
    if not (0.0 < c < 1.0):
        raise PotentialError("c must be in (0,1)")
    if not a < 0.0:
        raise PotentialError("a must be negative")
    return KroneckerPotential(a, -a * c / (1.0 - c), c)


def eval_potential(p, x: float) -> float:
    """Value at ``x`` in ``[0, 1)``; the left piece is closed at ``c``."""
    return p.a if x <= p.c else p.b


def _require_nonzero(k: int):
    if k == 0:
        raise ValueError("index k must be nonzero")


def _phase(k: int, c: float, sign: int = -1) -> complex:
    """``exp(sign 2 pi i k c)`` with ``k c`` reduced mod 1 first, so integer ``k c`` is exact."""
    return cmath.exp(sign * TWO_PI * ((k * c) % 1.0) * 1j)


def q_fourier(p, k: int) -> complex:
    _require_nonzero(k)
    return (p.a - p.b) / (TWO_PI * k * 1j) * (1.0 - _phase(k, p.c))


def Q0(p) -> float:
    """Mean of Q(x) = int_0^x q(t) dt."""
    return 0.5 * p.b * (p.c - 1.0)


def Q_fourier(p, k: int) -> complex:
    if k == 0:
        return complex(Q0(p))
    return (p.a - p.b) / (TWO_PI * k) ** 2 * (_phase(k, p.c) - 1.0)


def S0(p) -> float:
    """Mean of S(x) = Q(x)^2."""
    return p.a * p.a * p.c * p.c / 3.0


def S_fourier(p, k: int) -> complex:
    """Fourier coefficient of ``Q(x)^2`` for ``k != 0``."""
    _require_nonzero(k)
    a, b, c = p.a, p.b, p.c
    e = _phase(k, c)
    pk = math.pi * k * 1j
    tk = TWO_PI * k
    tik = TWO_PI * k * 1j
    return (
        a * a / pk * ((e - 1.0) / tk**2 - c * e / tik)
        + b * b / pk * ((1.0 - e) / tk**2 + (c * e - 1.0) / tik)
        - b * b / pk * ((e - 1.0) / tik)
    )


def Q_xk(p, x: float, k: int) -> complex:
    """``int_0^x q(t) exp(2 pi i k t) dt - q_{-k} x``; vanishes at both ends."""
    _require_nonzero(k)
    qm = q_fourier(p, -k)
    osc = cmath.exp(TWO_PI * k * x * 1j) - 1.0
    if x <= p.c:
        return p.a / (TWO_PI * k * 1j) * osc - qm * x
    return p.b / (TWO_PI * k * 1j) * osc - qm * x + qm


def Qk0(p, k: int) -> complex:
    _require_nonzero(k)
    a, b, c = p.a, p.b, p.c
    e = _phase(k, c, 1) - 1.0
    return (b - a) * e / (4.0 * math.pi**2 * k * k) + (a + b) * e / (4.0 * math.pi * k * 1j)


def _d_term_complex(p, k: int) -> complex:
    a, b, c = p.a, p.b, p.c
    tik = TWO_PI * k * 1j
    em = _phase(k, c)
    qm = q_fourier(p, -k)
    left = a * a / tik * (c + (em - 1.0) / tik) + a * qm / tik * (c * em + (em - 1.0) / tik)
    right = (
        b * b / tik * (1.0 - c - (em - 1.0) / tik)
        + b * qm / tik * (1.0 - c * em - (em - 1.0) / tik)
        + b * qm / tik * (em - 1.0)
    )
    pref = 1j / (TWO_PI * k)
    return pref * (left + right) - pref * Qk0(p, k) * q_fourier(p, k)


def d_term(p, k: int) -> float:
    """Correction ``D(k)`` of the first-order term, evaluated in closed form.

    Raises ``ArithmeticError`` when the imaginary part is not negligible, which
    can only come from a broken closed form.
    """
    _require_nonzero(k)
    z = _d_term_complex(p, k)
    if abs(z.imag) > REALITY_FAIL_RTOL * (1.0 + abs(z.real)):
        raise ArithmeticError(f"D({k}) has imaginary part {z.imag:.3e}")
    return z.real
