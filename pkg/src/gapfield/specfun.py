"""Digamma, shifted digamma and the polygamma functions of order 1 and 3.

Real arguments only. Each function shifts its argument upward with the
recurrence until it is at least ``SHIFT``, then applies the asymptotic
series with Bernoulli numbers through B14.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

__all__ = [
    "SpecialValue",
    "euler_gamma",
    "digamma",
    "digamma_value",
    "psi",
    "polygamma",
    "polygamma_value",
]

EULER_GAMMA = 0.5772156649015329
SHIFT = 8.0

# B_2, B_4, ..., B_14
_BERNOULLI = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
)
_B16 = -3617.0 / 510.0
_EPS = 2.0**-52


@dataclass(frozen=True)
class SpecialValue:
    value: float
    abs_error_estimate: float


def euler_gamma() -> float:
    return EULER_GAMMA


def _check_arg(x) -> float:
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"argument must be finite and positive, got {x!r}")
    return x


def _shift(x: float, power: int):
    """Return (y, terms) with y = x + m >= SHIFT and terms = [(x+j)^-power]."""
    terms = []
    while x < SHIFT:
        terms.append(x ** (-power))
        x += 1.0
    return x, terms


def digamma_value(x) -> SpecialValue:
    x = _check_arg(x)
    y, terms = _shift(x, 1)
    inv2 = 1.0 / (y * y)
    # Horner over the Bernoulli tail, highest order first
    series = 0.0
    for k in range(len(_BERNOULLI), 0, -1):
        series = series * inv2 + _BERNOULLI[k - 1] / (2 * k)
    series *= inv2
    asym = math.log(y) - 0.5 / y - series
    value = asym - math.fsum(terms)
    trunc = abs(_B16 / 16.0) * y**-16
    rounding = 4 * _EPS * (abs(asym) + math.fsum(terms))
    return SpecialValue(value, trunc + rounding)


def digamma(x) -> float:
    """Logarithmic derivative of the gamma function for x > 0."""
    return digamma_value(x).value


def psi(x) -> float:
    """Shifted digamma, ``digamma(x) + euler_gamma()``; vanishes at 1."""
    return digamma(x) + EULER_GAMMA


def polygamma_value(n: int, x) -> SpecialValue:
    if n not in (1, 3):
        raise DomainError(f"polygamma order must be 1 or 3, got {n!r}")
    x = _check_arg(x)
    y, terms = _shift(x, n + 1)
    fact_n = math.factorial(n)
    inv2 = 1.0 / (y * y)
    # (n-1)!/y^n + n!/(2 y^(n+1)) + sum_k B_2k (2k+n-1)!/((2k)! y^(2k+n))
    series = 0.0
    for k in range(len(_BERNOULLI), 0, -1):
        coeff = _BERNOULLI[k - 1] * math.factorial(2 * k + n - 1) / math.factorial(2 * k)
        series = series * inv2 + coeff
    series *= inv2 * y**-n
    asym = math.factorial(n - 1) * y**-n + fact_n * 0.5 * y ** -(n + 1) + series
    # odd n: sign (-1)^(n+1) = +1
    shifted = fact_n * math.fsum(terms)
    value = asym + shifted
    k = len(_BERNOULLI) + 1
    trunc = abs(_B16) * math.factorial(2 * k + n - 1) / math.factorial(2 * k) * y ** -(2 * k + n)
    return SpecialValue(value, trunc + 4 * _EPS * value)


def polygamma(n: int, x) -> float:
    """n-th derivative of the digamma function, n in {1, 3}."""
    return polygamma_value(n, x).value
