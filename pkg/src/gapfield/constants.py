"""Alternating charge sums Q1, Q2 and the normalising constant M.

``q_series`` and ``m_series`` sum the image charges; ``q_closed`` and
``m_asymptotic`` are the digamma closed forms they are checked against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DecompositionMismatchError, DomainError
from .geometry import ImageChargeSystem, SpherePair, build_images
from .specfun import psi

__all__ = [
    "SeriesConstants",
    "q_closed",
    "q_series",
    "q_from_systems",
    "m_from_systems",
    "m_series",
    "m_asymptotic",
    "series_constants",
    "closed_constants",
]


@dataclass(frozen=True)
class SeriesConstants:
    Q1: float
    Q2: float
    M: float
    method: str
    tail_bound: float = 0.0
    terms_used: int = 0

    def to_dict(self) -> dict:
        return {
            "Q1": self.Q1,
            "Q2": self.Q2,
            "M": self.M,
            "method": self.method,
            "tail_bound": self.tail_bound,
            "terms_used": self.terms_used,
        }


def q_closed(pair: SpherePair) -> tuple[float, float]:
    s = pair.r1 + pair.r2
    a1, a2 = pair.r1 / s, pair.r2 / s
    return -a2 * psi(a2), -a1 * psi(a1)


def _check_tol(tol: float) -> None:
    if not tol >= 1e-12:
        raise DomainError(f"tol must be >= 1e-12, got {tol}")


def _pair_sum(system: ImageChargeSystem) -> float:
    """Sum of (q_{2k} - q_{2k+1}) as q_{2k} (1 - mu_{2k+1}); every term positive."""
    q_even = system.charges[0::2]
    mu_odd = system.multipliers[1::2]
    n = mu_odd.size
    return math.fsum(q_even[:n] * (1.0 - mu_odd)) + math.fsum(q_even[n:])


def q_from_systems(sys1: ImageChargeSystem, sys2: ImageChargeSystem) -> tuple[float, float]:
    return _pair_sum(sys1), _pair_sum(sys2)


def _systems(pair: SpherePair, tol: float):
    return build_images(pair, 1, tail_tol=tol), build_images(pair, 2, tail_tol=tol)


def q_series(pair: SpherePair, tol: float = 1e-9) -> tuple[float, float]:
    """Q1, Q2 by pairwise summation of the image charges.

    Truncation stops once the bound on the omitted charge mass, which
    dominates the alternating remainder, is below ``tol``.
    """
    _check_tol(tol)
    sys1, sys2 = _systems(pair, tol)
    return q_from_systems(sys1, sys2)


def m_from_systems(
    sys1: ImageChargeSystem,
    sys2: ImageChargeSystem,
    Q: tuple[float, float] | None = None,
    rtol: float = 1e-9,
) -> float:
    """Mean of the two decompositions of M; raise if they disagree.

    The decompositions agree identically when the charges are the products
    of their multipliers, which is what the check guards.
    """
    Q1, Q2 = q_from_systems(sys1, sys2) if Q is None else Q
    s1e, s1o = math.fsum(sys1.charges[0::2]), math.fsum(sys1.charges[1::2])
    s2e, s2o = math.fsum(sys2.charges[0::2]), math.fsum(sys2.charges[1::2])
    m_a = Q2 * s1e + Q1 * s2o
    m_b = Q1 * s2e + Q2 * s1o
    mean = 0.5 * (m_a + m_b)
    if abs(m_a - m_b) > rtol * abs(mean):
        raise DecompositionMismatchError(
            f"M decompositions differ: {m_a!r} vs {m_b!r} (rel {abs(m_a - m_b) / abs(mean):.3e})"
        )
    return mean


def m_series(pair: SpherePair, tol: float = 1e-9) -> float:
    _check_tol(tol)
    sys1, sys2 = _systems(pair, tol)
    return m_from_systems(sys1, sys2, rtol=10 * tol)


def m_asymptotic(pair: SpherePair) -> float:
    """Leading |log eps| term of M (eps taken in the caller's length unit)."""
    s = pair.r1 + pair.r2
    a1, a2 = pair.r1 / s, pair.r2 / s
    return -0.5 * pair.r1 * pair.r2 / s**2 * abs(math.log(pair.eps)) * (psi(a1) + psi(a2))


def series_constants(
    pair: SpherePair,
    tol: float = 1e-12,
    systems: tuple[ImageChargeSystem, ImageChargeSystem] | None = None,
) -> SeriesConstants:
    """Q1, Q2 and M from one pair of image systems (built here if not given)."""
    sys1, sys2 = systems if systems is not None else _systems(pair, tol)
    Q = q_from_systems(sys1, sys2)
    M = m_from_systems(sys1, sys2, Q, rtol=max(10 * tol, 1e-9))
    return SeriesConstants(
        Q1=Q[0],
        Q2=Q[1],
        M=M,
        method="series",
        tail_bound=max(sys1.tail_bound, sys2.tail_bound),
        terms_used=sys1.truncation_K + sys2.truncation_K + 2,
    )


def closed_constants(pair: SpherePair) -> SeriesConstants:
    Q1, Q2 = q_closed(pair)
    return SeriesConstants(Q1=Q1, Q2=Q2, M=m_asymptotic(pair), method="closed_form")
