"""Polynomial harmonic backgrounds with exact rational coefficients."""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError, NotHarmonicError, PolynomialParseError

__all__ = [
    "HarmonicBackground",
    "parse_polynomial",
    "laplacian_check",
    "require_harmonic",
    "MAX_DEGREE",
]

MAX_DEGREE = 12

_NUMBER = re.compile(r"(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?(/\d+)?")
_VAR = re.compile(r"x([123])(\^(\d+))?")


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, np.integer)):
        return Fraction(int(c))
    if isinstance(c, str):
        return Fraction(c)
    return Fraction(float(c))


@dataclass(frozen=True)
class HarmonicBackground:
    """Polynomial H as monomials ``(coeff, px, py, pz)``.

    Like terms are merged and zero terms dropped on construction. Harmonicity
    is not enforced here; see :func:`laplacian_check`.
    """

    monomials: tuple

    def __post_init__(self):
        acc = defaultdict(Fraction)
        for term in self.monomials:
            c, px, py, pz = term
            powers = (int(px), int(py), int(pz))
            if min(powers) < 0:
                raise DomainError(f"negative exponent in {term!r}")
            acc[powers] += _as_fraction(c)
        mons = tuple(
            (c, *p) for p, c in sorted(acc.items(), key=lambda kv: (sum(kv[0]), kv[0])) if c != 0
        )
        if mons and max(sum(m[1:]) for m in mons) > MAX_DEGREE:
            raise DomainError(f"total degree exceeds {MAX_DEGREE}")
        object.__setattr__(self, "monomials", mons)

    @classmethod
    def linear(cls, E0=1, axis: int = 1) -> "HarmonicBackground":
        powers = [0, 0, 0]
        powers[axis - 1] = 1
        return cls(((_as_fraction(E0), *powers),))

    @classmethod
    def parse(cls, text: str) -> "HarmonicBackground":
        return parse_polynomial(text)

    @property
    def degree(self) -> int:
        return max((sum(m[1:]) for m in self.monomials), default=0)

    @property
    def value_at_origin(self) -> float:
        return float(sum((m[0] for m in self.monomials if m[1:] == (0, 0, 0)), Fraction(0)))

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape[:-1])
        for c, px, py, pz in self.monomials:
            out = out + float(c) * x[..., 0] ** px * x[..., 1] ** py * x[..., 2] ** pz
        return out

    def axial_coeffs(self) -> dict:
        """Coefficients of t^n in H(t, 0, 0)."""
        return {m[1]: float(m[0]) for m in self.monomials if m[2] == 0 and m[3] == 0}

    def axial(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for n, c in self.axial_coeffs().items():
            out = out + c * t**n
        return out

    def axial_part(self) -> "HarmonicBackground":
        return HarmonicBackground(tuple(m for m in self.monomials if m[2] == 0 and m[3] == 0))

    def without_constant(self) -> "HarmonicBackground":
        return HarmonicBackground(tuple(m for m in self.monomials if m[1:] != (0, 0, 0)))

    def mirrored(self) -> "HarmonicBackground":
        """H composed with the reflection x1 -> -x1."""
        return HarmonicBackground(tuple(((-1) ** m[1] * m[0], *m[1:]) for m in self.monomials))

    def scaled(self, factor) -> "HarmonicBackground":
        f = _as_fraction(factor)
        return HarmonicBackground(tuple((f * m[0], *m[1:]) for m in self.monomials))

    def laplacian(self) -> dict:
        out = defaultdict(Fraction)
        for c, px, py, pz in self.monomials:
            for i, p in enumerate((px, py, pz)):
                if p >= 2:
                    powers = [px, py, pz]
                    powers[i] -= 2
                    out[tuple(powers)] += c * p * (p - 1)
        return {k: v for k, v in out.items() if v != 0}

    def is_odd_in_x1(self) -> bool:
        return all(m[1] % 2 == 1 for m in self.monomials)

    def __str__(self) -> str:
        if not self.monomials:
            return "0"
        parts = []
        for c, px, py, pz in self.monomials:
            factors = [str(c)]
            for name, p in (("x1", px), ("x2", py), ("x3", pz)):
                if p == 1:
                    factors.append(name)
                elif p > 1:
                    factors.append(f"{name}^{p}")
            parts.append("*".join(factors))
        return " + ".join(parts).replace("+ -", "- ")


def parse_polynomial(text: str) -> HarmonicBackground:
    """Parse ``coeff*x1^a*x2^b*x3^c`` terms joined by ``+`` or ``-``.

    Whitespace is ignored, a missing exponent means 1, ``**`` is accepted for
    ``^``, and coefficients are read exactly (decimals, exponents, ``p/q``).
    """
    s = re.sub(r"\s+", "", text).replace("−", "-").replace("**", "^")
    if not s:
        raise PolynomialParseError("empty polynomial")
    terms = []
    i = 0
    n = len(s)
    while i < n:
        sign = 1
        while i < n and s[i] in "+-":
            sign = -sign if s[i] == "-" else sign
            i += 1
        coeff = Fraction(sign)
        powers = [0, 0, 0]
        expect_factor = True
        saw_factor = False
        while i < n and expect_factor:
            m = _VAR.match(s, i)
            if m:
                powers[int(m.group(1)) - 1] += int(m.group(3) or 1)
                i = m.end()
            else:
                m = _NUMBER.match(s, i)
                if not m:
                    raise PolynomialParseError(f"unexpected {s[i:i + 8]!r} at position {i} in {text!r}")
                try:
                    coeff *= Fraction(m.group(0))
                except (ValueError, ZeroDivisionError) as exc:
                    raise PolynomialParseError(f"bad coefficient {m.group(0)!r}") from exc
                i = m.end()
            saw_factor = True
            if i < n and s[i] == "*":
                i += 1
                if i == n:
                    raise PolynomialParseError(f"dangling '*' in {text!r}")
            else:
                expect_factor = False
        if not saw_factor:
            raise PolynomialParseError(f"missing term in {text!r}")
        if i < n and s[i] not in "+-":
            raise PolynomialParseError(f"unexpected {s[i]!r} at position {i} in {text!r}")
        terms.append((coeff, *powers))
    return HarmonicBackground(tuple(terms))


def laplacian_check(H: HarmonicBackground) -> bool:
    """True iff the Laplacian of H vanishes identically."""
    return not H.laplacian()


def require_harmonic(H: HarmonicBackground) -> HarmonicBackground:
    lap = H.laplacian()
    if lap:
        raise NotHarmonicError((c, *p) for p, c in sorted(lap.items()))
    return H
