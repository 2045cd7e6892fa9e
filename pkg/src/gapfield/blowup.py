"""Blowup factor, its background-dependent series and the potential gap.

The series constants C_min and C_max only see the background on the
x1-axis, so everything here works with the axial restriction of H with the
value at the origin removed.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from .constants import SeriesConstants, series_constants
from .errors import DomainError, SlowConvergenceError
from .geometry import ImageChargeSystem, SpherePair, build_images
from .harmonic import HarmonicBackground, require_harmonic
from .specfun import polygamma, psi

__all__ = [
    "BlowupResult",
    "Radii",
    "c_min_max",
    "psi_factor",
    "blowup",
    "psi_linear_closed",
    "psi_cubic_closed",
    "potential_gap_series",
    "average_field_compare",
    "closed_form_for",
    "blowup_curve",
    "write_blowup_csv",
]

MAX_TERMS = 10**6
_CHUNK = 4096
# B_2, B_4, B_6, B_8 over (2j)!
_EM = (1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0, -1.0 / 1209600.0)


@dataclass(frozen=True)
class BlowupResult:
    c_min: float
    c_max: float
    psi: float
    gap_series: float | None = None
    gap_asymptotic: float | None = None
    terms_used: int = 0
    error_estimate: float = 0.0

    def to_dict(self) -> dict:
        return {
            "c_min": self.c_min,
            "c_max": self.c_max,
            "psi": self.psi,
            "gap_series": self.gap_series,
            "gap_asymptotic": self.gap_asymptotic,
            "terms_used": self.terms_used,
            "error_estimate": self.error_estimate,
        }


@dataclass(frozen=True)
class Radii:
    """Radii-only stand-in for a sphere pair in the eps-free series."""

    r1: float
    r2: float


def _rising(s: float, m: int) -> float:
    out = 1.0
    for i in range(m):
        out *= s + i
    return out


def _hurwitz_tail(s: int, b: float, K: int) -> tuple[float, float]:
    """Euler-Maclaurin value of sum_{k>=K} (k+b)^-s and the size of the first dropped term."""
    x = K + b
    total = x ** (1 - s) / (s - 1) + 0.5 * x**-s
    for j, coef in enumerate(_EM[:-1], start=1):
        total += coef * _rising(s, 2 * j - 1) * x ** (-s - 2 * j + 1)
    nxt = abs(_EM[-1] * _rising(s, 7) * x ** (-s - 7))
    return total, nxt


def _background_series(coeffs: dict, R: float, a_pos: float, a_neg: float, tol: float, max_terms: int):
    """sum_k [f(R/(k+a_pos))/(k+a_pos) - f(-R/(k+a_neg))/(k+a_neg)], f(0) = 0.

    Terms are summed in chunks until one drops below ``tol`` (or the term
    budget runs out), then the remainder is closed with Euler-Maclaurin
    applied to each power separately. Returns (value, error estimate, K).
    """
    powers = [(n, c * R**n) for n, c in sorted(coeffs.items()) if n > 0 and c != 0]
    if not powers:
        return 0.0, 0.0, 0

    def terms(k):
        out = np.zeros(k.size)
        for n, w in powers:
            out += w * ((k + a_pos) ** -(n + 1) - (-1) ** n * (k + a_neg) ** -(n + 1))
        return out

    partial = []
    start = 0
    size = _CHUNK
    last = math.inf
    while start < max_terms:
        k = np.arange(start, min(start + size, max_terms), dtype=float)
        t = terms(k)
        below = np.flatnonzero(np.abs(t) < tol)
        if below.size:
            stop = below[0] + 1
            partial.append(t[:stop])
            start += stop
            last = abs(t[stop - 1])
            break
        partial.append(t)
        start += k.size
        last = abs(t[-1])
        size *= 2
    K = start
    if last >= tol:
        # budget exhausted; the terms must at least fall off like 1/k^2
        half = terms(np.array([K // 2], dtype=float))[0]
        if abs(half) > 0 and last * K**2 > 1.5 * abs(half) * (K // 2) ** 2:
            raise SlowConvergenceError(f"background series terms decay slower than 1/k^2 after {K} terms")
    head = math.fsum(np.concatenate(partial))
    tail = 0.0
    err = 0.0
    for n, w in powers:
        tp, ep = _hurwitz_tail(n + 1, a_pos, K)
        tn, en = _hurwitz_tail(n + 1, a_neg, K)
        tail += w * (tp - (-1) ** n * tn)
        err += abs(w) * (ep + en)
    err += 4 * np.finfo(float).eps * K * max(abs(head), 1.0)
    return head + tail, err, K


def _radii(pair) -> tuple[float, float]:
    return float(pair.r1), float(pair.r2)


def c_min_max(pair, H: HarmonicBackground, tol: float = 1e-10, max_terms: int = MAX_TERMS):
    """The two background series, with H shifted so that H(0) = 0.

    Returns ``(c_min, c_max, error_estimate, terms_used)``. Only the radii of
    ``pair`` are used.
    """
    if not tol >= 1e-12:
        raise DomainError(f"tol must be >= 1e-12, got {tol}")
    require_harmonic(H)
    r1, r2 = _radii(pair)
    s = r1 + r2
    R = r1 * r2 / s
    a_min, a_max = min(r1, r2) / s, max(r1, r2) / s
    coeffs = H.without_constant().axial_coeffs()
    cmin, e1, k1 = _background_series(coeffs, R, a_min, 1.0, tol, max_terms)
    cmax, e2, k2 = _background_series(coeffs, R, 1.0, a_max, tol, max_terms)
    return cmin, cmax, e1 + e2, k1 + k2


def _combine(pair, cmin: float, cmax: float) -> float:
    r1, r2 = _radii(pair)
    s = r1 + r2
    num = psi(max(r1, r2) / s) * cmin + psi(min(r1, r2) / s) * cmax
    den = psi(r2 / s) + psi(r1 / s)
    if not den < 0:
        raise ArithmeticError(f"digamma denominator must be negative, got {den}")
    return num / den


def psi_factor(pair, H: HarmonicBackground, tol: float = 1e-10, max_terms: int = MAX_TERMS) -> BlowupResult:
    """Blowup factor of a harmonic polynomial background.

    When ball 2 is the larger one the pair is mirrored so the larger ball
    comes first, the factor is computed there for H composed with the mirror,
    and its sign is flipped back: the potential gap changes sign under the
    relabelling. For backgrounds odd in x1 this equals the direct combination
    of ``c_min`` and ``c_max``.
    """
    cmin, cmax, err, terms = c_min_max(pair, H, tol, max_terms)
    r1, r2 = _radii(pair)
    if r2 > r1:
        mirrored = Radii(r2, r1)
        m_min, m_max, err2, terms2 = c_min_max(mirrored, H.mirrored(), tol, max_terms)
        value = 0.0 - _combine(mirrored, m_min, m_max)
        err += err2
        terms += terms2
    else:
        value = _combine(pair, cmin, cmax)
    return BlowupResult(c_min=cmin, c_max=cmax, psi=value, terms_used=terms, error_estimate=err)


def potential_gap_series(
    pair: SpherePair,
    H: HarmonicBackground,
    constants: SeriesConstants,
    sys1: ImageChargeSystem,
    sys2: ImageChargeSystem,
) -> float:
    """u on ball 1 minus u on ball 2 from the image charges, with H(0) = 0."""
    require_harmonic(H)
    f = H.without_constant()

    def paired(system: ImageChargeSystem, sign: float) -> float:
        v = system.charges * f.axial(system.points)
        even, odd = v[0::2], v[1::2]
        n = odd.size
        return sign * (math.fsum(even[:n] - odd) + math.fsum(even[n:]))

    s1 = paired(sys1, 1.0)
    s2 = paired(sys2, -1.0)
    return (constants.Q2 / constants.M) * s1 + (constants.Q1 / constants.M) * s2


def blowup(pair: SpherePair, H: HarmonicBackground, tol: float = 1e-10, tail_tol: float = 1e-12) -> BlowupResult:
    """Blowup factor together with the exact and asymptotic potential gap."""
    res = psi_factor(pair, H, tol)
    sys1 = build_images(pair, 1, tail_tol=tail_tol)
    sys2 = build_images(pair, 2, tail_tol=tail_tol)
    consts = series_constants(pair, systems=(sys1, sys2))
    gap = potential_gap_series(pair, H, consts, sys1, sys2)
    return BlowupResult(
        c_min=res.c_min,
        c_max=res.c_max,
        psi=res.psi,
        gap_series=gap,
        gap_asymptotic=2 * res.psi / abs(math.log(pair.eps)),
        terms_used=res.terms_used,
        error_estimate=res.error_estimate,
    )


def psi_linear_closed(r: float, E0: float = 1.0) -> float:
    """Blowup factor for H = E0*x1 with radii 1 and r."""
    if not r > 0:
        raise DomainError(f"r must be positive, got {r}")
    a, b = 1.0 / (1.0 + r), r / (1.0 + r)
    pa, pb = psi(a), psi(b)
    mix = (pa * polygamma(1, b) + pb * polygamma(1, a)) / (pa + pb)
    return E0 * r / (1.0 + r) * (math.pi**2 / 6 + mix)


def psi_cubic_closed(r: float) -> float:
    """Blowup factor for H = x1^3 - 3*x1*x2^2 with radii 1 and r."""
    if not r > 0:
        raise DomainError(f"r must be positive, got {r}")
    a, b = 1.0 / (1.0 + r), r / (1.0 + r)
    pa, pb = psi(a), psi(b)
    mix = (pa * polygamma(3, b) + pb * polygamma(3, a)) / (pa + pb)
    return (r / (1.0 + r)) ** 3 * (math.pi**4 / 90 + mix / 6)


def average_field_compare(pair: SpherePair, E0: float = 1.0) -> tuple[float, float]:
    """Potential gap over eps for H = E0*x1: the digamma formula and the older log formula."""
    r1, r2, eps = pair.r1, pair.r2, pair.eps
    s = r1 + r2
    a1, a2 = r1 / s, r2 / s
    p1, p2 = psi(a1), psi(a2)
    S = p1 + p2
    P = p1 * polygamma(1, a2) + p2 * polygamma(1, a1)
    R = r1 * r2 / s
    log_eps = abs(math.log(eps))
    new = math.pi**2 * E0 / (3 * eps * log_eps) * R * (1 + 6 / math.pi**2 * P / S)
    den = (0.5 * math.log(2 * r1 * r2 / (s * eps)) + 0.5772156649015329) * S - p1 * p2
    old = math.pi**2 * E0 / (6 * eps) * R * (S + 6 / math.pi**2 * P) / den
    return new, old


_CUBIC = HarmonicBackground(((1, 3, 0, 0), (-3, 1, 2, 0)))


def closed_form_for(H: HarmonicBackground):
    """Closed form r -> Psi(1, r) when H is a multiple of x1 or of the cubic; else None."""
    f = H.without_constant()
    mons = f.monomials
    if len(mons) == 1 and mons[0][1:] == (1, 0, 0):
        E0 = float(mons[0][0])
        return lambda r: psi_linear_closed(r, E0)
    if len(mons) == 2:
        scale = None
        for c, *p in mons:
            for c0, *p0 in _CUBIC.monomials:
                if p == p0:
                    ratio = c / c0
                    if scale is None:
                        scale = ratio
                    elif ratio != scale:
                        return None
        if scale is not None and f == _CUBIC.scaled(scale):
            k = float(scale)
            return lambda r: k * psi_cubic_closed(r)
    return None


def blowup_curve(H: HarmonicBackground, r_values, tol: float = 1e-10):
    """Rows ``(r, psi_series, psi_closed or None)`` for radii 1 and r."""
    closed = closed_form_for(H)
    rows = []
    for r in r_values:
        r = float(r)
        if not 0 < r <= 10:
            raise DomainError(f"r must lie in (0, 10], got {r}")
        val = psi_factor(Radii(1.0, r), H, tol).psi
        rows.append((r, val, closed(r) if closed else None))
    return rows


def _fmt(x) -> str:
    return "" if x is None else repr(float(x))


def write_blowup_csv(rows, H: HarmonicBackground, stream=None) -> str:
    """CSV with a comment header naming the background; LF line endings."""
    closed = closed_form_for(H)
    f = H.without_constant()
    E0 = repr(float(f.monomials[0][0])) if closed and len(f.monomials) == 1 else "NA"
    buf = io.StringIO()
    buf.write(f"# H={H} E0={E0}\n")
    buf.write("r,psi_series,psi_closed\n")
    for r, series, cl in rows:
        buf.write(f"{_fmt(r)},{_fmt(series)},{_fmt(cl)}\n")
    text = buf.getvalue()
    if stream is not None:
        stream.write(text)
    return text
