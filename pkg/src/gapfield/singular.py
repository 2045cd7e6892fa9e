"""The singular function h built from the two image families, and its gradient.

h is harmonic outside both balls, constant on each sphere, carries flux +1
out of ball 1 and -1 out of ball 2, and decays at infinity. Evaluation is a
direct sum over all image charges, vectorised over points.
"""

from __future__ import annotations

import io
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .constants import SeriesConstants, series_constants
from .errors import DomainError, QuadratureWarning, RegionError, SignConsistencyError
from .geometry import ImageChargeSystem, SpherePair, build_images, fixed_points

__all__ = [
    "FieldSample",
    "QuadratureSpec",
    "image_setup",
    "h_eval",
    "grad_h",
    "sample",
    "h_gap",
    "flux",
    "grad_h_asymptotic",
    "in_gap_region",
    "write_h_grid_csv",
]

FOUR_PI = 4.0 * math.pi
_CHUNK_ELEMS = 2_000_000


@dataclass(frozen=True)
class FieldSample:
    x: np.ndarray
    value: float
    gradient: np.ndarray
    rho: float
    truncation_error: float = 0.0


@dataclass(frozen=True)
class QuadratureSpec:
    """Product rule on a sphere: graded Gauss-Legendre panels in cos(theta), trapezoid in azimuth.

    ``n_panels`` is a minimum; more panels are added when the image charges
    sit closer to the surface than the smallest panel resolves.
    """

    n_panels: int = 8
    nodes: int = 16
    ratio: float = 2.0
    n_azimuth: int = 64

    def __post_init__(self):
        if self.n_panels * self.nodes < 16 or self.n_azimuth < 32:
            raise DomainError("quadrature resolution must be at least 16 x 32")
        if not self.ratio > 1:
            raise DomainError("panel ratio must exceed 1")

    def refined(self) -> "QuadratureSpec":
        return QuadratureSpec(self.n_panels + 2, self.nodes + 8, self.ratio, self.n_azimuth)


def image_setup(pair: SpherePair, tail_tol: float = 1e-12):
    """Both image families and their series constants."""
    sys1 = build_images(pair, 1, tail_tol=tail_tol)
    sys2 = build_images(pair, 2, tail_tol=tail_tol)
    return sys1, sys2, series_constants(pair, systems=(sys1, sys2))


def _weights(sys1, sys2, constants):
    w1 = -(constants.Q2 / constants.M) * sys1.signs * sys1.charges
    w2 = (constants.Q1 / constants.M) * sys2.signs * sys2.charges
    return np.concatenate([sys1.points, sys2.points]), np.concatenate([w1, w2])


def _as_points(x) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != 3:
        raise DomainError(f"points must have a trailing dimension of 3, got shape {x.shape}")
    return x.reshape(-1, 3), x.ndim == 1


def _check_domain(pair: SpherePair, pts: np.ndarray, P: np.ndarray) -> None:
    if not np.all(pair.exterior(pts)):
        raise DomainError("evaluation point lies strictly inside a ball")
    guard = 1e-12 * pair.r_max
    rho2 = pts[:, 1] ** 2 + pts[:, 2] ** 2
    close = rho2 < guard**2
    if np.any(close):
        # only on-axis points can approach an image
        dx = np.abs(pts[close, 0][:, None] - P[None, :])
        if np.any(dx < guard):
            raise DomainError("evaluation point within 1e-12*r_max of an image charge")


def _evaluate(pair, sys1, sys2, constants, x, want_value=True, want_grad=True):
    pts, single = _as_points(x)
    P, W = _weights(sys1, sys2, constants)
    _check_domain(pair, pts, P)
    n = pts.shape[0]
    values = np.empty(n) if want_value else None
    grads = np.empty((n, 3)) if want_grad else None
    step = max(1, _CHUNK_ELEMS // max(P.size, 1))
    for lo in range(0, n, step):
        chunk = pts[lo : lo + step]
        dx = chunk[:, 0:1] - P[None, :]
        rho2 = (chunk[:, 1] ** 2 + chunk[:, 2] ** 2)[:, None]
        inv = 1.0 / np.sqrt(dx * dx + rho2)
        if want_value:
            values[lo : lo + step] = (inv @ W) / FOUR_PI
        if want_grad:
            inv3 = inv**3
            s = (inv3 @ W) / FOUR_PI
            grads[lo : lo + step, 0] = -((dx * inv3) @ W) / FOUR_PI
            grads[lo : lo + step, 1] = -chunk[:, 1] * s
            grads[lo : lo + step, 2] = -chunk[:, 2] * s
    if single:
        values = None if values is None else float(values[0])
        grads = None if grads is None else grads[0]
    return values, grads


def h_eval(pair: SpherePair, sys1: ImageChargeSystem, sys2: ImageChargeSystem, constants: SeriesConstants, x):
    """Value of h at one point (shape (3,)) or many (shape (..., 3), flattened)."""
    return _evaluate(pair, sys1, sys2, constants, x, want_grad=False)[0]


def grad_h(pair: SpherePair, sys1: ImageChargeSystem, sys2: ImageChargeSystem, constants: SeriesConstants, x):
    """Analytic gradient of the truncated series for h."""
    return _evaluate(pair, sys1, sys2, constants, x, want_value=False)[1]


def _truncation_error(pair, sys1, sys2, constants, pt) -> float:
    err = 0.0
    for system, coef in ((sys1, constants.Q2 / constants.M), (sys2, constants.Q1 / constants.M)):
        dist = min(np.linalg.norm(pt - np.array([f, 0.0, 0.0])) for f in system.fixed)
        err += abs(coef) * system.tail_bound / (FOUR_PI * dist)
    return err


def sample(pair, sys1, sys2, constants, x) -> FieldSample:
    x = np.asarray(x, dtype=float)
    value, grad = _evaluate(pair, sys1, sys2, constants, x)
    return FieldSample(
        x=x,
        value=value,
        gradient=grad,
        rho=float(math.hypot(x[1], x[2])),
        truncation_error=_truncation_error(pair, sys1, sys2, constants, x),
    )


def h_gap(pair: SpherePair, constants: SeriesConstants, sys1=None, sys2=None, rtol: float = 1e-3) -> float:
    """h on ball 1 minus h on ball 2.

    With image systems supplied, the closed form is compared with h evaluated
    at the top of ball 1 and the bottom of ball 2.
    """
    value = (constants.Q2 / pair.r1 + constants.Q1 / pair.r2) / (-FOUR_PI * constants.M)
    if sys1 is not None and sys2 is not None:
        top1 = pair.c1 + np.array([0.0, 0.0, pair.r1])
        bottom2 = pair.c2 - np.array([0.0, 0.0, pair.r2])
        direct = h_eval(pair, sys1, sys2, constants, top1) - h_eval(pair, sys1, sys2, constants, bottom2)
        if abs(direct - value) > rtol * abs(value):
            raise SignConsistencyError(f"h gap closed form {value!r} vs direct {direct!r}")
    return value


def _panel_rule(n_panels: int, nodes: int, ratio: float):
    """Nodes and weights in s = 1 - cos(theta) on [0, 2], graded toward s = 0."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    edges = np.concatenate([[0.0], 2.0 * ratio ** -np.arange(n_panels - 1, -1, -1, dtype=float)])
    s_nodes, s_weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        s_nodes.append(0.5 * (b - a) * x + 0.5 * (a + b))
        s_weights.append(0.5 * (b - a) * w)
    return np.concatenate(s_nodes), np.concatenate(s_weights)


def _panels_needed(pair: SpherePair, ball: int, spec: QuadratureSpec) -> int:
    f1, f2 = fixed_points(pair)
    rad = pair.radius(ball)
    depth = (f1 - pair.eps) if ball == 1 else (-pair.eps - f2)
    scale = max(depth, 1e-300) ** 2 / (2 * rad * rad)
    need = 1 + math.ceil(math.log(2.0 / (8.0 * scale)) / math.log(spec.ratio))
    return max(spec.n_panels, need)


def _flux_once(pair, sys1, sys2, constants, ball, spec: QuadratureSpec) -> float:
    n_panels = _panels_needed(pair, ball, spec)
    s, ws = _panel_rule(n_panels, spec.nodes, spec.ratio)
    cos_t = 1.0 - s
    sin_t = np.sqrt(np.clip(s * (2.0 - s), 0.0, None))
    phi = 2.0 * math.pi * np.arange(spec.n_azimuth) / spec.n_azimuth
    wphi = 2.0 * math.pi / spec.n_azimuth
    toward_gap = -1.0 if ball == 1 else 1.0
    normal = np.stack(
        [
            toward_gap * np.repeat(cos_t, phi.size),
            np.outer(sin_t, np.cos(phi)).ravel(),
            np.outer(sin_t, np.sin(phi)).ravel(),
        ],
        axis=1,
    )
    rad = pair.radius(ball)
    pts = pair.center(ball) + rad * normal
    g = grad_h(pair, sys1, sys2, constants, pts)
    integrand = np.einsum("ij,ij->i", g, normal).reshape(cos_t.size, phi.size)
    # d sigma = rad^2 d(cos theta) d phi = rad^2 ds dphi
    per_ring = integrand.sum(axis=1) * wphi
    return float(rad * rad * math.fsum(per_ring * ws))


def flux(pair, sys1, sys2, constants, ball: int, quad: QuadratureSpec | None = None) -> float:
    """Outward flux of grad h through the surface of one ball."""
    if ball not in (1, 2):
        raise DomainError(f"ball must be 1 or 2, got {ball!r}")
    quad = quad or QuadratureSpec()
    value = _flux_once(pair, sys1, sys2, constants, ball, quad)
    finer = _flux_once(pair, sys1, sys2, constants, ball, quad.refined())
    if abs(finer - value) > 1e-2:
        warnings.warn(
            f"flux quadrature unstable on ball {ball}: {value!r} vs refined {finer!r}",
            QuadratureWarning,
            stacklevel=2,
        )
    return value


def in_gap_region(pair: SpherePair, x) -> bool:
    """x outside both balls with rho(x) <= r1 / |log(eps/r1)|^2."""
    x = np.asarray(x, dtype=float)
    rho = math.hypot(x[1], x[2])
    delta = pair.eps / pair.r1
    return bool(pair.exterior(x)) and rho <= pair.r1 * abs(math.log(delta)) ** -2


def grad_h_asymptotic(pair: SpherePair, x) -> np.ndarray:
    """Leading-order gradient of h in the narrow gap; points along -x1."""
    if not in_gap_region(pair, x):
        raise RegionError("point outside the narrow gap region")
    rho = math.hypot(x[1], x[2])
    r1, r2, eps = pair.r1, pair.r2, pair.eps
    mag = (r1 + r2) / (FOUR_PI * r1 * r2 * abs(math.log(eps)))
    mag /= eps + 0.25 * (1.0 / r1 + 1.0 / r2) * rho**2
    return np.array([-mag, 0.0, 0.0])


def _fmt(v: float) -> str:
    return repr(float(v))


def write_h_grid_csv(samples, stream=None) -> str:
    buf = io.StringIO()
    buf.write("x1,x2,x3,h,gx1,gx2,gx3,rho\n")
    for smp in samples:
        cols = [*smp.x, smp.value, *smp.gradient, smp.rho]
        buf.write(",".join(_fmt(c) for c in cols) + "\n")
    text = buf.getvalue()
    if stream is not None:
        stream.write(text)
    return text
