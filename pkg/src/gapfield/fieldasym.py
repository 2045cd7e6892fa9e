"""Leading-order electric field in the gap and its image-charge counterpart.

``grad_u_main`` is the Lorentzian main term along n = (1, 0, 0); it omits the
direction correction eta, bounded by C/|log eps| with an unknown C, and the
bounded remainder grad g. ``grad_u_singular`` is c * grad h with c the exact
ratio of potential gaps, i.e. grad u up to that bounded remainder.
"""

from __future__ import annotations

import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .blowup import potential_gap_series, psi_factor
from .constants import SeriesConstants
from .errors import DomainError, RegionError
from .geometry import ImageChargeSystem, SpherePair
from .harmonic import HarmonicBackground
from .singular import grad_h, h_gap, image_setup

__all__ = [
    "AsymptoticField",
    "GridSpec",
    "region_ok",
    "peak_value",
    "grad_u_main",
    "grad_u_singular",
    "field_grid",
    "write_field_csv",
    "FIELD_COLUMNS",
]

N = np.array([1.0, 0.0, 0.0])
_BLOCK = 256
FIELD_COLUMNS = (
    "x1,x2,x3,rho,main_x1,main_x2,main_x3,sing_x1,sing_x2,sing_x3,region_ok"
)


@dataclass(frozen=True)
class AsymptoticField:
    x: np.ndarray
    rho: float
    main_term: np.ndarray
    singular_part: np.ndarray
    peak_axis_value: float
    region_ok: bool


@dataclass(frozen=True)
class GridSpec:
    """Cartesian grid; points are emitted row-major with x1 slowest."""

    x1: tuple = (0.0,)
    x2: tuple = (0.0,)
    x3: tuple = (0.0,)

    def __post_init__(self):
        for name in ("x1", "x2", "x3"):
            vals = tuple(float(v) for v in getattr(self, name))
            if not vals or not all(math.isfinite(v) for v in vals):
                raise DomainError(f"grid axis {name} must be a non-empty list of finite numbers")
            object.__setattr__(self, name, vals)

    @classmethod
    def gap_plane(cls, pair: SpherePair, n: int = 101, half_width: float | None = None) -> "GridSpec":
        """n x n grid in the (x2, x3) plane through the gap centre, x1 = 0."""
        if half_width is None:
            half_width = pair.r_max * abs(math.log(pair.eps / pair.r_max)) ** -2
        axis = tuple(np.linspace(-half_width, half_width, n))
        return cls(x1=(0.0,), x2=axis, x3=axis)

    def points(self) -> np.ndarray:
        g = np.meshgrid(self.x1, self.x2, self.x3, indexing="ij")
        return np.stack([a.ravel() for a in g], axis=1)

    @property
    def size(self) -> int:
        return len(self.x1) * len(self.x2) * len(self.x3)


def _rho(x) -> float:
    return float(math.hypot(x[1], x[2]))


def region_ok(pair: SpherePair, x) -> bool:
    """Exterior point inside the window rho <= r_max |log(eps/r_max)|^-2."""
    x = np.asarray(x, dtype=float)
    window = pair.r_max * abs(math.log(pair.eps / pair.r_max)) ** -2
    return bool(pair.exterior(x)) and _rho(x) <= window


def _lorentz(pair: SpherePair, rho: float) -> float:
    return pair.eps + 0.25 * (1.0 / pair.r1 + 1.0 / pair.r2) * rho * rho


def peak_value(pair: SpherePair, psi: float) -> float:
    return psi / (pair.eps * abs(math.log(pair.eps)))


def _psi(pair, H, psi):
    return psi_factor(pair, H).psi if psi is None else float(psi)


def grad_u_main(pair: SpherePair, H: HarmonicBackground, x, psi: float | None = None) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if not region_ok(pair, x):
        raise RegionError(f"point {x.tolist()} is outside the gap window")
    value = _psi(pair, H, psi) / (abs(math.log(pair.eps)) * _lorentz(pair, _rho(x)))
    return value * N


def _gap_ratio(pair, H, constants, sys1, sys2) -> float:
    return potential_gap_series(pair, H, constants, sys1, sys2) / h_gap(pair, constants)


def grad_u_singular(
    pair: SpherePair,
    H: HarmonicBackground,
    constants: SeriesConstants,
    sys1: ImageChargeSystem,
    sys2: ImageChargeSystem,
    x,
    ratio: float | None = None,
) -> np.ndarray:
    """(u gap / h gap) * grad h at x; several points may be passed as (n, 3)."""
    if ratio is None:
        ratio = _gap_ratio(pair, H, constants, sys1, sys2)
    return ratio * grad_h(pair, sys1, sys2, constants, x)


def _threads() -> int:
    raw = os.environ.get("GAPFIELD_THREADS", "")
    try:
        cap = int(raw) if raw else os.cpu_count() or 1
    except ValueError:
        cap = 1
    return max(1, cap)


def field_grid(pair: SpherePair, H: HarmonicBackground, spec: GridSpec, tail_tol: float = 1e-12, setup=None):
    """Rows of :class:`AsymptoticField` in grid order.

    Points outside the gap window get a zero main term and ``region_ok`` False
    rather than an error. Evaluation is split across threads; row order does
    not depend on scheduling.
    """
    sys1, sys2, constants = setup if setup is not None else image_setup(pair, tail_tol)
    psi = psi_factor(pair, H).psi
    ratio = _gap_ratio(pair, H, constants, sys1, sys2)
    pts = spec.points()
    if not np.all(pair.exterior(pts)):
        raise DomainError("grid points must lie outside both balls")

    # fixed block size keeps the arithmetic independent of the thread count
    blocks = [np.arange(lo, min(lo + _BLOCK, pts.shape[0])) for lo in range(0, pts.shape[0], _BLOCK)]
    n_jobs = min(_threads(), len(blocks))

    def work(idx):
        return grad_u_singular(pair, H, constants, sys1, sys2, pts[idx], ratio=ratio)

    if n_jobs == 1:
        sing = [work(b) for b in blocks]
    else:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            sing = list(pool.map(work, blocks))
    sing = np.concatenate(sing, axis=0)

    peak = peak_value(pair, psi)
    rows = []
    for x, s in zip(pts, sing):
        ok = region_ok(pair, x)
        main = grad_u_main(pair, H, x, psi) if ok else np.zeros(3)
        rows.append(AsymptoticField(x=x, rho=_rho(x), main_term=main, singular_part=s, peak_axis_value=peak, region_ok=ok))
    return rows


def _fmt(v) -> str:
    return repr(float(v))


def write_field_csv(rows, stream=None) -> str:
    buf = io.StringIO()
    buf.write(FIELD_COLUMNS + "\n")
    for row in rows:
        cols = [*row.x, row.rho, *row.main_term, *row.singular_part]
        buf.write(",".join(_fmt(c) for c in cols) + f",{int(row.region_ok)}\n")
    text = buf.getvalue()
    if stream is not None:
        stream.write(text)
    return text
