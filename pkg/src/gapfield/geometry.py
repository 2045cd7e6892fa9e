"""Sphere pair geometry, reflections and the image-charge sequences.

Both spheres sit on the x1-axis, ball 1 of radius ``r1`` centred at
``(r1 + eps, 0, 0)`` and ball 2 of radius ``r2`` centred at
``(-r2 - eps, 0, 0)``; the gap between them is ``2 * eps`` wide and its
midpoint is the origin. Every image point lies on the axis, so sequences
are stored as axial coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NonConvergenceError

__all__ = [
    "SpherePair",
    "ImageChargeSystem",
    "DiagnosticsBundle",
    "reflect",
    "fixed_points",
    "fixed_points_by_iteration",
    "build_images",
    "theta",
    "n_delta",
    "n0_delta",
    "n1_delta",
    "diagnostics",
]

MAX_IMAGES = 10**7
DEFAULT_TAIL = 1e-12


@dataclass(frozen=True)
class SpherePair:
    r1: float
    r2: float
    eps: float

    def __post_init__(self):
        for name in ("r1", "r2", "eps"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float, np.floating)) and math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be finite and positive, got {v!r}")
            object.__setattr__(self, name, float(v))
        if not self.eps < min(self.r1, self.r2) / 10:
            raise DomainError(
                f"eps={self.eps} is not small against the radii (need eps < min(r1, r2)/10)"
            )

    @property
    def r_max(self) -> float:
        return max(self.r1, self.r2)

    @property
    def r_min(self) -> float:
        return min(self.r1, self.r2)

    @property
    def r(self) -> float:
        """Radius ratio ``r_min / r_max``, in (0, 1]."""
        return self.r_min / self.r_max

    @property
    def delta(self) -> float:
        """Half-gap relative to the larger radius."""
        return self.eps / self.r_max

    @property
    def c1(self) -> np.ndarray:
        return np.array([self.r1 + self.eps, 0.0, 0.0])

    @property
    def c2(self) -> np.ndarray:
        return np.array([-self.r2 - self.eps, 0.0, 0.0])

    @property
    def swapped(self) -> bool:
        """True when ball 2 is the larger one (the pair is relabelled internally)."""
        return self.r2 > self.r1

    def normalized(self) -> "SpherePair":
        """Mirror image with the larger ball as ball 1 (identity if already so)."""
        if self.swapped:
            return SpherePair(self.r2, self.r1, self.eps)
        return self

    def center(self, ball: int) -> np.ndarray:
        return self.c1 if ball == 1 else self.c2

    def radius(self, ball: int) -> float:
        return self.r1 if ball == 1 else self.r2

    def axial_center(self, ball: int) -> float:
        return self.r1 + self.eps if ball == 1 else -self.r2 - self.eps

    def contains(self, x, ball: int, rtol: float = 1e-12) -> np.ndarray:
        """Strictly-inside test for one ball (boundary points are outside)."""
        x = np.asarray(x, dtype=float)
        rad = self.radius(ball)
        d = np.linalg.norm(x - self.center(ball), axis=-1)
        return d < rad * (1.0 - rtol)

    def exterior(self, x) -> np.ndarray:
        return ~(self.contains(x, 1) | self.contains(x, 2))


def reflect(center, radius: float, x) -> np.ndarray:
    """Inversion of ``x`` in the sphere of given centre and radius."""
    center = np.asarray(center, dtype=float)
    x = np.asarray(x, dtype=float)
    d = x - center
    d2 = float(np.dot(d, d))
    if d2 == 0.0:
        raise DomainError("cannot reflect the centre of the sphere")
    return center + radius**2 * d / d2


def _reflect_axial(c: float, rad: float, x: float) -> float:
    return c + rad * rad / (x - c)


def fixed_points(pair: SpherePair) -> tuple[float, float]:
    """Fixed points of R1 R2 (inside ball 1) and R2 R1 (inside ball 2).

    The two points are the limit points of the coaxial pencil spanned by the
    spheres, placed symmetrically about the radical plane. Every difference
    below is a sum of positive terms, so the result keeps full relative
    precision as eps -> 0.
    """
    r1, r2, eps = pair.r1, pair.r2, pair.eps
    d = r1 + r2 + 2 * eps
    # distance from the radical plane to the surface of ball 1
    gap1 = 2 * eps * (r2 + eps) / d
    half = math.sqrt(gap1 * (2 * r1 + gap1))
    x0 = eps - gap1
    p1, p2 = x0 + half, x0 - half
    c1, c2 = pair.axial_center(1), pair.axial_center(2)
    # one polishing sweep; a contraction cannot move an exact fixed point
    p1 = _reflect_axial(c1, r1, _reflect_axial(c2, r2, p1))
    p2 = _reflect_axial(c2, r2, p1)
    resid = abs(_reflect_axial(c1, r1, _reflect_axial(c2, r2, p1)) - p1)
    if not resid <= 1e-14 * pair.r_max:
        raise NonConvergenceError(f"fixed point residual {resid:.3e} exceeds 1e-14*r_max")
    return p1, p2


def fixed_points_by_iteration(pair: SpherePair, max_iter: int = 10**7) -> tuple[float, float]:
    """Fixed points by iterating R1 R2 from c1; slow near touching."""
    c1, c2 = pair.axial_center(1), pair.axial_center(2)
    x = c1
    for _ in range(max_iter):
        nxt = _reflect_axial(c1, pair.r1, _reflect_axial(c2, pair.r2, x))
        if abs(nxt - x) <= 1e-14 * pair.r_max:
            return nxt, _reflect_axial(c2, pair.r2, nxt)
        x = nxt
    raise NonConvergenceError("reflection iteration did not contract")


@dataclass(frozen=True)
class ImageChargeSystem:
    """Truncated image sequence of one family.

    ``points[j]`` is the axial coordinate of p_{i,j}; ``charges[j]`` is
    q_{i,j}; ``gaps[j]`` is ``points[j]`` minus the fixed point the
    subsequence converges to, propagated through the reflections so it keeps
    relative precision long after ``points`` has stopped changing.
    """

    family: int
    points: np.ndarray
    charges: np.ndarray
    multipliers: np.ndarray
    gaps: np.ndarray
    truncation_K: int
    tail_bound: float
    ratio_bound: float
    fixed: tuple[float, float] = field(default=(0.0, 0.0))

    def __post_init__(self):
        for name in ("points", "charges", "multipliers", "gaps"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def signs(self) -> np.ndarray:
        return np.where(np.arange(self.points.size) % 2 == 0, 1.0, -1.0)

    @property
    def positions(self) -> np.ndarray:
        """Image points as an (K+1, 3) array."""
        out = np.zeros((self.points.size, 3))
        out[:, 0] = self.points
        return out

    def perturbed(self, rel: float) -> "ImageChargeSystem":
        """Copy with odd-index charges scaled by ``1 + rel`` and multipliers kept.

        Used for fault injection: the charges no longer match the products of
        their multipliers.
        """
        q = self.charges.copy()
        q[1::2] *= 1.0 + rel
        return ImageChargeSystem(
            self.family, self.points, q, self.multipliers, self.gaps,
            self.truncation_K, self.tail_bound, self.ratio_bound, self.fixed,
        )

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "truncation_K": self.truncation_K,
            "tail_bound": self.tail_bound,
            "points": self.points.tolist(),
            "charges": self.charges.tolist(),
        }


def _limit_ratio(pair: SpherePair, p1: float, p2: float) -> float:
    """Upper bound on q_{i,j+2}/q_{i,j}: both multipliers at their limits."""
    mu_into_2 = pair.r2 / (pair.r2 + pair.eps + p1)
    mu_into_1 = pair.r1 / (pair.r1 + pair.eps - p2)
    return mu_into_1 * mu_into_2


def build_images(
    pair: SpherePair,
    family: int,
    K: int | None = None,
    tail_tol: float = DEFAULT_TAIL,
    max_terms: int = MAX_IMAGES,
) -> ImageChargeSystem:
    """Image points and charges of one family.

    Family 1 starts from the centre of ball 1 and reflects alternately in
    ball 2 and ball 1; family 2 starts from ball 2. With ``K`` given, indices
    ``0..K`` are built; otherwise the sequence grows until the bound on the
    omitted charge mass drops below ``tail_tol``.
    """
    if family not in (1, 2):
        raise DomainError(f"family must be 1 or 2, got {family!r}")
    if K is not None and not 1 <= K <= max_terms:
        raise DomainError(f"K must lie in [1, {max_terms}], got {K}")
    p1, p2 = fixed_points(pair)
    rho = _limit_ratio(pair, p1, p2)
    if family == 1:
        cs = (pair.axial_center(1), pair.axial_center(2))
        rads = (pair.r1, pair.r2)
        fix = (p1, p2)
    else:
        cs = (pair.axial_center(2), pair.axial_center(1))
        rads = (pair.r2, pair.r1)
        fix = (p2, p1)

    points = [cs[0]]
    charges = [1.0]
    mults = [1.0]
    gaps = [cs[0] - fix[0]]
    limit = max_terms if K is None else K
    j = 0
    tail = math.inf
    while j < limit:
        j += 1
        c, rad = cs[j % 2], rads[j % 2]
        prev = points[-1]
        dist = abs(c - prev)
        mu = rad / dist
        points.append(c + rad * rad / (prev - c))
        mults.append(mu)
        charges.append(charges[-1] * mu)
        # R(x) - R(y) = -rad^2 (x - y) / ((x - c)(y - c))
        gaps.append(-rad * rad * gaps[-1] / ((prev - c) * (fix[(j - 1) % 2] - c)))
        if j % 2 == 1:
            tail = charges[-1] * (1.0 + rho) / (1.0 - rho)
            if K is None and tail <= tail_tol:
                break
    else:
        if K is None:
            raise NonConvergenceError(f"image tail above {tail_tol} after {max_terms} terms")
    if K is not None:
        tail = charges[-1] * (1.0 + rho) / (1.0 - rho)
    return ImageChargeSystem(
        family=family,
        points=np.array(points),
        charges=np.array(charges),
        multipliers=np.array(mults),
        gaps=np.array(gaps),
        truncation_K=j,
        tail_bound=tail,
        ratio_bound=rho,
        fixed=fix,
    )


def theta(family: int, j: int, r: float) -> float:
    """Leading-order (delta-free) charge of index j; positions scale by the radius.

    Family 1 positions are ``(-1)^j * theta * r1``; family 2 positions are
    ``-(-1)^j * theta * r2``.
    """
    k = j // 2
    if family == 1:
        if j % 2 == 0:
            return r / (k * (r + 1) + r)
        return r / ((k + 1) * (r + 1))
    if j % 2 == 0:
        return 1.0 / (k * (r + 1) + 1)
    return 1.0 / ((k + 1) * (r + 1))


def n_delta(r: float, delta: float) -> int:
    """Dominant-index count with the unspecified constant set to one."""
    return math.ceil(math.log(2) / 8 * math.sqrt(r / (r + 1)) / math.sqrt(delta))


def n0_delta(delta: float) -> int:
    return math.floor(abs(math.log(delta)))


def n1_delta(delta: float) -> int:
    return math.floor(1.0 / (delta * abs(math.log(delta))))


@dataclass(frozen=True)
class DiagnosticsBundle:
    """Diagnostics in the frame where ball 1 is the larger ball.

    Positions are normalised by the larger radius. ``theta_main_terms`` maps
    ``(family, j)`` to the leading-order charge for ``j < 2 N(delta)``.
    """

    p_fixed_1: float
    p_fixed_2: float
    r: float
    delta: float
    N_delta: int
    N0_delta: int
    N1_delta: int
    theta_main_terms: dict
    A: tuple[float, float]
    B: tuple[float, float]
    theta_deviation: float
    gap_lower_slack: float
    gap_decay: float | None
    gap_decay_bound: float


def diagnostics(pair: SpherePair, system: ImageChargeSystem) -> DiagnosticsBundle:
    """Convergence diagnostics of a family-1 sequence in the normalised frame.

    If ball 2 is the larger one, the system passed in must be family 2 of the
    user pair (the mirror of family 1 in the normalised frame); it is mapped
    to that frame here.
    """
    npair = pair.normalized()
    r, delta = npair.r, npair.delta
    rscale = npair.r1
    frame_family = system.family if not pair.swapped else 3 - system.family
    if frame_family != 1:
        raise DomainError("diagnostics are defined for the family seeded in the larger ball")
    sign = -1.0 if pair.swapped else 1.0
    P = sign * system.points / rscale
    gaps = sign * system.gaps / rscale
    p1, p2 = fixed_points(npair)
    P1 = p1 / rscale

    N, N0, N1 = n_delta(r, delta), n0_delta(delta), n1_delta(delta)
    theta_map = {}
    for fam in (1, 2):
        for j in range(2 * N):
            theta_map[(fam, j)] = theta(fam, j, r)

    scale = math.sqrt(r * delta / (r + 1))
    kmax = min(N, (P.size - 1) // 2)
    dev = 0.0
    for k in range(kmax + 1):
        dev = max(dev, abs(P[2 * k] - theta(1, 2 * k, r)))
        if 2 * k + 1 < P.size:
            dev = max(dev, abs(P[2 * k + 1] + theta(1, 2 * k + 1, r)))

    A_hat = 1 + 4 * math.sqrt((r + 1) * delta / r)
    B_lead = 0.25 * math.sqrt((r + 1) / r) / math.sqrt(delta)
    even_gaps = gaps[0::2]
    kk = np.arange(min(even_gaps.size, N1 + 1))
    lower = 2 * scale * A_hat ** (-kk.astype(float))
    with np.errstate(divide="ignore"):
        slack = float(np.max(lower / even_gaps[: kk.size]))
    decay = float(even_gaps[N1]) if even_gaps.size > N1 else None
    bound = math.exp(-math.sqrt((r + 1) / r) / (math.sqrt(delta) * abs(math.log(delta))))
    return DiagnosticsBundle(
        p_fixed_1=P1,
        p_fixed_2=p2 / rscale,
        r=r,
        delta=delta,
        N_delta=N,
        N0_delta=N0,
        N1_delta=N1,
        theta_main_terms=theta_map,
        A=(A_hat, A_hat),
        B=(B_lead, -B_lead),
        theta_deviation=dev / scale,
        gap_lower_slack=max(1.0, slack),
        gap_decay=decay,
        gap_decay_bound=bound,
    )
