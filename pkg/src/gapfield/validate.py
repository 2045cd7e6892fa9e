"""Named invariant checks with measured-vs-required reporting.

Each check returns a :class:`Check`; ``run_checks`` collects them. Quick mode
keeps every gap width at eps >= 1e-4 so the whole run stays well under 30 s.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .blowup import average_field_compare, blowup, psi_cubic_closed, psi_factor, psi_linear_closed, Radii
from .constants import m_asymptotic, m_from_systems, q_closed, q_from_systems
from .errors import DecompositionMismatchError, GapfieldError
from .fieldasym import grad_u_main, grad_u_singular
from .geometry import SpherePair, build_images, fixed_points, fixed_points_by_iteration
from .harmonic import HarmonicBackground
from .singular import flux, grad_h, grad_h_asymptotic, h_eval, h_gap, image_setup
from .specfun import polygamma, psi

__all__ = ["Check", "run_checks", "CHECKS"]

X1 = HarmonicBackground.linear(1)
X2 = HarmonicBackground.linear(1, axis=2)
CUBIC = HarmonicBackground(((1, 3, 0, 0), (-3, 1, 2, 0)))


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    measured: object
    required: str

    def to_dict(self) -> dict:
        return asdict(self)


def _decreasing(seq) -> bool:
    return all(b < a for a, b in zip(seq, seq[1:]))


def _eps_list(quick: bool, full, short):
    return short if quick else full


def check_special_values(ctx) -> Check:
    errs = [
        abs(psi(0.5) + 2 * math.log(2)),
        abs(polygamma(1, 1.0) - math.pi**2 / 6),
        abs(polygamma(1, 0.5) - math.pi**2 / 2),
    ]
    return Check("specfun.special_values", max(errs) <= 1e-12, errs, "all <= 1e-12")


def check_fixed_points(ctx) -> Check:
    pair = SpherePair(1.0, 0.5, 1e-2)
    a = fixed_points(pair)
    b = fixed_points_by_iteration(pair)
    err = max(abs(a[0] - b[0]), abs(a[1] - b[1]))
    return Check("geometry.fixed_points", err <= 1e-10, err, "closed form vs iteration <= 1e-10")


def check_q_series(ctx) -> Check:
    deltas = _eps_list(ctx["quick"], (1e-4, 1e-5, 1e-6), (1e-2, 1e-3, 1e-4))
    worst = []
    ok = True
    for r in (0.25, 0.5, 1.0):
        res = []
        for d in deltas:
            pair = SpherePair(1.0, r, d)
            qs = q_from_systems(build_images(pair, 1, tail_tol=1e-9), build_images(pair, 2, tail_tol=1e-9))
            qc = q_closed(pair)
            res.append(max(abs(s - c) / c for s, c in zip(qs, qc)))
        ok &= _decreasing(res) and res[-1] <= 1e-3
        worst.append(res)
    return Check("constants.q_series_trend", ok, worst, "relative residual decreasing in delta, last <= 1e-3")


def check_m_decomposition(ctx) -> Check:
    pair = SpherePair(1.0, 0.5, 1e-4)
    sys1, sys2 = build_images(pair, 1), build_images(pair, 2)
    rel = ctx.get("perturb_q")
    if rel:
        sys1 = sys1.perturbed(rel)
    try:
        m_from_systems(sys1, sys2, rtol=1e-9)
    except DecompositionMismatchError as exc:
        return Check("constants.m_decomposition", False, str(exc), "decompositions agree to 1e-9")
    return Check("constants.m_decomposition", True, "agree", "decompositions agree to 1e-9")


def check_m_ratio(ctx) -> Check:
    epss = _eps_list(ctx["quick"], (1e-4, 1e-5, 1e-6), (1e-2, 1e-3, 1e-4))
    dev = []
    ok = True
    for r in (0.5, 1.0):
        d = []
        for eps in epss:
            pair = SpherePair(1.0, r, eps)
            sys1, sys2 = build_images(pair, 1), build_images(pair, 2)
            ratio = m_from_systems(sys1, sys2) / m_asymptotic(pair)
            band = 5 / abs(math.log(eps)) * (r + 1) / r
            ok &= abs(ratio - 1) <= band
            d.append(abs(ratio - 1))
        ok &= _decreasing(d)
        dev.append(d)
    return Check("constants.m_asymptotic_band", ok, dev, "|ratio-1| within 5(r+1)/(r|log eps|), decreasing")


def check_h_boundary(ctx) -> Check:
    rng = np.random.default_rng(ctx["seed"])
    out = []
    ok = True
    for r2 in (1.0, 0.5):
        pair = SpherePair(1.0, r2, 1e-3)
        sys1, sys2, c = image_setup(pair)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            f1 = flux(pair, sys1, sys2, c, 1)
            f2 = flux(pair, sys1, sys2, c, 2)
        gap = h_gap(pair, c, sys1, sys2)
        v = rng.normal(size=(64, 3))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        spread = max(
            float(np.ptp(h_eval(pair, sys1, sys2, c, pair.center(b) + pair.radius(b) * v))) for b in (1, 2)
        )
        ok &= abs(f1 - 1) <= 1e-3 and abs(f2 + 1) <= 1e-3 and spread <= 1e-3 * abs(gap)
        out.append({"r2": r2, "flux1": f1, "flux2": f2, "spread_over_gap": spread / abs(gap)})
    return Check("singular.flux_and_boundary", ok, out, "flux +-1 within 1e-3; boundary spread <= 1e-3 |h_gap|")


def check_grad_h_trend(ctx) -> Check:
    epss = _eps_list(ctx["quick"], (1e-2, 1e-3, 1e-4, 1e-5), (1e-2, 1e-3, 1e-4))
    dev = []
    ok = True
    for r in (0.5, 1.0):
        d = []
        for eps in epss:
            pair = SpherePair(1.0, r, eps)
            sys1, sys2, c = image_setup(pair)
            g = grad_h(pair, sys1, sys2, c, np.zeros(3))
            a = grad_h_asymptotic(pair, np.zeros(3))
            d.append(float(np.linalg.norm(g - a) / np.linalg.norm(a)))
        ok &= _decreasing(d) and d[-1] <= 0.5
        dev.append(d)
    return Check("singular.grad_h_asymptotic_trend", ok, dev, "relative deviation decreasing, last <= 0.5")


def check_psi_closed(ctx) -> Check:
    worst = 0.0
    for r in (0.1, 0.25, 0.5, 1.0, 2.0, 4.0):
        lin = psi_factor(Radii(1.0, r), X1).psi
        cub = psi_factor(Radii(1.0, r), CUBIC).psi
        worst = max(worst, abs(lin / psi_linear_closed(r) - 1), abs(cub / psi_cubic_closed(r) - 1))
    zero = psi_factor(Radii(1.0, 0.5), X2).psi
    return Check(
        "blowup.closed_forms", worst <= 1e-8 and zero == 0.0, {"max_rel": worst, "psi_x2": zero},
        "rel <= 1e-8 and psi(x2) == 0",
    )


def check_psi_axial(ctx) -> Check:
    H = HarmonicBackground.parse("x1^2 - 0.5*x2^2 - 0.5*x3^2 + x1 + 3*x1*x2*x3 + 2*x2")
    full = psi_factor(Radii(1.0, 0.4), H).psi
    # same restriction to the x1-axis, different off-axis terms
    same_axis = HarmonicBackground.parse("x1^2 - 0.5*x2^2 - 0.5*x3^2 + x1")
    axial = psi_factor(Radii(1.0, 0.4), same_axis).psi
    # relabelling the balls reverses the potential gap
    swap = psi_factor(Radii(0.4, 1.0), H.mirrored()).psi
    err = max(abs(full - axial), abs(full + swap))
    return Check("blowup.axial_and_relabel", err <= 1e-12 * max(1.0, abs(full)), err, "<= 1e-12")


def check_gap_trend(ctx) -> Check:
    epss = _eps_list(ctx["quick"], (1e-3, 1e-4, 1e-5, 1e-6), (1e-2, 1e-3, 1e-4))
    dev = []
    ok = True
    for r2 in (1.0, 0.5):
        d = []
        for eps in epss:
            res = blowup(SpherePair(1.0, r2, eps), X1)
            d.append(abs(res.gap_series / res.gap_asymptotic - 1))
        ok &= _decreasing(d)
        dev.append(d)
    return Check("blowup.potential_gap_trend", ok, dev, "|gap*|log eps|/(2 psi) - 1| decreasing")


def check_average_field(ctx) -> Check:
    epss = _eps_list(ctx["quick"], (1e-3, 1e-4, 1e-5, 1e-6), (1e-2, 1e-3, 1e-4))
    dev = []
    ok = True
    for eps in epss:
        new, old = average_field_compare(SpherePair(1.0, 0.5, eps))
        d = abs(new / old - 1)
        ok &= d <= 5 / abs(math.log(eps)) and new > 0 and old > 0
        dev.append(d)
    ok &= _decreasing(dev)
    return Check("blowup.average_field_ratio", ok, dev, "|ratio-1| <= 5/|log eps|, decreasing")


def check_field_trend(ctx) -> Check:
    epss = _eps_list(ctx["quick"], (1e-2, 1e-3, 1e-4, 1e-5), (1e-2, 1e-3, 1e-4))
    dev = []
    ok = True
    x = np.zeros(3)
    for r2 in (1.0, 0.5):
        d = []
        for eps in epss:
            pair = SpherePair(1.0, r2, eps)
            sys1, sys2, c = image_setup(pair)
            main = grad_u_main(pair, X1, x)
            sing = grad_u_singular(pair, X1, c, sys1, sys2, x)
            d.append(float(np.linalg.norm(sing - main) / np.linalg.norm(main)))
        ok &= _decreasing(d)
        dev.append(d)
    return Check("fieldasym.singular_vs_main_trend", ok, dev, "relative difference decreasing")


CHECKS = (
    check_special_values,
    check_fixed_points,
    check_q_series,
    check_m_decomposition,
    check_m_ratio,
    check_h_boundary,
    check_grad_h_trend,
    check_psi_closed,
    check_psi_axial,
    check_gap_trend,
    check_average_field,
    check_field_trend,
)


def run_checks(quick: bool = False, perturb_q: float | None = None, seed: int = 0) -> list[Check]:
    ctx = {"quick": quick, "perturb_q": perturb_q, "seed": seed}
    results = []
    for fn in CHECKS:
        name = fn.__name__.removeprefix("check_")
        try:
            results.append(fn(ctx))
        except GapfieldError as exc:
            results.append(Check(name, False, f"{type(exc).__name__}: {exc}", "no error"))
    return results
