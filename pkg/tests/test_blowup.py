import io
import math

import numpy as np
import pytest

from gapfield.blowup import (
    Radii,
    average_field_compare,
    blowup,
    blowup_curve,
    c_min_max,
    closed_form_for,
    potential_gap_series,
    psi_cubic_closed,
    psi_factor,
    psi_linear_closed,
    write_blowup_csv,
)
from gapfield.errors import DomainError, NotHarmonicError
from gapfield.geometry import SpherePair
from gapfield.harmonic import HarmonicBackground, parse_polynomial

X1 = parse_polynomial("x1")
CUBIC = parse_polynomial("x1^3 - 3*x1*x2^2")
EVEN = parse_polynomial("x1^2 - 0.5*x2^2 - 0.5*x3^2")
RADII = [0.1, 0.25, 0.5, 1.0, 2.0, 4.0]


def literal_c(r1, r2, H, K=400_000):
    """Both background series summed term by term, H(0) removed, crude tail."""
    s = r1 + r2
    R = r1 * r2 / s
    amin, amax = min(r1, r2) / s, max(r1, r2) / s
    k = np.arange(K, dtype=float)
    f = lambda t: H.axial(t) - H.value_at_origin  # noqa: E731
    cmin = np.sum(f(R / (k + amin)) / (k + amin) - f(-R / (k + 1)) / (k + 1))
    cmax = np.sum(f(R / (k + 1)) / (k + 1) - f(-R / (k + amax)) / (k + amax))
    return cmin, cmax


@pytest.mark.parametrize("r", RADII)
def test_linear_closed_form(r):
    assert psi_factor(Radii(1.0, r), X1).psi == pytest.approx(psi_linear_closed(r), rel=1e-12)


@pytest.mark.parametrize("r", RADII)
def test_cubic_closed_form(r):
    assert psi_factor(Radii(1.0, r), CUBIC).psi == pytest.approx(psi_cubic_closed(r), rel=1e-12)


@pytest.mark.parametrize("text", ["x1", "x1^3 - 3*x1*x2^2", "x1^2 - x2^2 + 3", "x1^4 - 6*x1^2*x3^2 + x3^4 + x1"])
@pytest.mark.parametrize("radii", [(1.0, 1.0), (1.0, 0.3), (0.6, 1.0)])
def test_series_vs_literal_sums(text, radii):
    H = parse_polynomial(text)
    cmin, cmax, err, _ = c_min_max(Radii(*radii), H)
    lmin, lmax = literal_c(*radii, H)
    # the truncated literal sums miss O(1/K) for odd backgrounds
    assert cmin == pytest.approx(lmin, abs=2e-5)
    assert cmax == pytest.approx(lmax, abs=2e-5)
    assert err < 1e-9


def test_equal_radii_linear_value():
    # the equal-radii reduction for x1 is 2 * sum 1/n^2
    val = psi_factor(Radii(1.0, 1.0), X1).psi
    assert val == pytest.approx(math.pi**2 / 3, rel=1e-13)
    assert psi_linear_closed(1.0) == pytest.approx(math.pi**2 / 3, rel=1e-13)


@pytest.mark.parametrize("text", ["x1", "x1^3 - 3*x1*x2^2", "x1^2 - x3^2", "x1^5 - 10*x1^3*x2^2 + 5*x1*x2^4"])
def test_equal_radii_is_mean_of_series(text):
    H = parse_polynomial(text)
    res = psi_factor(Radii(1.0, 1.0), H)
    assert res.psi == pytest.approx(0.5 * (res.c_min + res.c_max), rel=1e-15, abs=1e-15)


@pytest.mark.parametrize("text", ["x2", "3*x3", "x2*x3", "x1*x2", "x2^2 - x3^2", "x1*x2*x3"])
def test_off_axis_backgrounds_give_zero(text):
    assert psi_factor(Radii(1.0, 0.5), parse_polynomial(text)).psi == 0.0


def test_only_axis_trace_matters():
    a = psi_factor(Radii(1.0, 0.4), parse_polynomial("x1^2 - 0.5*x2^2 - 0.5*x3^2 + x1 + 7*x2*x3")).psi
    b = psi_factor(Radii(1.0, 0.4), parse_polynomial("x1^2 - x2^2 + x1")).psi
    assert a == b


def test_constant_shift_is_ignored():
    a = psi_factor(Radii(1.0, 0.4), parse_polynomial("x1 + 5")).psi
    assert a == psi_factor(Radii(1.0, 0.4), X1).psi


@pytest.mark.parametrize("H", [X1, CUBIC, EVEN, parse_polynomial("x1^2 - x2^2 + x1")])
@pytest.mark.parametrize("r", [0.3, 0.7, 2.0])
def test_relabelling_the_balls_reverses_sign(H, r):
    # swapping the labels and mirroring x1 exchanges the two potentials
    a = psi_factor(Radii(1.0, r), H).psi
    b = psi_factor(Radii(r, 1.0), H.mirrored()).psi
    assert a == pytest.approx(-b, rel=1e-13, abs=1e-15)


def test_odd_background_unaffected_by_normalisation():
    # for backgrounds odd in x1 the literal combination is already frame-free
    from gapfield.blowup import _combine

    res = psi_factor(Radii(0.5, 1.0), CUBIC)
    assert res.psi == pytest.approx(_combine(Radii(0.5, 1.0), res.c_min, res.c_max), rel=1e-13)


def test_linear_in_background():
    a = psi_factor(Radii(1.0, 0.5), parse_polynomial("2*x1 + 3*x1^3 - 9*x1*x2^2")).psi
    b = 2 * psi_linear_closed(0.5) + 3 * psi_cubic_closed(0.5)
    assert a == pytest.approx(b, rel=1e-12)
    assert psi_linear_closed(0.7, 2.0) == 2 * psi_linear_closed(0.7, 1.0)


def test_closed_forms_positive_and_increasing():
    rs = np.linspace(0.05, 5, 100)
    lin = [psi_linear_closed(r) for r in rs]
    cub = [psi_cubic_closed(r) for r in rs]
    assert min(lin) > 0 and min(cub) > 0
    assert np.all(np.diff(lin) > 0) and np.all(np.diff(cub) > 0)


def test_requires_harmonic():
    with pytest.raises(NotHarmonicError):
        psi_factor(Radii(1.0, 1.0), parse_polynomial("x1^2"))
    with pytest.raises(DomainError):
        psi_factor(Radii(1.0, 1.0), X1, tol=1e-13)


@pytest.mark.parametrize("H", [X1, CUBIC])
@pytest.mark.parametrize("r2", [1.0, 0.5])
def test_gap_series_approaches_asymptotic(H, r2):
    dev = []
    for eps in (1e-3, 1e-4, 1e-5, 1e-6):
        res = blowup(SpherePair(1.0, r2, eps), H)
        dev.append(abs(res.gap_series / res.gap_asymptotic - 1))
    assert all(b < a for a, b in zip(dev, dev[1:]))


def test_gap_series_for_relabelled_even_background():
    # ball 2 larger: the exact gap tracks the normalised factor
    pair_vals = []
    for eps in (1e-3, 1e-5):
        res = blowup(SpherePair(0.5, 1.0, eps), EVEN)
        pair_vals.append(res.gap_series * abs(math.log(eps)) / 2)
    psi_val = psi_factor(Radii(0.5, 1.0), EVEN).psi
    assert abs(pair_vals[1] - psi_val) < abs(pair_vals[0] - psi_val)
    assert np.sign(pair_vals[1]) == np.sign(psi_val)


def test_gap_series_symmetric_reduction(setup):
    pair, sys1, sys2, c = setup(1.0, 1.0, 1e-4)
    gap = potential_gap_series(pair, CUBIC, c, sys1, sys2)
    half = math.fsum(sys1.signs * sys1.charges * CUBIC.axial(sys1.points))
    assert gap == pytest.approx(2 * c.Q1 / c.M * half, rel=1e-10)


def test_gap_series_vanishes_off_axis(setup):
    pair, sys1, sys2, c = setup(1.0, 0.5, 1e-4)
    assert potential_gap_series(pair, parse_polynomial("x2 + x2*x3"), c, sys1, sys2) == 0.0


def test_average_field_formulas():
    dev = []
    for eps in (1e-3, 1e-4, 1e-5, 1e-6, 1e-7):
        new, old = average_field_compare(SpherePair(1.0, 0.5, eps), 1.0)
        assert new > 0 and old > 0
        dev.append(abs(new / old - 1))
        assert dev[-1] <= 5 / abs(math.log(eps))
    assert all(b < a for a, b in zip(dev, dev[1:]))
    n2, o2 = average_field_compare(SpherePair(1.0, 0.5, 1e-4), 2.0)
    n1, o1 = average_field_compare(SpherePair(1.0, 0.5, 1e-4), 1.0)
    assert n2 == pytest.approx(2 * n1) and o2 == pytest.approx(2 * o1)


def test_closed_form_detection():
    assert closed_form_for(parse_polynomial("2.5*x1"))(1.0) == pytest.approx(2.5 * math.pi**2 / 3)
    assert closed_form_for(parse_polynomial("2*x1^3 - 6*x1*x2^2"))(0.5) == pytest.approx(2 * psi_cubic_closed(0.5))
    assert closed_form_for(parse_polynomial("x1^3 - 2*x1*x2^2 - x1*x3^2")) is None
    assert closed_form_for(EVEN) is None


def test_curve_and_csv():
    rows = blowup_curve(X1, [0.5, 1.0, 2.0])
    assert [r for r, *_ in rows] == [0.5, 1.0, 2.0]
    for r, s, c in rows:
        assert s == pytest.approx(c, rel=1e-12)
    buf = io.StringIO()
    text = write_blowup_csv(rows, X1, buf)
    assert buf.getvalue() == text
    lines = text.split("\n")
    assert lines[0].startswith("# H=") and "E0=1.0" in lines[0]
    assert lines[1] == "r,psi_series,psi_closed"
    assert len(lines) == 6 and lines[-1] == ""
    with pytest.raises(DomainError):
        blowup_curve(X1, [11.0])


def test_curve_without_closed_form():
    text = write_blowup_csv(blowup_curve(EVEN, [1.0]), EVEN)
    assert text.splitlines()[-1].endswith(",") and "E0=NA" in text
