import csv
import io
import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st

from pantslab.errors import AdmissibilityError, DomainError
from pantslab.foliation import (
    PantsEnergy,
    RectanglePatch,
    TrapezoidPatch,
    asymptotic_terms,
    cantor_energy_series,
    cantor_length,
    pants_energy,
    rectangle_energy,
    trapezoid_energy,
    trapezoid_energy_bound,
    trapezoid_gradient,
    trapezoid_gradient_sq_sup,
    trapezoid_leaf_value,
)
from pantslab.hyptrig import CuffLengths, hexagon_geometry


@st.composite
def patches(draw):
    a = draw(st.floats(min_value=0.01, max_value=10.0))
    C = draw(st.floats(min_value=1.0, max_value=20.0))
    b = a * draw(st.floats(min_value=1.0, max_value=C))
    h = C * b * draw(st.floats(min_value=1.0, max_value=50.0))
    return TrapezoidPatch(a, b, h, C)


# --- leaf function -----------------------------------------------------------

def test_leaf_values():
    p = TrapezoidPatch(1.0, 2.0, 4.0)
    assert trapezoid_leaf_value(p, 4.0, 1.0) == 0.5
    assert trapezoid_leaf_value(p, 0.0, 0.7) == 0.7
    q = TrapezoidPatch(0.5, 0.5, 3.0)
    assert trapezoid_leaf_value(q, 2.2, 0.3) == pytest.approx(0.3, rel=1e-15)
    with pytest.raises(DomainError):
        trapezoid_leaf_value(p, 2.0, 1.6)
    with pytest.raises(DomainError):
        trapezoid_leaf_value(p, 4.5, 0.1)


def test_patch_hypotheses():
    with pytest.raises(DomainError):
        TrapezoidPatch(2.0, 1.0, 10.0)
    with pytest.raises(DomainError):
        TrapezoidPatch(1.0, 2.0, 3.0)  # h < C b with C = 2
    with pytest.raises(DomainError):
        TrapezoidPatch(1.0, 3.0, 100.0, C=2.0)


@given(patches(), st.floats(0, 1), st.floats(0, 1))
def test_leaves_are_straight_segments(p, s, w):
    # the point at fraction w along the leaf joining (0, w a) and (h, w b) has value w a
    x = s * p.h
    y = w * p.upper(x)
    assert trapezoid_leaf_value(p, x, y) == pytest.approx(w * p.a, rel=1e-12, abs=1e-15)


# --- gradient bound ----------------------------------------------------------

def test_gradient_bound_values():
    assert trapezoid_gradient_sq_sup(TrapezoidPatch(1, 1, 1, C=1)) == 1.0
    assert trapezoid_gradient_sq_sup(TrapezoidPatch(1, 2, 4, C=2)) == 1.25
    # M1(C) = 2 - 2/C + 1/C^2, so the gap to the limit 2 is about 2/C
    big = TrapezoidPatch(1, 1, 1e6, C=1e6)
    assert 2.0 - trapezoid_gradient_sq_sup(big) == pytest.approx(2e-6 - 1e-12, rel=1e-9)
    huge = TrapezoidPatch(1, 1, 1e7, C=1e7)
    assert trapezoid_gradient_sq_sup(huge) == pytest.approx(2.0, abs=1e-6)


@given(patches())
def test_sampled_gradient_below_bound(p):
    xs = np.linspace(0.0, p.h, 200)
    X, F = np.meshgrid(xs, np.linspace(0.0, 1.0, 200), indexing="ij")
    Y = F * p.upper(X)
    gx, gy = trapezoid_gradient(p, X, Y)
    assert (gx**2 + gy**2).max() <= trapezoid_gradient_sq_sup(p) + 1e-12


# --- energies ------------------------------------------------------------------

def test_trapezoid_energy_symbolic_oracle():
    x, y = sp.symbols("x y", positive=True)
    a, b, h = sp.Integer(1), sp.Integer(2), sp.Integer(4)
    g = a + (b - a) * x / h
    v = a * y / g
    grad2 = sp.diff(v, x) ** 2 + sp.diff(v, y) ** 2
    exact = sp.simplify(sp.integrate(sp.integrate(grad2, (y, 0, g)), (x, 0, h)))
    assert sp.simplify(exact - sp.Rational(49, 12) * sp.log(2)) == 0
    p = TrapezoidPatch(1.0, 2.0, 4.0)
    assert trapezoid_energy(p) == pytest.approx(float(exact), rel=1e-14)
    assert trapezoid_energy(p) == pytest.approx(2.830351, abs=5e-7)
    assert trapezoid_energy(p) <= 10.0


def test_degenerate_trapezoid_is_rectangle():
    assert trapezoid_energy(TrapezoidPatch(1.0, 1.0, 4.0)) == 4.0


@given(patches())
def test_quadrature_matches_closed_form(p):
    closed = trapezoid_energy(p)
    assert trapezoid_energy(p, method="quadrature") == pytest.approx(closed, rel=1e-9)
    assert closed <= trapezoid_energy_bound(p) * (1 + 1e-12)


@given(st.floats(0.01, 10.0), st.floats(1.0, 50.0), st.floats(min_value=1e-12, max_value=1e-3))
def test_closed_form_continuous_at_equal_bases(a, stretch, eps):
    b = a * (1 + eps)
    h = b * (1 + eps) * stretch
    k2 = ((b - a) / h) ** 2
    e = trapezoid_energy(TrapezoidPatch(a, b, h, 1 + eps))
    # ln(b/a)/(b-a) lies between 1/b and 1/a
    assert a * a * h / b * (1 - 1e-13) <= e <= a * h * (1 + k2 / 3) * (1 + 1e-13)
    assert e == pytest.approx(a * h, rel=2 * eps)


def test_rectangle_energy():
    assert rectangle_energy(RectanglePatch(3.0, 0.25)) == 0.75
    assert rectangle_energy(RectanglePatch(0.0, 0.25)) == 0.0
    t = hexagon_geometry(CuffLengths(2.0, 1.0)).t
    assert rectangle_energy(RectanglePatch(t, 0.5)) == t * 0.5


# --- pants -----------------------------------------------------------------

def test_pants_energy_equal_bases():
    g = hexagon_geometry(CuffLengths(2.0, 1.0))
    pe = pants_energy(2.0, 1.0)
    # bases l_in/4 = l_out/2 = 0.5, so the trapezoid is a 0.5 x gap rectangle
    assert pe.raw_energy == pytest.approx(4 * (g.t * 0.5 + 0.5 * g.gap), rel=1e-15)
    assert (pe.measure_in, pe.measure_out) == (2.0, 1.0)


def test_pants_admissibility():
    with pytest.raises(AdmissibilityError):
        pants_energy(3.0, 0.5)
    with pytest.raises(AdmissibilityError):
        pants_energy(1.0, 3.375)


@given(st.floats(0.05, 1.0), st.floats(1.0, 2.5))
def test_measure_bookkeeping(l_out, ratio):
    try:
        pe = pants_energy(l_out * ratio, l_out)
    except AdmissibilityError:
        return
    assert pe.measure_out == pe.measure_in / 2
    assert pe.raw_energy > 0


@given(st.lists(st.floats(min_value=1e-3, max_value=1e3), min_size=10, max_size=10))
def test_scaling_law(scales):
    pe = pants_energy(2.0, 1.0)
    for s in scales:
        scaled = pe.with_scale(s)
        assert scaled.scaled_energy == pytest.approx(s * s * pe.raw_energy, rel=1e-15)
        assert scaled.scaled_measure_in == pytest.approx(s * pe.measure_in, rel=1e-15)
        assert scaled.scaled_measure_out == pytest.approx(s * pe.measure_out, rel=1e-15)
    with pytest.raises(DomainError):
        pe.with_scale(0.0)
    assert isinstance(pe, PantsEnergy)


# --- Cantor series ---------------------------------------------------------

def _direct_terms(r, n_lo, n_hi):
    """Literal definition log(1/l_n) / (2^n l_n), skipping l_n >= 1.

    Evaluated through log l_n = r log(n+1) - (n+1) log 2 to stay in range.
    """
    out = []
    for n in range(n_lo, n_hi + 1):
        log_ell = r * math.log(n + 1) - (n + 1) * math.log(2)
        if log_ell < 0:
            out.append((n, -log_ell * math.exp(-(n * math.log(2) + log_ell))))
    return out


def test_asymptotic_terms_match_definition():
    got = cantor_energy_series(3.0, 80)
    ref = _direct_terms(3.0, 2, 80)
    assert list(got.levels) == [n for n, _ in ref]
    np.testing.assert_allclose(got.terms, [t for _, t in ref], rtol=1e-12)
    assert set(got.skipped) == {n for n in range(2, 81)} - {n for n, _ in ref}


def test_r3_converges():
    s = cantor_energy_series(3.0, 200)
    assert s.verdict == "Converges"
    assert s.tail_bound < 1e-2
    long = cantor_energy_series(3.0, 4000)
    assert long.total - s.total <= s.tail_bound


def test_r3_tail_below_1e3_needs_longer_run():
    # the remainder after n = 200 is about 6.5e-3, so no valid bound can be below 1e-3 there
    remainder = math.fsum(t for _, t in _direct_terms(3.0, 201, 200_000))
    assert remainder > 6e-3
    s = cantor_energy_series(3.0, 2000)
    assert s.tail_bound < 1e-3
    assert math.fsum(t for _, t in _direct_terms(3.0, 2001, 400_000)) <= s.tail_bound


def test_r2_diverges_with_witness():
    s = cantor_energy_series(2.0, 200)
    assert s.verdict == "Diverges"
    assert s.witness_sum > 10
    # independent direct summation of the defining terms
    acc, first = 0.0, None
    for n, t in _direct_terms(2.0, 2, 100_000):
        acc += t
        if acc > 10:
            first = n
            break
    assert s.witness_n == first == 30378


@given(st.floats(min_value=2.05, max_value=6.0), st.integers(20, 300))
def test_tail_bound_validated_by_doubling(r, n_max):
    s = cantor_energy_series(r, n_max)
    assert s.verdict == "Converges"
    twice = cantor_energy_series(r, 2 * n_max)
    assert 0 <= twice.total - s.total <= s.tail_bound
    assert np.all(np.diff(s.partial_sums) >= 0)


@given(st.floats(min_value=0.2, max_value=2.0))
def test_diverges_at_or_below_two(r):
    s = cantor_energy_series(r, 50)
    assert s.verdict == "Diverges"
    assert s.witness_sum > 10
    assert math.isinf(s.tail_bound)


def test_exact_mode_r3():
    s = cantor_energy_series(3.0, 200, mode="exact")
    assert s.verdict == "Converges"
    assert int(s.levels[0]) == 9
    assert all(v == "trapezoid inadmissible" for n, v in s.skipped.items() if n < 9)
    assert all(v == "outside trigonometry guard" for n, v in s.skipped.items() if n > 9)
    n = s.levels.astype(float)
    majorant = (7 / 3) * ((2 * n + 5) * math.log(2) + 1 / 8) / n**3
    assert np.all(s.terms <= majorant)


def test_exact_term_is_literal_construction():
    r, n = 3.0, 12
    l_prev, l_n = float(cantor_length(r, n - 1)), float(cantor_length(r, n))
    raw = pants_energy(l_prev, l_n).raw_energy
    s = cantor_energy_series(r, 20, mode="exact")
    term = dict(zip(s.levels.tolist(), s.terms))[n]
    assert term == pytest.approx(2**n * (1 / (2**n * l_prev)) ** 2 * raw, rel=1e-14)


def test_exact_to_asymptotic_ratio_bracket():
    s = cantor_energy_series(3.0, 200, mode="exact")
    ratio = s.terms / asymptotic_terms(3.0, s.levels)
    # frozen empirical bracket; the top end comes from n = 9 where l_9 = 0.977
    assert ratio.min() >= 1.0 and ratio.max() <= 70.0
    assert np.all(np.diff(ratio) < 0)
    inner = ratio[s.levels >= 10]
    assert inner.min() >= 1 / 64 and inner.max() <= 64


def test_exact_mode_divergence_uses_minorant():
    s = cantor_energy_series(2.0, 100, mode="exact")
    assert s.verdict == "Diverges"
    assert s.witness_sum > 10


def test_csv_columns():
    s = cantor_energy_series(2.5, 40)
    rows = list(csv.reader(io.StringIO(s.to_csv())))
    assert rows[0] == ["n", "term", "partial_sum", "tail_bound"]
    assert len(rows) == len(s.terms) + 1
    last = rows[-1]
    assert float(last[3]) == pytest.approx(s.tail_bound, rel=1e-15)


def test_series_arguments():
    with pytest.raises(DomainError):
        cantor_energy_series(0.0, 10)
    with pytest.raises(DomainError):
        cantor_energy_series(3.0, 2)
    with pytest.raises(DomainError):
        cantor_energy_series(3.0, 10, mode="bogus")
