import math

import pytest
from hypothesis import given, strategies as st

from pantslab.errors import DomainError, EmptySample
from pantslab.extremal import (
    Annulus,
    ExtSample,
    annulus_modulus,
    cylinder_modulus,
    ext_scale,
    kerckhoff_lower_bound,
    qc_modulus_bounds,
)

pos = st.floats(min_value=1e-3, max_value=1e3)
ratios = st.floats(min_value=1e-3, max_value=1e3)


def test_annulus_examples():
    assert annulus_modulus(Annulus(1.0, math.exp(2 * math.pi))) == 1.0
    assert annulus_modulus(Annulus(0.0, 1.0)) == math.inf
    assert annulus_modulus(Annulus(1.0, math.inf)) == math.inf
    assert annulus_modulus(Annulus(1.0, 2.0)) == pytest.approx(0.110318, abs=5e-7)


@given(st.floats(min_value=-5.0, max_value=5.0), st.floats(min_value=1e-3, max_value=3.0))
def test_annulus_modulus_inverts_log(log_r1, m):
    r1 = math.exp(log_r1)
    r2 = r1 * math.exp(2 * math.pi * m)
    assert annulus_modulus(Annulus(r1, r2)) == pytest.approx(m, rel=1e-12)


@given(pos, st.floats(1.01, 10.0), st.floats(1.01, 10.0))
def test_annulus_monotone(r1, f, g):
    base = annulus_modulus(Annulus(r1, r1 * f))
    assert annulus_modulus(Annulus(r1, r1 * f * g)) > base
    assert annulus_modulus(Annulus(r1 * min(g, f) ** 0.5, r1 * f)) < base


def test_annulus_validation():
    with pytest.raises(DomainError):
        Annulus(2.0, 1.0)
    with pytest.raises(DomainError):
        Annulus(-1.0, 1.0)


def test_cylinder_and_scaling():
    assert cylinder_modulus(1.0, 1.0) == 1.0
    assert cylinder_modulus(2.0, 4.0) == 0.5
    assert ext_scale(1.0, 3.0) == 3.0
    assert ext_scale(2.0, 3.0) == 12.0
    # a flat cylinder of height r and circumference l: ext(r gamma) = r^2 / mod = r l
    r, l = 0.7, 2.3
    assert ext_scale(r, 1.0 / cylinder_modulus(r, l)) == pytest.approx(r * l, rel=1e-15)
    with pytest.raises(DomainError):
        cylinder_modulus(0.0, 1.0)


@given(pos, pos, pos)
def test_ext_scale_composes(r, s, e):
    assert ext_scale(r, ext_scale(s, e)) == pytest.approx(ext_scale(r * s, e), rel=1e-14)


def test_qc_bounds():
    assert qc_modulus_bounds(1.0, 0.7) == (0.7, 0.7)
    assert qc_modulus_bounds(2.0, 1.0) == (0.5, 2.0)
    # an affine stretch by K along the height of an (h, l) cylinder
    K, h, l = 3.0, 1.5, 2.0
    lo, hi = qc_modulus_bounds(K, cylinder_modulus(h, l))
    assert lo <= cylinder_modulus(K * h, l) <= hi
    with pytest.raises(DomainError):
        qc_modulus_bounds(0.5, 1.0)


@given(st.floats(1.0, 50.0), st.floats(1.0, 50.0), pos)
def test_qc_nesting(K1, K2, mod):
    lo1, hi1 = qc_modulus_bounds(K1, mod)
    lo, hi = qc_modulus_bounds(K2, lo1)[0], qc_modulus_bounds(K2, hi1)[1]
    LO, HI = qc_modulus_bounds(K1 * K2, mod)
    assert LO * (1 - 1e-12) <= lo and hi <= HI * (1 + 1e-12)


def test_kerckhoff_examples():
    assert kerckhoff_lower_bound(ExtSample.from_list([(2.0, 2.0), (0.3, 0.3)])) == 0.0
    assert kerckhoff_lower_bound(ExtSample.from_list([(1.0, math.e**2)])) == pytest.approx(1.0, abs=1e-12)
    assert kerckhoff_lower_bound(ExtSample.from_list([(1, 2), (1, 8)])) == pytest.approx(0.5 * math.log(8), rel=1e-15)
    with pytest.raises(EmptySample):
        kerckhoff_lower_bound(ExtSample({}))
    with pytest.raises(DomainError):
        ExtSample.from_list([(0.0, 1.0)])


samples = st.lists(st.tuples(pos, pos), min_size=1, max_size=12).map(ExtSample.from_list)


@given(samples)
def test_kerckhoff_symmetric(s):
    assert kerckhoff_lower_bound(s.swapped()) == kerckhoff_lower_bound(s)
    assert kerckhoff_lower_bound(s) >= 0


@given(samples, st.lists(st.tuples(pos, pos), min_size=1, max_size=5))
def test_kerckhoff_monotone_under_extension(s, more):
    extra = ExtSample({f"x{i}": p for i, p in enumerate(more)})
    assert kerckhoff_lower_bound(s.extended(extra)) >= kerckhoff_lower_bound(s)
