import json

import jsonschema
import pytest
from hypothesis import given, strategies as st

from pantslab import criteria
from pantslab.criteria import (
    ADVISORY_LABEL,
    NON_PARABOLIC,
    PARABOLIC,
    RULE_BOUNDED_BELOW,
    RULE_COMPLEXITY,
    RULE_POWER_DECAY,
    RULE_SUBCRITICAL,
    UNKNOWN,
    VERDICT_SCHEMA,
    IntersectionData,
    Verdict,
    cantor_escaping_mass,
    classify,
    grid_escaping_mass,
    level_aggregate,
    necessary_condition_bounded,
    necessary_condition_weighted,
    series_divergence,
)
from pantslab.errors import PreconditionError, UnsupportedSurface, ValidationError
from pantslab.sequences import Certificate, Monomial, Table, replay
from pantslab.surface import CuffRule, SurfaceSpec, make_spec


BENCHMARKS = [
    (make_spec("cantor", "bhs"), PARABOLIC, RULE_SUBCRITICAL),
    (make_spec("cantor", "power_over_exp", r=3), NON_PARABOLIC, RULE_POWER_DECAY),
    (make_spec("cantor", "constant"), NON_PARABOLIC, RULE_BOUNDED_BELOW),
    (make_spec("grid", "constant"), PARABOLIC, RULE_COMPLEXITY),
    (make_spec("ladder", "constant"), PARABOLIC, RULE_COMPLEXITY),
    (make_spec("cantor", "power_over_exp", r=2), UNKNOWN, "none"),
]


@pytest.mark.parametrize("spec,kind,rule", BENCHMARKS, ids=lambda x: getattr(x, "label", None))
def test_benchmarks(spec, kind, rule):
    v = classify(spec, depth=50)
    assert (v.kind, v.rule) == (kind, rule)
    jsonschema.validate(json.loads(v.to_json()), VERDICT_SCHEMA)


def test_grid_rule_records_linear_complexity():
    v = classify(make_spec("grid", "constant"), depth=50)
    assert v.evidence["q_rule"] == "4*n"
    assert v.evidence["inverse_q_series"]["certificate"]["constant"] == 0.25


def test_unknown_carries_heuristic_advisory():
    v = classify(make_spec("cantor", "power_over_exp", r=1.5), depth=30)
    assert v.kind == UNKNOWN
    assert v.evidence["advisory"]["label"] == ADVISORY_LABEL


def test_power_rule_reading():
    # 0.9^n dominates (n+1)^3 / 2^(n+1), but expression rules are opaque to both readings
    rule = CuffRule("expression", expression=lambda n, j: 0.9**n)
    spec = SurfaceSpec("cantor_tree", rule)
    assert classify(spec, 20).kind == UNKNOWN
    exact = make_spec("cantor", "power_over_exp", r=2.5)
    assert classify(exact, 20, strict_equality=True).rule == RULE_POWER_DECAY
    assert classify(exact, 20, strict_equality=False).evidence["reading"] == "lower bound"


def test_bounded_cantor_not_caught_by_power_rule():
    v = classify(make_spec("cantor", "constant", c=0.01), depth=20)
    assert v.rule == RULE_BOUNDED_BELOW


def test_rule_order_first_match_wins(monkeypatch):
    # the four hypotheses are disjoint on the built-in families, so force an overlap
    spec = make_spec("cantor", "bhs")
    monkeypatch.setattr(criteria, "_complexity_rule", lambda s, d: (True, {"forced": True}))
    assert classify(spec, 20).rule == RULE_COMPLEXITY


def test_finite_surface_rejected():
    with pytest.raises(UnsupportedSurface):
        classify(make_spec("finite_table", "constant"), 20)
    with pytest.raises(PreconditionError):
        classify(make_spec("grid", "constant"), 9)


@given(
    st.sampled_from(["bhs", "constant", "power_over_exp"]),
    st.sampled_from(["cantor", "grid", "ladder"]),
    st.floats(0.5, 5.0),
    st.integers(10, 60),
    st.integers(10, 60),
)
def test_depth_never_flips_a_decided_verdict(rule, family, r, d1, d2):
    spec = make_spec(family, rule, r=r)
    k1, k2 = classify(spec, d1).kind, classify(spec, d2).kind
    assert {k1, k2} != {PARABOLIC, NON_PARABOLIC}
    assert k1 == k2


def test_verdict_invariants():
    with pytest.raises(ValidationError):
        Verdict(PARABOLIC, "none", {"x": 1})
    with pytest.raises(ValidationError):
        Verdict(UNKNOWN, "none", {})


# --- series --------------------------------------------------------------------

def test_series_examples():
    assert series_divergence(Monomial.power(4.0, 1.0).reciprocal(), 10).kind == "Divergent"
    assert series_divergence(Monomial(2.0, 2.0).reciprocal(), 10).kind == "Convergent"
    assert series_divergence(lambda n: 1.0 / n, 10).kind == "Inconclusive"


# --- necessary conditions ------------------------------------------------------

def test_bounded_condition_examples():
    lengths = CuffRule.constant(1.0)
    ok = necessary_condition_bounded(IntersectionData(Monomial.power(1.0, -1.0), lengths), 100)
    assert ok.status == "Satisfied"
    const = necessary_condition_bounded(IntersectionData(Monomial(2.0), lengths), 100)
    assert const.status == "Violated"
    # i_alpha = M / sqrt(q(n)) with q(n) = 4n
    m = Monomial.power(4.0, 1.0) ** -0.5 * 3.0
    assert necessary_condition_bounded(IntersectionData(m, lengths), 100).status == "Violated"


def test_bounded_condition_precondition():
    with pytest.raises(PreconditionError):
        necessary_condition_bounded(IntersectionData(Monomial(1.0), CuffRule.bhs_decay()), 50)


def test_grid_escaping_mass_aggregate():
    data = grid_escaping_mass(3.0)
    term = level_aggregate(data, weighted=False)
    for n in (1, 7, 100):
        assert term(n) == pytest.approx(9.0 / (4 * n), rel=1e-14)
    res = necessary_condition_bounded(data, 1000)
    assert res.status == "Violated"
    assert res.witness["certificate"]["kind"] == "harmonic_minorant"


def test_cantor_escaping_mass_aggregate():
    data = cantor_escaping_mass(0.5)
    term = level_aggregate(data, weighted=True)
    for n in (1, 9, 200):
        assert term(n) == pytest.approx(0.25 / n, rel=1e-13)
    res = necessary_condition_weighted(data, 1000)
    assert res.status == "Violated"
    cert = res.witness["certificate"]
    assert cert["constant"] == pytest.approx(0.25, rel=1e-12)


def test_weighted_condition_examples():
    lengths = CuffRule.power_over_exp(3.0)
    # i = l gives terms l, summable
    same = IntersectionData(lengths.monomial(), lengths)
    assert necessary_condition_weighted(same, 50).status == "Satisfied"
    geo = IntersectionData(Monomial(1.0, 0.5), lengths)
    res = necessary_condition_weighted(geo, 50)
    assert res.status == "Satisfied"
    # direct summation oracle: terms 2 * 2^-n / (n+1)^3
    direct = sum(2 * 2.0**-n / (n + 1) ** 3 for n in range(1, 51))
    assert res.partial_sum == pytest.approx(direct, rel=1e-14)


def test_weighted_condition_precondition():
    growing = CuffRule("expression", expression=lambda n, j: float(n))
    with pytest.raises(PreconditionError):
        necessary_condition_weighted(IntersectionData(Monomial(1.0), growing), 20)
    tabled = CuffRule("table", table={1: 1.0, 2: 2.0})
    with pytest.raises(PreconditionError):
        necessary_condition_weighted(IntersectionData(Monomial(1.0), tabled), 20)


def test_table_intersections_inconclusive():
    data = IntersectionData(Table((1.0, 0.5, 0.25)), CuffRule.constant(1.0))
    assert necessary_condition_bounded(data, 10).status == "Inconclusive"


@given(st.floats(0.01, 100.0))
def test_escaping_mass_certificates_replay(M):
    for data, weighted, check in (
        (grid_escaping_mass(M), False, necessary_condition_bounded),
        (cantor_escaping_mass(M), True, necessary_condition_weighted),
    ):
        res = check(data, 50)
        assert res.status == "Violated"
        term = level_aggregate(data, weighted)
        cert = Certificate(**res.witness["certificate"])
        assert replay(cert, term, range(cert.onset, cert.onset + 1000)) == []
