"""Parabolicity classifier and the necessary conditions on integrable differentials.

Rules are tried in a fixed order and the first one whose hypotheses are
certified symbolically fires:

``complexity-divergence``
    bounded pants and ``sum 1/q(n) = inf``  ->  parabolic
``cantor-subcritical-decay``
    Cantor tree with ``l_n <= n / 2^(n+1)`` at every level  ->  parabolic
``cantor-power-decay``
    Cantor tree with ``l_n >= (n+1)^r / 2^(n+1)``, ``r > 2``, ``l_n -> 0``
    ->  not parabolic
``cantor-bounded-below``
    Cantor tree with ``l_n >= c > 0``  ->  not parabolic

Nothing is decided from raw partial sums; rules without a certificate leave
the verdict ``Unknown``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

from .errors import PreconditionError, ValidationError
from .foliation import cantor_energy_series
from .sequences import (
    Monomial,
    Opaque,
    SeriesVerdict,
    Table,
    TermRule,
    decreasing_onset,
    increasing_onset,
    series_divergence as _series_divergence,
    sum_verdicts,
)
from .surface import CuffRule, SurfaceSpec, is_bounded_pants, q_monomial, _custom_counts

PARABOLIC = "Parabolic"
NON_PARABOLIC = "NonParabolic"
UNKNOWN = "Unknown"

RULE_COMPLEXITY = "complexity-divergence"
RULE_SUBCRITICAL = "cantor-subcritical-decay"
RULE_POWER_DECAY = "cantor-power-decay"
RULE_BOUNDED_BELOW = "cantor-bounded-below"
RULE_NONE = "none"
RULES = (RULE_COMPLEXITY, RULE_SUBCRITICAL, RULE_POWER_DECAY, RULE_BOUNDED_BELOW)

ADVISORY_LABEL = (
    "heuristic: finite Dirichlet energy of the canonical escaping foliation "
    "suggests non-parabolicity"
)

_FUZZ = 1e-12

VERDICT_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "pantslab verdict",
    "type": "object",
    "required": ["kind", "rule", "evidence"],
    "additionalProperties": False,
    "properties": {
        "kind": {"enum": [PARABOLIC, NON_PARABOLIC, UNKNOWN]},
        "rule": {"enum": list(RULES) + [RULE_NONE]},
        "evidence": {"type": "object", "minProperties": 1},
    },
}


@dataclass
class Verdict:
    kind: str
    rule: str
    evidence: dict

    def __post_init__(self):
        if self.kind not in (PARABOLIC, NON_PARABOLIC, UNKNOWN):
            raise ValidationError(f"bad verdict kind {self.kind!r}", field="kind")
        if self.kind != UNKNOWN and self.rule not in RULES:
            raise ValidationError("a decided verdict must name its rule", field="rule")
        if not self.evidence:
            raise ValidationError("evidence must be non-empty", field="evidence")

    def as_dict(self) -> dict:
        return {"kind": self.kind, "rule": self.rule, "evidence": _jsonable(self.evidence)}

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.as_dict(), indent=indent, sort_keys=True, allow_nan=False)


def _jsonable(obj):
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "as_dict"):
        return _jsonable(obj.as_dict())
    if hasattr(obj, "item"):  # numpy scalar
        return _jsonable(obj.item())
    return obj


# ---------------------------------------------------------------------------
# Series
# ---------------------------------------------------------------------------

def _as_term(rule) -> TermRule:
    if isinstance(rule, (Monomial, Table, Opaque)):
        return rule
    if callable(rule):
        return Opaque(rule)
    raise ValidationError(f"cannot interpret {rule!r} as a sequence rule", field="terms_rule")


def series_divergence(terms_rule, depth: int) -> SeriesVerdict:
    """Certified verdict on ``sum terms_rule(n)``; plain callables are opaque."""
    return _series_divergence(_as_term(terms_rule), depth)


# ---------------------------------------------------------------------------
# Length-rule certificates
# ---------------------------------------------------------------------------

def _cantor_reference(r: float) -> Monomial:
    """(n+1)^r / 2^(n+1)."""
    return Monomial.power(0.5, r, shift=1, rho=0.5)


_SUBCRITICAL = Monomial.power(0.5, 1.0, rho=0.5)  # n / 2^(n+1)


def _ratio_below_one_everywhere(ratio: Monomial, depth: int) -> dict | None:
    """Certify ``ratio(n) <= 1`` for every n >= 1."""
    onset = decreasing_onset(ratio)
    if onset is None:
        return None
    last = max(onset, depth)
    worst = max(ratio(n) for n in range(1, last + 1))
    if worst > 1.0 + _FUZZ:
        return None
    return {"onset": onset, "checked_through": last, "max_ratio": worst}


def _ratio_above_one_everywhere(ratio: Monomial, depth: int) -> dict | None:
    """Certify ``ratio(n) >= 1`` for every n >= 1."""
    onset = increasing_onset(ratio)
    if onset is None:
        return None
    last = max(onset, depth)
    worst = min(ratio(n) for n in range(1, last + 1))
    if worst < 1.0 - _FUZZ:
        return None
    return {"onset": onset, "checked_through": last, "min_ratio": worst}


def _power_decay_exponent(rule: CuffRule, m: Monomial, strict: bool) -> float | None:
    if rule.kind == "power_over_exp":
        return rule.r if rule.r > 2.0 else None
    if strict:
        return None
    if m.rho == 0.5 and m.exponent > 2.0:
        return m.exponent
    if 0.5 < m.rho < 1.0 or (m.rho == 1.0 and m.tends_to_zero()):
        return 3.0  # beats every (n+1)^r / 2^(n+1); 3 is just a witness
    return None


def lower_bound_certificate(rule: CuffRule, depth: int) -> dict | None:
    """Certify ``inf_n l_n > 0`` for a length rule."""
    if rule.kind in ("table", "expression"):
        if rule.declared_bounds is not None:
            return {"lower_bound": rule.declared_bounds[0], "source": "declared"}
        return None
    m = rule.monomial()
    if m.tends_to_zero():
        return None
    if m.rho == 1.0 and m.exponent == 0.0 and m.log_exp == 0.0 and not m.powers:
        return {"lower_bound": m.coef, "source": "constant"}
    onset = increasing_onset(m)
    if onset is None:
        return None
    last = max(onset, depth)
    return {"lower_bound": min(m(n) for n in range(1, last + 1)), "onset": onset, "source": "monotone"}


def upper_bound_certificate(rule: CuffRule, depth: int) -> dict | None:
    """Certify ``sup_n l_n < inf`` for a length rule."""
    if rule.kind in ("table", "expression"):
        if rule.declared_bounds is not None:
            return {"upper_bound": rule.declared_bounds[1], "source": "declared"}
        return None
    m = rule.monomial()
    if not (m.tends_to_zero() or (m.rho == 1.0 and m.exponent == 0.0 and m.log_exp == 0.0)):
        return None
    onset = decreasing_onset(m)
    if onset is None:
        return None
    last = max(onset, depth)
    return {"upper_bound": max(m(n) for n in range(1, last + 1)), "onset": onset}


# ---------------------------------------------------------------------------
# Classifier
# ---------------------------------------------------------------------------

def _q_rule(spec: SurfaceSpec, depth: int) -> TermRule:
    q = q_monomial(spec.family)
    if q is not None:
        return q
    counts = _custom_counts(spec.periodic, depth)
    return Table(tuple(float(qn) for _, qn in counts))


def _complexity_rule(spec: SurfaceSpec, depth: int) -> tuple[bool, dict]:
    bp = is_bounded_pants(spec, depth)
    ev = {"bounded_pants": bp.bounded, "bounded_pants_status": bp.status, "length_window": list(bp.window)}
    if not (bp.bounded and bp.status == "proved"):
        return False, ev
    q = _q_rule(spec, depth)
    inv = q.reciprocal() if isinstance(q, Monomial) else Table(tuple(1.0 / v for v in q.values))
    sv = _series_divergence(inv, depth)
    ev["q_rule"] = q.describe() if isinstance(q, Monomial) else "enumerated table"
    ev["inverse_q_series"] = sv.as_dict()
    return sv.kind == "Divergent", ev


def classify(spec: SurfaceSpec, depth: int = 50, strict_equality: bool = False) -> Verdict:
    """Apply the four rules in order; the first certified rule decides.

    ``strict_equality`` restricts the power-decay rule to cuffs exactly equal
    to ``(n+1)^r / 2^(n+1)``; the default accepts any rule bounded below by
    such a sequence.
    """
    if depth < 10:
        raise PreconditionError(f"depth must be >= 10, got {depth}", field="depth")
    spec.graph()  # finite surfaces raise UnsupportedSurface here
    diagnostics: dict = {"family": spec.family, "cuff_rule": spec.cuff_rule.describe(), "depth": depth}

    fired, ev = _complexity_rule(spec, depth)
    diagnostics[RULE_COMPLEXITY] = ev
    if fired:
        return Verdict(PARABOLIC, RULE_COMPLEXITY, {**ev, "depth": depth})

    rule = spec.cuff_rule
    m = rule.monomial()
    if spec.family == "cantor_tree" and m is not None:
        cert = _ratio_below_one_everywhere(m / _SUBCRITICAL, depth)
        if cert is not None:
            return Verdict(PARABOLIC, RULE_SUBCRITICAL, {**cert, "comparison": "n/2^(n+1)", "depth": depth})
        diagnostics[RULE_SUBCRITICAL] = "hypothesis not certified"

        r = _power_decay_exponent(rule, m, strict_equality) if m.tends_to_zero() else None
        if r is not None:
            cert = _ratio_above_one_everywhere(m / _cantor_reference(r), depth)
            if cert is not None:
                return Verdict(NON_PARABOLIC, RULE_POWER_DECAY, {
                    **cert, "r": r, "comparison": "(n+1)^r/2^(n+1)",
                    "reading": "equality" if strict_equality else "lower bound", "depth": depth,
                })
        diagnostics[RULE_POWER_DECAY] = "hypothesis not certified"

    if spec.family == "cantor_tree":
        cert = lower_bound_certificate(rule, depth)
        if cert is not None:
            return Verdict(NON_PARABOLIC, RULE_BOUNDED_BELOW, {**cert, "depth": depth})
        diagnostics[RULE_BOUNDED_BELOW] = "hypothesis not certified"

    if spec.family == "cantor_tree" and rule.kind == "power_over_exp":
        series = cantor_energy_series(rule.r, max(depth, 3), mode="asymptotic")
        diagnostics["advisory"] = {
            "label": ADVISORY_LABEL,
            "energy_series_verdict": series.verdict,
            "partial_sum": series.total,
            "tail_bound": series.tail_bound,
        }
    return Verdict(UNKNOWN, RULE_NONE, diagnostics)


# ---------------------------------------------------------------------------
# Necessary conditions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntersectionData:
    """Per-curve intersection numbers at level n, with ``multiplicity(n)``
    curves per level sharing the same values."""

    i_alpha: TermRule
    lengths: CuffRule
    i_beta: TermRule | None = None
    multiplicity: Monomial | None = None

    def __post_init__(self):
        for name in ("i_alpha", "i_beta"):
            v = getattr(self, name)
            if v is not None and not isinstance(v, (Monomial, Table, Opaque)):
                raise ValidationError(f"{name} must be a sequence rule", field=name)
        if isinstance(self.i_alpha, Table):
            if not all(math.isfinite(x) and x >= 0 for x in self.i_alpha.values):
                raise ValidationError("intersection numbers must be nonnegative and finite", field="i_alpha")

    def _scaled(self, term: TermRule) -> TermRule:
        if self.multiplicity is None:
            return term
        if isinstance(term, Monomial):
            return term * self.multiplicity
        mult = self.multiplicity
        return Opaque(lambda n: mult(n) * term(n), term.first_level)


@dataclass
class ConditionResult:
    status: str  # Satisfied | Violated | Inconclusive
    partial_sum: float
    series: dict
    witness: dict | None = None
    precondition: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return _jsonable({
            "status": self.status,
            "partial_sum": self.partial_sum,
            "series": self.series,
            "witness": self.witness,
            "precondition": self.precondition,
        })


def _square(term: TermRule) -> TermRule:
    if isinstance(term, Monomial):
        return term**2
    if isinstance(term, Table):
        return Table(tuple(v * v for v in term.values), term.start)
    return Opaque(lambda n: term(n) ** 2, term.first_level)


def _divide(term: TermRule, lengths: CuffRule) -> TermRule:
    m = lengths.monomial()
    if isinstance(term, Monomial) and m is not None:
        return term / m
    return Opaque(lambda n: term(n) / lengths.level_length(n), term.first_level)


def _combine(parts: dict[str, SeriesVerdict], precondition: dict) -> ConditionResult:
    verdict = sum_verdicts(parts)
    status = {"Divergent": "Violated", "Convergent": "Satisfied"}.get(verdict, "Inconclusive")
    ps = math.fsum(v.partial_sum for v in parts.values())
    witness = None
    if status == "Violated":
        name, sv = next((k, v) for k, v in parts.items() if v.kind == "Divergent")
        witness = {"series": name, "certificate": sv.certificate.as_dict()}
    return ConditionResult(status, ps, {k: v.as_dict() for k, v in parts.items()}, witness, precondition)


def necessary_condition_bounded(data: IntersectionData, depth: int) -> ConditionResult:
    """Check ``sum_n [i(alpha_n)^2 + i(beta_n)^2] < inf`` on a bounded-pants surface.

    Violated means no integrable differential has these intersection numbers.
    """
    bp = is_bounded_pants(SurfaceSpec("cantor_tree", data.lengths), depth)
    if not (bp.bounded and bp.status == "proved"):
        raise PreconditionError("bounded-pants certificate absent for these lengths", field="lengths")
    parts = {"alpha": _series_divergence(data._scaled(_square(data.i_alpha)), depth)}
    if data.i_beta is not None:
        parts["beta"] = _series_divergence(data._scaled(_square(data.i_beta)), depth)
    return _combine(parts, {"bounded_pants": list(bp.window)})


def necessary_condition_weighted(data: IntersectionData, depth: int) -> ConditionResult:
    """Check ``sum_n sum_j i(alpha_n^j)^2 / l(alpha_n^j) < inf`` for lengths bounded above."""
    ub = upper_bound_certificate(data.lengths, depth)
    if ub is None:
        raise PreconditionError("no upper-bound certificate for these lengths", field="lengths")
    term = data._scaled(_divide(_square(data.i_alpha), data.lengths))
    return _combine({"alpha": _series_divergence(term, depth)}, {"length_upper_bound": ub})


def grid_escaping_mass(M: float, lengths: CuffRule | None = None) -> IntersectionData:
    """Mass ``M`` spread evenly over the ``q(n) = 4n`` frontier curves of the
    grid cover; the level aggregate is ``M^2 / q(n)``, the Cauchy-Schwarz minimum."""
    if not (M > 0 and math.isfinite(M)):
        raise ValidationError("mass must be positive", field="M")
    q = q_monomial("grid_z2_cover")
    return IntersectionData(
        i_alpha=q.reciprocal() * M,
        lengths=lengths or CuffRule.constant(1.0),
        multiplicity=q,
    )


def cantor_escaping_mass(m: float, lengths: CuffRule | None = None) -> IntersectionData:
    """Mass ``m`` split evenly over the ``2^(n+1)`` cuffs of level n; with
    ``l_n = n/2^(n+1)`` the level aggregate is ``m^2 / n``."""
    if not (m > 0 and math.isfinite(m)):
        raise ValidationError("mass must be positive", field="m")
    count = q_monomial("cantor_tree")
    return IntersectionData(
        i_alpha=count.reciprocal() * m,
        lengths=lengths or CuffRule.bhs_decay(),
        multiplicity=count,
    )


def level_aggregate(data: IntersectionData, weighted: bool) -> Callable[[int], float]:
    """The per-level summand the checks above feed to the series test."""
    sq = _square(data.i_alpha)
    term = data._scaled(_divide(sq, data.lengths) if weighted else sq)
    return term
