"""Hyperbolic trigonometry of a zero-twist pair of pants with equal outer cuffs.

The pants with interior cuff ``l_in`` and two outer cuffs of length ``l_out``
is cut by its three orthogeodesics into two congruent right-angled hexagons.
Each hexagon is cut by the orthogeodesic ``a`` (from the interior cuff to the
seam between the outer cuffs) into two congruent right-angled pentagons with
cyclic sides::

    o12,  l_out/2,  o23/2,  a,  l_in/4

Dropping the perpendicular from the vertex ``a ∩ o23`` onto ``o12`` splits a
pentagon into two trirectangles; its foot sits at distance ``t`` from the
interior cuff and the perpendicular has length ``b``.

All closed forms are arranged so that no difference of nearly equal
quantities is formed, which keeps every identity accurate to ~1e-15 relative
across the whole guard range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, NumericalError

ARG_MIN = 1e-12
ARG_MAX = 50.0
RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class CuffLengths:
    l_in: float
    l_out: float

    def __post_init__(self):
        for name in ("l_in", "l_out"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be a positive finite real, got {v!r}", field=name)


@dataclass(frozen=True)
class HexagonGeometry:
    o12: float
    o23: float
    a: float
    t: float
    b: float
    # o12 - t, evaluated by the mirrored closed form (no cancellation)
    gap: float


@dataclass(frozen=True)
class CollarData:
    cuff_length: float
    half_width: float
    annulus_modulus: float
    connecting_family_modulus: float


def _coth_minus_one(x: float) -> float:
    # coth(x) - 1 = 2 / (exp(2x) - 1), exact for tiny and large x alike
    return 2.0 / math.expm1(2.0 * x)


def _acosh1p(u: float) -> float:
    """acosh(1 + u) for u >= 0 without cancellation."""
    return math.log1p(u + math.sqrt(u * (u + 2.0)))


def _check_arg(value: float, name: str) -> None:
    if not (ARG_MIN < value < ARG_MAX):
        raise DomainError(
            f"{name} = {value!r} outside the guard interval ({ARG_MIN}, {ARG_MAX})", field=name
        )


def _atanh_stable(x: float, one_minus_x: float) -> float:
    if x < 0.5:
        return math.atanh(x)
    return 0.5 * (math.log1p(x) - math.log(one_minus_x))


def _foot(s_near: float, s_far: float, o12: float) -> float:
    """Distance from the cuff with half-argument ``s_near`` to the foot point.

    From cosh t = tanh b coth s_near and cosh(o12 - t) = tanh b coth s_far:
    tanh t = sech^2(s_near) / tanh(o12), and 1 - tanh t factors into a
    product of positive terms.
    """
    th = math.tanh(o12)
    sech2_near = 1.0 / math.cosh(s_near) ** 2
    sech2_far = 1.0 / math.cosh(s_far) ** 2
    x = sech2_near / th
    one_minus_x = math.tanh(s_near) ** 2 * (sech2_far + th) / ((1.0 + th) * th)
    return _atanh_stable(x, one_minus_x)


def hexagon_geometry(cuffs: CuffLengths) -> HexagonGeometry:
    s1 = cuffs.l_in / 4.0
    s2 = cuffs.l_out / 2.0
    _check_arg(s1, "l_in/4")
    _check_arg(s2, "l_out/2")

    # cosh o12 = coth(s1) coth(s2)
    e1, e2 = _coth_minus_one(s1), _coth_minus_one(s2)
    o12 = _acosh1p(e1 * e2 + e1 + e2)

    # cosh a = sinh(o12) sinh(s2)  =>  sinh a = cosh(s2) / sinh(s1)
    a = math.asinh(math.cosh(s2) / math.sinh(s1))

    # cosh(o23/2) = coth(a) coth(s2)
    ea = _coth_minus_one(a)
    o23 = 2.0 * _acosh1p(ea * e2 + ea + e2)

    t = _foot(s1, s2, o12)
    gap = _foot(s2, s1, o12)
    if t > o12 and t - o12 <= 8 * math.ulp(o12):
        t = o12  # gap below one ulp of o12
    if not (t > 0.0 and gap > 0.0 and t <= o12):
        raise NumericalError(f"foot parameter t={t!r} not inside (0, o12={o12!r})")

    # tanh b = cosh(t) tanh(s1) rewritten without the 1 - tanh b cancellation
    b = math.asinh(math.tanh(o12) * math.cosh(s1) * math.cosh(s2))

    geom = HexagonGeometry(o12=o12, o23=o23, a=a, t=t, b=b, gap=gap)
    worst = max(residuals(geom, cuffs).values())
    if worst > RESIDUAL_TOL:
        raise NumericalError(f"hexagon identities violated (max residual {worst:.3e})")
    return geom


def _rel(lhs: float, rhs: float) -> float:
    return abs(lhs - rhs) / abs(rhs)


def residuals(geom: HexagonGeometry, cuffs: CuffLengths) -> dict[str, float]:
    """Relative residuals of the five defining identities plus ``t + gap = o12``."""
    s1 = cuffs.l_in / 4.0
    s2 = cuffs.l_out / 2.0
    coth1, coth2 = 1.0 / math.tanh(s1), 1.0 / math.tanh(s2)
    tanh_b = math.tanh(geom.b)
    return {
        "o12": _rel(math.cosh(geom.o12), coth1 * coth2),
        "a": _rel(math.cosh(geom.a), math.sinh(geom.o12) * math.sinh(s2)),
        "o23": _rel(math.cosh(geom.o23 / 2.0), coth2 / math.tanh(geom.a)),
        "foot_in": _rel(math.cosh(geom.t), tanh_b * coth1),
        "foot_out": _rel(math.cosh(geom.gap), tanh_b * coth2),
        "split": _rel(geom.t + geom.gap, geom.o12),
    }


def foot_gap(cuffs: CuffLengths) -> float:
    """Length ``o12 - t`` between the foot point and the outer cuff.

    Computed by the mirrored closed form rather than by subtraction, so it
    stays accurate when ``t`` is close to ``o12``.
    """
    return hexagon_geometry(cuffs).gap


def collar(cuff_length: float) -> CollarData:
    """Standard collar of a closed geodesic and its two conformal moduli.

    In the annular cover the collar of half-width ``w`` is the sector of
    opening ``2*arctan(sinh w)`` around the axis, so the annulus modulus
    (height over circumference) is ``(2/l) * arctan(sinh w)``. The modulus of
    the family of arcs joining the two boundary curves is its reciprocal.
    """
    ell = float(cuff_length)
    if not (ARG_MIN < ell < ARG_MAX):
        raise DomainError(f"cuff_length {ell!r} outside ({ARG_MIN}, {ARG_MAX})", field="cuff_length")
    sinh_w = 1.0 / math.sinh(ell / 2.0)
    w = math.asinh(sinh_w)
    mod = (2.0 / ell) * math.atan(sinh_w)
    return CollarData(
        cuff_length=ell,
        half_width=w,
        annulus_modulus=mod,
        connecting_family_modulus=1.0 / mod,
    )


def collar_constant(max_length: float = ARG_MAX) -> float:
    """Smallest M with ``connecting_family_modulus <= M * l`` for all l <= max_length.

    The ratio ``1 / (2 arctan(1/sinh(l/2)))`` increases with l, so the
    supremum is attained at ``max_length``; its limit as l -> 0 is 1/pi.
    """
    return 1.0 / (2.0 * math.atan(1.0 / math.sinh(max_length / 2.0)))
