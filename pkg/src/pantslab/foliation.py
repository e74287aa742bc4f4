"""Explicit foliation patches on the Cantor-tree pants and their Dirichlet energy.

Every pentagon of a pants carries a rectangle ``[0, t] x [0, l_in/4]`` foliated
by horizontal leaves, followed by a right-angled trapezoid whose leaves are
straight segments matching its two vertical bases linearly. Four pentagons
make a pants; a pants at level n is rescaled by ``1/(2^n l_{n-1})`` so that
transverse measures glue across cuffs.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import integrate

from .errors import AdmissibilityError, DomainError, NumericalError
from .hyptrig import ARG_MAX, ARG_MIN, CuffLengths, hexagon_geometry

QUAD_RTOL = 1e-10
QUAD_LIMIT = 200
LOG2 = math.log(2.0)


# ---------------------------------------------------------------------------
# Trapezoid and rectangle patches
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TrapezoidPatch:
    """Right-angled trapezoid with vertical bases ``a`` (at x=0) and ``b``
    (at x=h), subject to ``a <= b <= C a`` and ``h >= C b``."""

    a: float
    b: float
    h: float
    C: float | None = None

    def __post_init__(self):
        for name in ("a", "b", "h"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise DomainError(f"{name} must be positive and finite", field=name)
        C = max(1.0, self.b / self.a) if self.C is None else float(self.C)
        object.__setattr__(self, "C", C)
        tol = 1e-12
        if C < 1.0:
            raise DomainError("shape constant C must be >= 1", field="C")
        if self.b < self.a * (1 - tol) or self.b > C * self.a * (1 + tol):
            raise DomainError(f"need a <= b <= C*a (a={self.a}, b={self.b}, C={C})", field="b")
        if self.h < C * self.b * (1 - tol):
            raise DomainError(f"need h >= C*b (h={self.h}, C*b={C * self.b})", field="h")

    def upper(self, x):
        return self.a + (self.b - self.a) * x / self.h

    @property
    def area(self) -> float:
        return 0.5 * self.h * (self.a + self.b)


@dataclass(frozen=True)
class RectanglePatch:
    width: float
    height: float

    def __post_init__(self):
        for name in ("width", "height"):
            v = getattr(self, name)
            if not (v >= 0 and math.isfinite(v)):
                raise DomainError(f"{name} must be nonnegative and finite", field=name)


def trapezoid_leaf_value(patch: TrapezoidPatch, x: float, y: float) -> float:
    """Leaf function ``v = a y / g(x)`` with ``g(x) = a + (b - a) x / h``."""
    g = patch.upper(x)
    eps = 1e-12 * max(patch.h, patch.b)
    if not (-eps <= x <= patch.h + eps and -eps <= y <= g + eps):
        raise DomainError(f"point ({x}, {y}) outside the trapezoid", field="point")
    return patch.a * y / g


def trapezoid_gradient(patch: TrapezoidPatch, x, y):
    """(dv/dx, dv/dy); vectorised over numpy arrays."""
    k = (patch.b - patch.a) / patch.h
    g = patch.upper(x)
    return -patch.a * y * k / g**2, patch.a / g


def trapezoid_gradient_sq_sup(patch: TrapezoidPatch) -> float:
    """Bound ``M1(C) = (C-1)^2/C^2 + 1`` on |grad v|^2 over the patch."""
    C = patch.C
    return (C - 1.0) ** 2 / C**2 + 1.0


def _dirichlet_closed(a: float, b: float, h: float) -> float:
    # integral over y of |grad v|^2 is a^2 (1 + k^2/3) / g(x); then over x
    d = b - a
    k = d / h
    if d == 0.0:
        return a * h
    log_ratio_per_d = math.log1p(d / a) / d
    return a * a * (1.0 + k * k / 3.0) * h * log_ratio_per_d


def _dirichlet_quadrature(a: float, b: float, h: float) -> float:
    k = (b - a) / h

    def inner(x):
        g = a + k * x

        def integrand(y):
            return (a / g) ** 2 + (a * y * k / g**2) ** 2

        val, err, *rest = integrate.quad(integrand, 0.0, g, epsrel=QUAD_RTOL, epsabs=0.0,
                                         limit=QUAD_LIMIT, full_output=1)
        if len(rest) > 1:
            raise NumericalError(f"inner quadrature failed at x={x}: {rest[1]}")
        return val

    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(inner, 0.0, h, epsrel=QUAD_RTOL, epsabs=0.0, limit=QUAD_LIMIT)
        except integrate.IntegrationWarning as exc:
            raise NumericalError(f"outer quadrature failed: {exc}") from exc
    return val


def trapezoid_energy(patch: TrapezoidPatch, method: str = "closed") -> float:
    """Dirichlet integral of the leaf function over the patch.

    ``method="closed"`` evaluates
    ``a^2 (1 + (b-a)^2/(3h^2)) (h/(b-a)) ln(b/a)``; ``method="quadrature"``
    integrates ``|grad v|^2`` by nested adaptive Gauss-Kronrod.
    """
    if method == "closed":
        return _dirichlet_closed(patch.a, patch.b, patch.h)
    if method == "quadrature":
        return _dirichlet_quadrature(patch.a, patch.b, patch.h)
    raise ValueError(f"unknown method {method!r}")


def trapezoid_energy_bound(patch: TrapezoidPatch) -> float:
    """Energy bound ``M1(C) * C * h * a``."""
    return trapezoid_gradient_sq_sup(patch) * patch.C * patch.h * patch.a


def rectangle_energy(patch: RectanglePatch) -> float:
    # v(x, y) = y, so |grad v|^2 = 1 and the energy is the area
    return patch.width * patch.height


# ---------------------------------------------------------------------------
# One pair of pants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PantsEnergy:
    level: int
    raw_energy: float
    measure_in: float
    measure_out: float
    scale: float = 1.0
    rectangle: float = 0.0
    trapezoid: float = 0.0

    @property
    def scaled_energy(self) -> float:
        return self.scale**2 * self.raw_energy

    @property
    def scaled_measure_in(self) -> float:
        return self.scale * self.measure_in

    @property
    def scaled_measure_out(self) -> float:
        return self.scale * self.measure_out

    def with_scale(self, scale: float) -> "PantsEnergy":
        if not (scale > 0 and math.isfinite(scale)):
            raise DomainError("scale must be positive", field="scale")
        return replace(self, scale=scale)


def pants_patches(l_in: float, l_out: float) -> tuple[RectanglePatch, TrapezoidPatch, bool]:
    """Patches of one pentagon; the flag says whether the trapezoid was
    reflected (interior base longer than the outer one)."""
    geom = hexagon_geometry(CuffLengths(l_in, l_out))
    a, b, h = l_in / 4.0, l_out / 2.0, geom.gap
    rect = RectanglePatch(geom.t, a)
    short, long_ = min(a, b), max(a, b)
    C = long_ / short
    if h < C * long_:
        raise AdmissibilityError(
            f"trapezoid inadmissible: height {h:.6g} < C*base {C * long_:.6g} "
            f"(l_in={l_in:.6g}, l_out={l_out:.6g})",
            field="l_out",
        )
    return rect, TrapezoidPatch(short, long_, h, C), a > b


def pants_energy(l_in: float, l_out: float, level: int = 0, scale: float = 1.0) -> PantsEnergy:
    """Energy and transverse measures of the four-pentagon foliation.

    Each pentagon strip carries transverse measure ``l_in/4``; all four meet
    the interior cuff and two meet each outer cuff.
    """
    rect, trap, _ = pants_patches(l_in, l_out)
    e_rect = rectangle_energy(rect)
    # the reflected trapezoid has the same energy: the closed form is symmetric in a, b
    e_trap = trapezoid_energy(trap)
    return PantsEnergy(
        level=level,
        raw_energy=4.0 * (e_rect + e_trap),
        measure_in=l_in,
        measure_out=l_in / 2.0,
        scale=scale,
        rectangle=e_rect,
        trapezoid=e_trap,
    )


# ---------------------------------------------------------------------------
# Cantor energy series
# ---------------------------------------------------------------------------

def cantor_length(r: float, n):
    """``l_n = (n+1)^r / 2^(n+1)``, the length of the boundary cuffs of X_n."""
    k = np.asarray(n, dtype=np.int64) + 1
    return np.ldexp(k.astype(float) ** r, -k)


def asymptotic_terms(r: float, n) -> np.ndarray:
    """``log(1/l_n) / (2^n l_n) = 2((n+1) log 2 - r log(n+1)) / (n+1)^r``."""
    u = np.asarray(n, dtype=float) + 1.0
    return 2.0 * (u * LOG2 - r * np.log(u)) / u**r


@dataclass
class EnergySeries:
    r: float
    mode: str
    levels: np.ndarray
    terms: np.ndarray
    partial_sums: np.ndarray
    tail_bound: float
    verdict: str  # Converges | Diverges | Inconclusive
    witness_n: int | None = None
    witness_sum: float | None = None
    skipped: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def total(self) -> float:
        return float(self.partial_sums[-1]) if len(self.partial_sums) else 0.0

    def row_tails(self) -> np.ndarray:
        """Bound on the remainder after each listed level."""
        if not math.isfinite(self.tail_bound):
            return np.full(len(self.terms), math.inf)
        return (self.total - self.partial_sums) + self.tail_bound

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "term", "partial_sum", "tail_bound"])
        for n, t, s, tb in zip(self.levels, self.terms, self.partial_sums, self.row_tails()):
            w.writerow([int(n), f"{t:.17g}", f"{s:.17g}", f"{tb:.17g}"])
        return buf.getvalue()

    def as_dict(self) -> dict:
        return {
            "r": self.r,
            "mode": self.mode,
            "verdict": self.verdict,
            "n_first": int(self.levels[0]) if len(self.levels) else None,
            "n_last": int(self.levels[-1]) if len(self.levels) else None,
            "partial_sum": self.total,
            "tail_bound": self.tail_bound,
            "witness_n": self.witness_n,
            "witness_sum": self.witness_sum,
            "skipped": {str(k): v for k, v in self.skipped.items()},
            "notes": list(self.notes),
        }


def _asymptotic_decreasing_onset(r: float) -> int:
    """An integer u >= 2 with f(u) = (u log 2 - r log u) u^-r positive and
    decreasing on [u, inf).

    f'(u) < 0 iff h(u) = (r-1) log2 u + r - r^2 log u > 0; h is convex with
    minimum at u* = r^2 / ((r-1) log 2).
    """
    def h(u):
        return (r - 1.0) * LOG2 * u + r - r * r * math.log(u)

    def pos(u):
        return u * LOG2 - r * math.log(u) > 0

    u_star = r * r / ((r - 1.0) * LOG2)
    if h(u_star) > 0:
        u0 = 2.0
    else:
        lo, hi = u_star, 2 * u_star
        while h(hi) <= 0:
            hi *= 2
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            lo, hi = (mid, hi) if h(mid) <= 0 else (lo, mid)
        u0 = hi
    # u log 2 - r log u increases past r / log 2, so positivity found there persists
    u = max(2, math.ceil(u0), math.ceil(r / LOG2) + 1)
    while not pos(u):
        u += 1
    return u


def _asymptotic_tail(r: float, U: float) -> float:
    """int_U^inf 2 (u log2 - r log u) u^-r du for r > 2."""
    a = LOG2 * U ** (2.0 - r) / (r - 2.0)
    b = r * U ** (1.0 - r) * (math.log(U) / (r - 1.0) + 1.0 / (r - 1.0) ** 2)
    return 2.0 * (a - b)


def _witness(term_fn, start: int, threshold: float, carry: float, cap: int = 10**8, chunk: int = 10**6):
    """First level N >= start at which carry + sum_{start..N} term exceeds threshold."""
    n0 = start
    total = carry
    while n0 <= cap:
        n = np.arange(n0, n0 + chunk)
        cs = total + np.cumsum(term_fn(n))
        idx = np.flatnonzero(cs > threshold)
        if idx.size:
            i = int(idx[0])
            return int(n[i]), float(cs[i])
        total = float(cs[-1])
        n0 += chunk
    return None, total


def _exact_term(r: float, n: int) -> float:
    l_prev, l_n = float(cantor_length(r, n - 1)), float(cantor_length(r, n))
    pe = pants_energy(l_prev, l_n, level=n, scale=1.0 / (2.0**n * l_prev))
    return 2.0**n * pe.scaled_energy


def _exact_majorant(r, n):
    # term_n <= (7/3) o12 / n^r and o12 <= (2n+5) log 2 + 1/8
    n = np.asarray(n, dtype=float)
    return (7.0 / 3.0) * ((2.0 * n + 5.0) * LOG2 + 0.125) / n**r


def _exact_minorant(r, n):
    # term_n >= o12 / (2 n^r) and o12 >= 2(n+2) log 2 - r log(n(n+1))
    n = np.asarray(n, dtype=float)
    return np.maximum(0.0, 2.0 * (n + 2.0) * LOG2 - r * np.log(n * (n + 1.0))) / (2.0 * n**r)


def cantor_energy_series(r: float, n_max: int, mode: str = "asymptotic",
                         witness_threshold: float = 10.0) -> EnergySeries:
    """Dirichlet energy of the escaping foliation on the Cantor tree surface
    with cuffs ``l_n = (n+1)^r/2^(n+1)``, level by level from n = 2.

    ``asymptotic`` sums ``log(1/l_n)/(2^n l_n)`` over the levels with
    ``l_n < 1``. ``exact`` assembles the actual patches of every admissible
    pants, scaled to glue, and sums ``2^n`` copies per level.
    """
    if not (r > 0 and math.isfinite(r)):
        raise DomainError("r must be positive", field="r")
    if n_max < 3:
        raise DomainError("n_max must be >= 3", field="n")
    if mode == "asymptotic":
        return _asymptotic_series(r, n_max, witness_threshold)
    if mode == "exact":
        return _exact_series(r, n_max, witness_threshold)
    raise DomainError(f"unknown mode {mode!r}", field="mode")


def _asymptotic_series(r: float, n_max: int, threshold: float) -> EnergySeries:
    n_all = np.arange(2, n_max + 1)
    ell = cantor_length(r, n_all)
    keep = ell < 1.0
    skipped = {int(n): "l_n >= 1" for n in n_all[~keep]}
    levels = n_all[keep]
    terms = asymptotic_terms(r, levels)
    sums = np.cumsum(terms)
    last = float(sums[-1]) if len(sums) else 0.0
    series = EnergySeries(r, "asymptotic", levels, terms, sums, math.inf, "Inconclusive", skipped=skipped)
    if r > 2.0:
        U0 = _asymptotic_decreasing_onset(r)
        N = n_max
        extra = 0.0
        if N + 1 < U0:
            # levels with l_n >= 1 are skipped, so they contribute nothing
            extra = float(np.sum(np.maximum(asymptotic_terms(r, np.arange(N + 1, U0)), 0.0)))
            N = U0 - 1
        series.tail_bound = extra + _asymptotic_tail(r, N + 1.0)
        series.verdict = "Converges"
        series.notes.append(f"integral test on decreasing tail from n = {U0 - 1}")
    else:
        # t_n >= log2 * (n+1)^(1-r) >= log2/(n+1) once (n+1) log 2 >= 2 r log(n+1)
        start = int(levels[0]) if len(levels) else n_max + 1
        wn, ws = _witness(lambda n: asymptotic_terms(r, n), start, threshold, 0.0)
        series.verdict = "Diverges"
        series.witness_n, series.witness_sum = wn, ws
        series.notes.append("harmonic minorant log2/(n+1) once (n+1) log 2 >= 2 r log(n+1)")
    return series


def _exact_series(r: float, n_max: int, threshold: float) -> EnergySeries:
    levels, terms, skipped = [], [], {}
    for n in range(2, n_max + 1):
        l_prev, l_n = float(cantor_length(r, n - 1)), float(cantor_length(r, n))
        if not (l_prev / 4.0 > ARG_MIN and l_n / 2.0 > ARG_MIN and l_prev / 4.0 < ARG_MAX):
            skipped[n] = "outside trigonometry guard"
            continue
        try:
            terms.append(_exact_term(r, n))
            levels.append(n)
        except AdmissibilityError:
            skipped[n] = "trapezoid inadmissible"
    levels = np.asarray(levels, dtype=int)
    terms = np.asarray(terms, dtype=float)
    sums = np.cumsum(terms)
    series = EnergySeries(r, "exact", levels, terms, sums, math.inf, "Inconclusive", skipped=skipped)
    if not len(levels):
        series.notes.append("no admissible level in range")
        return series
    inadmissible = [k for k, v in skipped.items() if v == "trapezoid inadmissible"]
    if inadmissible and max(inadmissible) > levels[0]:
        series.notes.append("admissibility not monotone in n; tail bound not certified")
        return series
    N = int(levels[-1])
    series.notes.append(
        f"admissible from n = {int(levels[0])}; tail assumes every level past n = {N} stays admissible"
    )
    if r > 2.0:
        c1 = 2.0 * LOG2 / (r - 2.0) * N ** (2.0 - r)
        c2 = (5.0 * LOG2 + 0.125) / (r - 1.0) * N ** (1.0 - r)
        series.tail_bound = (7.0 / 3.0) * (c1 + c2)
        series.verdict = "Converges"
        series.notes.append("tail from majorant (7/3)((2n+5) log 2 + 1/8)/n^r")
    else:
        wn, ws = _witness(lambda n: _exact_minorant(r, n), N + 1, threshold, float(sums[-1]))
        series.verdict = "Diverges"
        series.witness_n, series.witness_sum = wn, ws
        series.notes.append("witness continues past the guard with minorant o12/(2 n^r)")
    return series
