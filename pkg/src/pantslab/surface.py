"""Infinite surfaces described lazily by pants-decomposition generator rules.

Families:

``cantor_tree``
    Complement of a Cantor set. ``X_1`` is two pants glued along one cuff and
    ``X_n`` has ``2^(n+1)`` boundary cuffs, every one bounding a Cantor-set
    end.
``ladder_z_cover`` / ``grid_z2_cover``
    Z- and Z^2-covers of a closed surface, modelled by their lattice of
    fundamental cells. Every complement component of a finite union of
    cells carries an end accumulated by genus.
``custom_periodic``
    A user-declared periodic cell graph, enumerated breadth first.
``finite_table``
    Finite surfaces; accepted for validation only.

For the lattice families the topological complexity ``q(n)`` counts the
complement cells adjacent to ``X_n``; on a tree that equals the number of
frontier cuffs, on Z^2 it gives ``4n`` while the raw cuff count is ``8n - 4``.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Hashable, Iterator, Mapping

from .errors import GeneratorError, UnsupportedSurface, ValidationError
from .sequences import Monomial, decreasing_onset, increasing_onset

FAMILIES = ("cantor_tree", "ladder_z_cover", "grid_z2_cover", "custom_periodic", "finite_table")
RULE_KINDS = ("constant", "bhs_decay", "power_over_exp", "table", "expression")


@dataclass(frozen=True)
class CuffRule:
    kind: str
    c: float | None = None
    r: float | None = None
    table: Mapping[int, float] | None = None
    declared_bounds: tuple[float, float] | None = None
    expression: Callable[[int, int], float] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in RULE_KINDS:
            raise ValidationError(f"unknown rule kind {self.kind!r}", field="rule.kind")
        if self.kind == "constant":
            if self.c is None or not (self.c > 0 and math.isfinite(self.c)):
                raise ValidationError("constant rule needs c > 0", field="rule.params.c")
        elif self.kind == "power_over_exp":
            if self.r is None or not (self.r > 0 and math.isfinite(self.r)):
                raise ValidationError("power_over_exp rule needs r > 0", field="rule.params.r")
        elif self.kind == "table":
            if not self.table:
                raise ValidationError("table rule needs a nonempty level table", field="rule.params.table")
            clean = {}
            for k, v in dict(self.table).items():
                if not (float(v) > 0 and math.isfinite(float(v))):
                    raise ValidationError(f"table length at level {k} must be positive", field="rule.params.table")
                clean[int(k)] = float(v)
            object.__setattr__(self, "table", clean)
        elif self.kind == "expression":
            if not callable(self.expression):
                raise ValidationError("expression rule needs a callable", field="rule.params.expression")
        if self.declared_bounds is not None:
            lo, hi = map(float, self.declared_bounds)
            if not (0 < lo <= hi < math.inf):
                raise ValidationError("declared_bounds must satisfy 0 < lo <= hi", field="rule.params.declared_bounds")
            if self.kind == "table" and not all(lo <= v <= hi for v in self.table.values()):
                raise ValidationError("table values fall outside declared_bounds", field="rule.params.declared_bounds")
            object.__setattr__(self, "declared_bounds", (lo, hi))

    @classmethod
    def constant(cls, c: float) -> "CuffRule":
        return cls("constant", c=float(c))

    @classmethod
    def bhs_decay(cls) -> "CuffRule":
        return cls("bhs_decay")

    @classmethod
    def power_over_exp(cls, r: float) -> "CuffRule":
        return cls("power_over_exp", r=float(r))

    def monomial(self) -> Monomial | None:
        """Symbolic form of the per-level length, if the rule has one."""
        if self.kind == "constant":
            return Monomial(self.c)
        if self.kind == "bhs_decay":
            return Monomial.power(0.5, 1.0, rho=0.5)
        if self.kind == "power_over_exp":
            return Monomial.power(0.5, self.r, shift=1, rho=0.5)
        return None

    def level_length(self, level: int, index: int = 0) -> float:
        if self.kind == "table":
            if level not in self.table:
                raise ValidationError(f"level {level} not in table", field="level")
            return self.table[level]
        if self.kind == "expression":
            v = float(self.expression(level, index))
            if not (v > 0 and math.isfinite(v)):
                raise ValidationError(f"expression gave non-positive length {v!r} at level {level}", field="rule.params.expression")
            return v
        return self.monomial()(level)

    def describe(self) -> dict:
        d: dict = {"kind": self.kind}
        if self.c is not None:
            d["c"] = self.c
        if self.r is not None:
            d["r"] = self.r
        if self.table is not None:
            d["table"] = {str(k): v for k, v in sorted(self.table.items())}
        if self.declared_bounds is not None:
            d["declared_bounds"] = list(self.declared_bounds)
        return d


@dataclass(frozen=True)
class PeriodicGraph:
    """Periodic cell graph: cells ``(type, lattice vector)``, edge templates
    ``(src_type, dst_type, offset)`` replicated at every lattice vector."""

    dim: int
    types: tuple[str, ...]
    edges: tuple[tuple[str, str, tuple[int, ...]], ...]

    def __post_init__(self):
        if self.dim < 1:
            raise GeneratorError("periodic graph needs dim >= 1", field="periodic.dim")
        if not self.types or not self.edges:
            raise GeneratorError("periodic graph needs cell types and edges", field="periodic.edges")
        canon = []
        for s, t, off in self.edges:
            off = tuple(int(x) for x in off)
            if s not in self.types or t not in self.types or len(off) != self.dim:
                raise GeneratorError(f"bad edge template {(s, t, off)!r}", field="periodic.edges")
            if s == t and not any(off):
                raise GeneratorError("self-loop edge template", field="periodic.edges")
            canon.append((s, t, off))
        object.__setattr__(self, "edges", tuple(canon))
        object.__setattr__(self, "types", tuple(self.types))
        # the quotient graph on cell types must be connected
        seen, todo = {self.types[0]}, [self.types[0]]
        while todo:
            u = todo.pop()
            for s, t, _ in self.edges:
                for a, b in ((s, t), (t, s)):
                    if a == u and b not in seen:
                        seen.add(b)
                        todo.append(b)
        if len(seen) != len(self.types):
            raise GeneratorError("cell types do not form a connected quotient graph", field="periodic.edges")

    @property
    def root(self):
        return (self.types[0], (0,) * self.dim)

    def neighbors(self, node) -> list:
        typ, v = node
        out = []
        for s, t, off in self.edges:
            if s == typ:
                out.append((t, tuple(a + b for a, b in zip(v, off))))
            if t == typ:
                out.append((s, tuple(a - b for a, b in zip(v, off))))
        return out


LADDER = PeriodicGraph(1, ("cell",), (("cell", "cell", (1,)),))
GRID = PeriodicGraph(2, ("cell",), (("cell", "cell", (1, 0)), ("cell", "cell", (0, 1))))


class CantorTree:
    """Pants adjacency of the Cantor tree surface: the infinite 3-regular tree.

    Nodes are strings: ``"L"``/``"R"`` are the two pants of ``X_1``; each
    further pants appends ``"0"`` or ``"1"`` to its parent.
    """

    root = "L"
    roots = ("L", "R")

    @staticmethod
    def neighbors(node: str) -> list[str]:
        out = [node + "0", node + "1"]
        if len(node) == 1:
            out.append("R" if node == "L" else "L")
        else:
            out.append(node[:-1])
        return out

    @staticmethod
    def level(node: str) -> int:
        return len(node)


@dataclass(frozen=True)
class SurfaceSpec:
    family: str
    cuff_rule: CuffRule
    label: str = ""
    periodic: PeriodicGraph | None = None
    edges: tuple | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValidationError(f"unknown family {self.family!r}", field="family")
        if self.family == "custom_periodic" and self.periodic is None:
            raise ValidationError("custom_periodic requires a periodic graph", field="periodic")
        if self.family == "finite_table" and not self.edges:
            raise ValidationError("finite_table requires an explicit edge list", field="edges")

    def graph(self):
        if self.family == "cantor_tree":
            return CantorTree
        if self.family == "ladder_z_cover":
            return LADDER
        if self.family == "grid_z2_cover":
            return GRID
        if self.family == "custom_periodic":
            return self.periodic
        raise UnsupportedSurface("finite surfaces are outside the theory's scope", field="family")


@dataclass(frozen=True)
class ExhaustionLevel:
    n: int
    frontier_cuffs: int
    q_n: int
    bounded_pants: bool


@dataclass(frozen=True)
class BoundedPantsCertificate:
    bounded: bool
    status: str  # proved | sampled
    window: tuple[float, float]
    first_violation: int | None = None
    note: str = ""


# ---------------------------------------------------------------------------
# Frontier enumeration
# ---------------------------------------------------------------------------

def _explore(graph, start, ball: set, budget: int) -> tuple[bool, set]:
    """Explore the complement component of ``start``; (infinite?, cells seen)."""
    seen, todo = {start}, deque([start])
    while todo:
        if len(seen) > budget:
            return True, seen
        u = todo.popleft()
        for w in graph.neighbors(u):
            if w not in ball and w not in seen:
                seen.add(w)
                todo.append(w)
    return False, seen


def frontier_counts(graph, n_max: int, roots=None, budget: int = 4096) -> list[tuple[int, int]]:
    """Breadth-first exhaustion ``X_1 = roots``, ``X_{n+1} = X_n ∪ N(X_n)``.

    Returns ``(frontier_cuffs, q)`` per level, where ``frontier_cuffs`` counts
    edges leaving ``X_n`` and ``q`` counts the adjacent complement cells lying
    in an infinite complement component (found by exploring up to ``budget``
    cells; a component exhausted before that is finite and carries no end).
    """
    roots = tuple(roots) if roots is not None else tuple(getattr(graph, "roots", (graph.root,)))
    ball = set(roots)
    out = []
    for n in range(1, n_max + 1):
        if n > 1:
            ball |= {w for v in ball for w in graph.neighbors(v)}
        cuts = 0
        outside = set()
        for v in ball:
            for w in graph.neighbors(v):
                if w not in ball:
                    cuts += 1
                    outside.add(w)
        if not outside:
            raise GeneratorError(f"frontier empty at level {n}: graph is finite", field="periodic")
        infinite, finite = set(), set()
        for w in outside:
            if w in infinite or w in finite:
                continue
            is_inf, seen = _explore(graph, w, ball, budget)
            (infinite if is_inf else finite).update(seen)
        q = sum(1 for w in outside if w in infinite)
        if q == 0:
            raise GeneratorError(f"no infinite complement component at level {n}", field="periodic")
        out.append((cuts, q))
    return out


@lru_cache(maxsize=64)
def _custom_counts(graph: PeriodicGraph, n_max: int) -> tuple[tuple[int, int], ...]:
    return tuple(frontier_counts(graph, n_max))


def closed_form_counts(family: str, n: int) -> tuple[int, int]:
    """(frontier_cuffs, q) for the families with a closed form."""
    if family == "cantor_tree":
        return 2 ** (n + 1), 2 ** (n + 1)
    if family == "grid_z2_cover":
        return 8 * n - 4, 4 * n
    if family == "ladder_z_cover":
        return 2, 2
    raise ValueError(family)


def q_monomial(family: str) -> Monomial | None:
    """Symbolic q(n) for families with a closed form."""
    if family == "cantor_tree":
        return Monomial(2.0, 2.0)
    if family == "grid_z2_cover":
        return Monomial.power(4.0, 1.0)
    if family == "ladder_z_cover":
        return Monomial(2.0)
    return None


def exhaustion(spec: SurfaceSpec, n_max: int, window: float = 10.0) -> list[ExhaustionLevel]:
    if n_max < 1:
        raise ValidationError(f"n_max must be >= 1, got {n_max}", field="n")
    if spec.family == "finite_table":
        raise UnsupportedSurface("finite surfaces are outside the theory's scope", field="family")
    if spec.family == "custom_periodic":
        counts = list(_custom_counts(spec.periodic, n_max))
    else:
        counts = [closed_form_counts(spec.family, n) for n in range(1, n_max + 1)]
    levels = []
    inside = True
    for n, (cuts, q) in enumerate(counts, start=1):
        try:
            ell = spec.cuff_rule.level_length(n)
            inside = inside and (1.0 / window <= ell <= window)
        except ValidationError:
            pass  # table without this level: keep the last verdict
        levels.append(ExhaustionLevel(n=n, frontier_cuffs=cuts, q_n=q, bounded_pants=inside))
    return levels


def level_cuff_count(spec: SurfaceSpec, level: int) -> int:
    if spec.family == "finite_table":
        raise UnsupportedSurface("finite surfaces are outside the theory's scope", field="family")
    if spec.family == "custom_periodic":
        return _custom_counts(spec.periodic, level)[level - 1][0]
    return closed_form_counts(spec.family, level)[0]


def cuff_length(spec: SurfaceSpec, level: int, index: int = 0) -> float:
    """Length of cuff ``index`` (0-based) among the frontier cuffs of ``X_level``."""
    if level < 1:
        raise ValidationError(f"level must be >= 1, got {level}", field="level")
    count = level_cuff_count(spec, level)
    if not (0 <= index < count):
        raise IndexError(f"cuff index {index} outside 0..{count - 1} at level {level}")
    return spec.cuff_rule.level_length(level, index)


def _first_outside(m: Monomial, window: float) -> int | None:
    lo, hi = 1.0 / window, window
    for n in range(m.first_level, 4096):
        if not (lo <= m(n) <= hi):
            return n
    # monotone tail: bisect on the side the sequence is heading to
    onset = decreasing_onset(m) if m.tends_to_zero() else increasing_onset(m)
    if onset is None:
        return None
    a, b = max(onset, 4096), max(onset, 4096)
    inside = (lambda k: m(k) >= lo) if m.tends_to_zero() else (lambda k: m(k) <= hi)
    while inside(b):
        a, b = b, 2 * b
    while b - a > 1:
        mid = (a + b) // 2
        a, b = (mid, b) if inside(mid) else (a, mid)
    return b


def is_bounded_pants(spec: SurfaceSpec, probe_depth: int, window: float = 10.0) -> BoundedPantsCertificate:
    """Whether ``1/C <= l <= C`` for a fixed C at every cuff.

    Rules with a symbolic form are decided by their limit; tables count as
    proved only with declared bounds; anything else is sampled on levels
    ``1..probe_depth`` against ``[1/window, window]``.
    """
    if probe_depth < 1:
        raise ValidationError("probe_depth must be >= 1", field="depth")
    rule = spec.cuff_rule
    if rule.kind == "table":
        levels = [n for n in sorted(rule.table) if n <= probe_depth] or sorted(rule.table)[:1]
        vals = [rule.table[n] for n in levels]
        wit = (min(vals), max(vals))
        if rule.declared_bounds is not None:
            return BoundedPantsCertificate(True, "proved", wit, note="declared bounds")
        ok = all(1.0 / window <= v <= window for v in vals)
        bad = next((n for n in levels if not (1.0 / window <= rule.table[n] <= window)), None)
        return BoundedPantsCertificate(ok, "sampled", wit, bad)
    if rule.kind == "expression":
        vals = [rule.level_length(n) for n in range(1, probe_depth + 1)]
        wit = (min(vals), max(vals))
        if rule.declared_bounds is not None:
            return BoundedPantsCertificate(True, "proved", rule.declared_bounds, note="declared bounds")
        bad = next((n for n, v in enumerate(vals, 1) if not (1.0 / window <= v <= window)), None)
        return BoundedPantsCertificate(bad is None, "sampled", wit, bad)

    m = rule.monomial()
    vals = [m(n) for n in range(1, probe_depth + 1)]
    wit = (min(vals), max(vals))
    if m.rho == 1.0 and m.exponent == 0.0 and m.log_exp == 0.0:
        lo = min(wit[0], m.coef)
        hi = max(wit[1], m.coef)
        # shifted factors converge monotonically to coef, so the window is exact
        return BoundedPantsCertificate(True, "proved", (lo, hi))
    why = "lengths tend to 0" if m.tends_to_zero() else "lengths tend to infinity"
    return BoundedPantsCertificate(False, "proved", wit, _first_outside(m, window), note=why)


def iter_levels(spec: SurfaceSpec, n_max: int) -> Iterator[tuple[int, float]]:
    for n in range(1, n_max + 1):
        yield n, spec.cuff_rule.level_length(n)


def make_spec(family: str, rule: str, r: float | None = None, c: float | None = None, label: str = "") -> SurfaceSpec:
    """Shorthand used by the CLI and the scripts."""
    aliases = {"cantor": "cantor_tree", "grid": "grid_z2_cover", "ladder": "ladder_z_cover"}
    family = aliases.get(family, family)
    if rule == "constant":
        cr = CuffRule.constant(1.0 if c is None else c)
    elif rule in ("bhs", "bhs_decay"):
        cr = CuffRule.bhs_decay()
    elif rule == "power_over_exp":
        if r is None:
            raise ValidationError("power_over_exp needs --r", field="r")
        cr = CuffRule.power_over_exp(r)
    else:
        raise ValidationError(f"rule {rule!r} needs a spec file", field="rule")
    edges = (("p0", "p1"),) if family == "finite_table" else None
    return SurfaceSpec(family, cr, label or f"{family}/{rule}", edges=edges)
