"""Symbolic positive sequences and certified convergence tests.

A :class:`Monomial` is the sequence

    a_n = coef * rho**n * prod_k (n + k)**e_k * (log n)**log_exp

which covers every rule the classifier meets: constant cuffs, ``n/2^(n+1)``,
``(n+1)^r/2^(n+1)``, ``1/(4n)``, ``1/(n log^2 n)`` and their products.
Convergence of such a series is decided by an explicit comparison
certificate; raw partial sums never decide anything.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import mpmath

from .errors import PreconditionError, ValidationError

_SEARCH_CAP = 2**40
_FUZZ = 1e-12


@dataclass(frozen=True)
class Monomial:
    coef: float
    rho: float = 1.0
    powers: tuple[tuple[int, float], ...] = ()
    log_exp: float = 0.0

    def __post_init__(self):
        if not (self.coef > 0 and math.isfinite(self.coef)):
            raise ValidationError(f"coef must be positive and finite, got {self.coef!r}", field="coef")
        if not (self.rho > 0 and math.isfinite(self.rho)):
            raise ValidationError(f"rho must be positive and finite, got {self.rho!r}", field="rho")
        merged: dict[int, float] = {}
        for shift, e in self.powers:
            if shift < 0:
                raise ValidationError("power shifts must be >= 0", field="powers")
            merged[int(shift)] = merged.get(int(shift), 0.0) + float(e)
        canon = tuple(sorted((k, e) for k, e in merged.items() if e != 0.0))
        object.__setattr__(self, "powers", canon)

    @classmethod
    def power(cls, coef: float, exponent: float, shift: int = 0, rho: float = 1.0) -> "Monomial":
        return cls(coef, rho, ((shift, exponent),))

    @property
    def exponent(self) -> float:
        """Total polynomial degree E, so a_n ~ rho^n n^E (log n)^log_exp."""
        return sum(e for _, e in self.powers)

    @property
    def first_level(self) -> int:
        return 2 if self.log_exp != 0.0 else 1

    def log_value(self, n: int) -> float:
        out = math.log(self.coef) + n * math.log(self.rho)
        for k, e in self.powers:
            out += e * math.log(n + k)
        if self.log_exp:
            out += self.log_exp * math.log(math.log(n))
        return out

    def __call__(self, n: int) -> float:
        if n < self.first_level:
            raise ValidationError(f"level {n} below first level {self.first_level}", field="level")
        try:
            v = self.coef * self.rho**n
            for k, e in self.powers:
                v *= float(n + k) ** e
            if self.log_exp:
                v *= math.log(n) ** self.log_exp
        except OverflowError:
            v = math.inf
        if 1e-300 < v < 1e300:
            return v
        return math.exp(self.log_value(n))

    def __mul__(self, other: "Monomial | float") -> "Monomial":
        if isinstance(other, (int, float)):
            return Monomial(self.coef * other, self.rho, self.powers, self.log_exp)
        return Monomial(
            self.coef * other.coef,
            self.rho * other.rho,
            self.powers + other.powers,
            self.log_exp + other.log_exp,
        )

    __rmul__ = __mul__

    def __pow__(self, p: float) -> "Monomial":
        return Monomial(
            self.coef**p,
            self.rho**p,
            tuple((k, e * p) for k, e in self.powers),
            self.log_exp * p,
        )

    def reciprocal(self) -> "Monomial":
        return self ** -1.0

    def __truediv__(self, other: "Monomial | float") -> "Monomial":
        if isinstance(other, (int, float)):
            return self * (1.0 / other)
        return self * other.reciprocal()

    def __rtruediv__(self, other: float) -> "Monomial":
        return self.reciprocal() * other

    def summable(self) -> bool:
        if self.rho != 1.0:
            return self.rho < 1.0
        E = self.exponent
        return E < -1.0 or (E == -1.0 and self.log_exp < -1.0)

    def tends_to_zero(self) -> bool:
        if self.rho != 1.0:
            return self.rho < 1.0
        E = self.exponent
        return E < 0.0 or (E == 0.0 and self.log_exp < 0.0)

    def describe(self) -> str:
        parts = [f"{self.coef:.6g}"]
        if self.rho != 1.0:
            parts.append(f"{self.rho:.6g}^n")
        for k, e in self.powers:
            base = "n" if k == 0 else f"(n+{k})"
            parts.append(base if e == 1 else f"{base}^{e:.6g}")
        if self.log_exp:
            parts.append(f"(log n)^{self.log_exp:.6g}")
        return "*".join(parts)


@dataclass(frozen=True)
class Table:
    """Opaque finite sequence; ``values[0]`` is level ``start``."""

    values: tuple[float, ...]
    start: int = 1

    def __call__(self, n: int) -> float:
        i = n - self.start
        if not (0 <= i < len(self.values)):
            raise ValidationError(f"level {n} outside table", field="level")
        return self.values[i]

    @property
    def first_level(self) -> int:
        return self.start

    @property
    def last_level(self) -> int:
        return self.start + len(self.values) - 1


@dataclass(frozen=True)
class Opaque:
    """Arbitrary callable rule; never certified."""

    func: Callable[[int], float]
    first_level: int = 1

    def __call__(self, n: int) -> float:
        return float(self.func(n))


TermRule = Monomial | Table | Opaque


# ---------------------------------------------------------------------------
# Certificates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Certificate:
    """A checkable comparison inequality valid for every level >= ``onset``.

    kinds:
      harmonic_minorant      a_n >= constant / n
      log_harmonic_minorant  a_n >= constant / (n log n)
      ratio_majorant         a_{n+1} <= ratio * a_n
      power_majorant         a_n <= constant * n^exponent * (log n)^log_exponent
    """

    kind: str
    onset: int
    constant: float = 0.0
    ratio: float = 0.0
    exponent: float = 0.0
    log_exponent: float = 0.0

    def bound(self, n: int) -> float:
        if self.kind == "harmonic_minorant":
            return self.constant / n
        if self.kind == "log_harmonic_minorant":
            return self.constant / (n * math.log(n))
        if self.kind == "power_majorant":
            return self.constant * n**self.exponent * math.log(n) ** self.log_exponent
        raise ValueError(f"{self.kind} has no pointwise bound")

    def holds(self, term: Callable[[int], float], n: int) -> bool:
        if n < self.onset:
            raise ValueError(f"level {n} below onset {self.onset}")
        if self.kind == "ratio_majorant":
            lv = getattr(term, "log_value", None)
            if lv is not None:
                return lv(n + 1) - lv(n) <= math.log(self.ratio) + _FUZZ
            return term(n + 1) <= self.ratio * term(n) * (1 + _FUZZ)
        if self.kind == "power_majorant":
            return term(n) <= self.bound(n) * (1 + _FUZZ)
        return term(n) >= self.bound(n) * (1 - _FUZZ)

    def as_dict(self) -> dict:
        d = {"kind": self.kind, "onset": self.onset}
        if self.kind in ("harmonic_minorant", "log_harmonic_minorant", "power_majorant"):
            d["constant"] = self.constant
        if self.kind == "ratio_majorant":
            d["ratio"] = self.ratio
        if self.kind == "power_majorant":
            d["exponent"] = self.exponent
            d["log_exponent"] = self.log_exponent
        return d


@dataclass
class SeriesVerdict:
    kind: str  # Divergent | Convergent | Inconclusive
    depth: int
    partial_sum: float
    certificate: Certificate | None = None
    tail_bound: float = math.inf
    notes: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "depth": self.depth,
            "partial_sum": self.partial_sum,
            "tail_bound": self.tail_bound,
            "certificate": None if self.certificate is None else self.certificate.as_dict(),
            "notes": list(self.notes),
        }


def _neg_shift_sum(m: Monomial, N: int, sign: int) -> float:
    """sum over shifts with sign(e_k) == sign of |e_k| k / (N + k)."""
    return sum(abs(e) * k / (N + k) for k, e in m.powers if (e > 0) == (sign > 0) and k)


def _double_search(pred: Callable[[int], bool], start: int) -> int | None:
    n = max(start, 1)
    while n <= _SEARCH_CAP:
        if pred(n):
            return n
        n *= 2
    return None


def decreasing_onset(m: Monomial) -> int | None:
    """Level from which ``m`` is nonincreasing, or None if not found.

    Uses x d/dx log a(x) = x log rho + E - sum e_k k/(x+k) + L/log x and a
    bound on each piece that is monotone in x.
    """
    E, L = m.exponent, m.log_exp
    lr = math.log(m.rho)

    def ok(N: int) -> bool:
        if N < 2:
            return False
        upper = N * lr + E + _neg_shift_sum(m, N, -1) + max(L, 0.0) / math.log(N)
        return upper <= 0.0

    if lr > 0 or (lr == 0 and (E > 0 or (E == 0 and L > 0))):
        return None
    return _double_search(ok, max(2, m.first_level))


def increasing_onset(m: Monomial, extra: float = 0.0) -> int | None:
    """Level from which ``n**extra * m(n)`` is nondecreasing, or None."""
    E, L = m.exponent + extra, m.log_exp
    lr = math.log(m.rho)

    def ok(N: int) -> bool:
        if N < 2:
            return False
        lower = N * lr + E - _neg_shift_sum(m, N, +1) + min(L, 0.0) / math.log(N)
        return lower >= 0.0

    if lr < 0 or (lr == 0 and (E < 0 or (E == 0 and L < 0))):
        return None
    return _double_search(ok, max(2, m.first_level))


def _shift_factor_min(m: Monomial, N: int) -> float:
    """Lower bound over n >= N of prod_k (1 + k/n)^e_k."""
    out = 1.0
    for k, e in m.powers:
        if k and e < 0:
            out *= (1.0 + k / N) ** e
    return out


def _shift_factor_max(m: Monomial, N: int) -> float:
    """Upper bound over n >= N of prod_k (1 + k/n)^e_k."""
    out = 1.0
    for k, e in m.powers:
        if k and e > 0:
            out *= (1.0 + k / N) ** e
    return out


def divergence_certificate(m: Monomial) -> Certificate | None:
    if m.summable():
        return None
    E, L = m.exponent, m.log_exp
    if m.rho > 1.0 or (m.rho == 1.0 and E > -1.0):
        # n * a_n eventually nondecreasing, hence a_n >= N a_N / n
        N = increasing_onset(m, extra=1.0)
        if N is None:
            return None
        return Certificate("harmonic_minorant", onset=N, constant=N * m(N))
    # rho == 1 and E == -1 with log exponent >= -1
    N = max(3, m.first_level)
    shift = _shift_factor_min(m, N)
    if L >= 0.0:
        return Certificate("harmonic_minorant", onset=N, constant=m.coef * shift * math.log(N) ** L)
    return Certificate(
        "log_harmonic_minorant", onset=N, constant=m.coef * shift * math.log(N) ** (L + 1.0)
    )


def convergence_certificate(m: Monomial, start: int = 1) -> Certificate | None:
    if not m.summable():
        return None
    if m.rho < 1.0:
        lr = math.log(m.rho)

        def kappa(N: int) -> float:
            k = lr
            for s, e in m.powers:
                if e > 0:
                    k += e * math.log1p(1.0 / (N + s))
            if m.log_exp > 0:
                k += m.log_exp * math.log(math.log(N + 1) / math.log(N))
            return math.exp(k)

        N = _double_search(lambda n: n >= 2 and kappa(n) < 1.0, max(start, 2, m.first_level))
        if N is None:
            return None
        # smallest admissible onset at or above start, refined linearly down
        lo = max(start, 2, m.first_level)
        while N > lo and kappa(N - 1) < 1.0:
            N -= 1
        return Certificate("ratio_majorant", onset=N, ratio=kappa(N))
    E, L = m.exponent, m.log_exp
    N = max(3, m.first_level, start)
    if L > 0:
        # x^E (log x)^L decreasing once log x > L / (-E)
        N = max(N, math.ceil(math.exp(L / -E)) + 1)
    A = m.coef * _shift_factor_max(m, N)
    return Certificate("power_majorant", onset=N, constant=A, exponent=E, log_exponent=L)


def majorant_tail(cert: Certificate, term: Monomial, N: int) -> float:
    """Upper bound on sum_{n > N} a_n for ``N >= cert.onset``."""
    if N < cert.onset:
        raise ValueError("tail requested below certificate onset")
    if cert.kind == "ratio_majorant":
        return term(N + 1) / (1.0 - cert.ratio)
    if cert.kind != "power_majorant":
        raise ValueError(f"{cert.kind} gives no tail bound")
    E, L, A = cert.exponent, cert.log_exponent, cert.constant
    if E == -1.0:
        s = -L
        return A * math.log(N) ** (1.0 - s) / (s - 1.0)
    if L == 0.0:
        return A * N ** (E + 1.0) / (-E - 1.0)
    # int_N^inf x^E (log x)^L dx = (-E-1)^(-L-1) * Gamma(L+1, (-E-1) log N)
    c = -E - 1.0
    val = mpmath.gammainc(L + 1.0, c * math.log(N)) * mpmath.power(c, -L - 1.0)
    return A * float(val)


def partial_sum(term: Callable[[int], float], first: int, last: int) -> float:
    return math.fsum(term(n) for n in range(first, last + 1))


def series_divergence(term: TermRule, depth: int) -> SeriesVerdict:
    """Decide sum_n term(n) by a comparison certificate.

    ``partial_sum`` covers levels ``first_level..depth``; for a convergent
    verdict ``tail_bound`` bounds the remainder past ``depth``.
    """
    if depth < 10:
        raise PreconditionError(f"depth must be >= 10, got {depth}", field="depth")
    if isinstance(term, Table):
        last = min(depth, term.last_level)
        ps = partial_sum(term, term.first_level, last)
        return SeriesVerdict("Inconclusive", depth, ps, notes=["opaque table: no comparison certificate"])
    if isinstance(term, Opaque):
        ps = partial_sum(term, term.first_level, depth)
        return SeriesVerdict("Inconclusive", depth, ps, notes=["opaque rule: no comparison certificate"])

    ps = partial_sum(term, term.first_level, depth)
    if term.summable():
        cert = convergence_certificate(term, start=depth)
        if cert is None:
            return SeriesVerdict("Inconclusive", depth, ps, notes=["no majorant onset found"])
        gap = partial_sum(term, depth + 1, cert.onset) if cert.onset > depth else 0.0
        tail = gap + majorant_tail(cert, term, max(depth, cert.onset))
        return SeriesVerdict("Convergent", depth, ps, cert, tail)
    cert = divergence_certificate(term)
    if cert is None:
        return SeriesVerdict("Inconclusive", depth, ps, notes=["no minorant onset found"])
    return SeriesVerdict("Divergent", depth, ps, cert)


def replay(cert: Certificate, term: Callable[[int], float], levels: Sequence[int]) -> list[int]:
    """Levels (>= onset) at which the certificate inequality fails."""
    return [n for n in levels if n >= cert.onset and not cert.holds(term, n)]


def sum_verdicts(parts: Mapping[str, SeriesVerdict]) -> str:
    """Combine verdicts of nonnegative series added termwise."""
    kinds = [v.kind for v in parts.values()]
    if "Divergent" in kinds:
        return "Divergent"
    if all(k == "Convergent" for k in kinds):
        return "Convergent"
    return "Inconclusive"
