"""Conformal moduli, extremal-length scaling and a sampled Teichmüller lower bound."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from .errors import DomainError, EmptySample


@dataclass(frozen=True)
class Annulus:
    """Round annulus ``r1 < |z| < r2``; ``r1 = 0`` and ``r2 = inf`` are allowed."""

    r1: float
    r2: float

    def __post_init__(self):
        if not (self.r1 >= 0 and math.isfinite(self.r1)):
            raise DomainError("r1 must be finite and >= 0", field="r1")
        if not (self.r2 > self.r1):
            raise DomainError("need r1 < r2", field="r2")


def annulus_modulus(a: Annulus) -> float:
    if a.r1 == 0.0 or math.isinf(a.r2):
        return math.inf
    return math.log(a.r2 / a.r1) / (2.0 * math.pi)


def _positive(value: float, name: str) -> float:
    if not (value > 0 and math.isfinite(value)):
        raise DomainError(f"{name} must be positive and finite, got {value!r}", field=name)
    return float(value)


def cylinder_modulus(height: float, circumference: float) -> float:
    return _positive(height, "height") / _positive(circumference, "circumference")


def ext_scale(r: float, ext: float) -> float:
    """Extremal length of the weighted curve ``r * gamma``."""
    return _positive(r, "r") ** 2 * _positive(ext, "ext")


def qc_modulus_bounds(K: float, mod: float) -> tuple[float, float]:
    """Interval containing the modulus of the image of an annulus under a K-qc map."""
    if not (K >= 1 and math.isfinite(K)):
        raise DomainError("K must be >= 1", field="K")
    mod = _positive(mod, "mod")
    return mod / K, K * mod


@dataclass(frozen=True)
class ExtSample:
    """Extremal lengths of finitely many curves on two marked surfaces,
    keyed by curve label: ``pairs[label] = (ext_Y, ext_Z)``."""

    pairs: Mapping[str, tuple[float, float]]

    def __post_init__(self):
        clean = {}
        for label, pair in dict(self.pairs).items():
            y, z = pair
            clean[str(label)] = (_positive(y, "ext_Y"), _positive(z, "ext_Z"))
        object.__setattr__(self, "pairs", clean)

    @classmethod
    def from_list(cls, pairs) -> "ExtSample":
        return cls({f"c{i}": tuple(p) for i, p in enumerate(pairs)})

    def swapped(self) -> "ExtSample":
        return ExtSample({k: (z, y) for k, (y, z) in self.pairs.items()})

    def extended(self, other: "ExtSample") -> "ExtSample":
        return ExtSample({**self.pairs, **other.pairs})


def kerckhoff_lower_bound(sample: ExtSample) -> float:
    """Half the log of the largest extremal-length distortion in the sample.

    Each pair contributes ``|log(ext_Z / ext_Y)|``, so the value is symmetric
    in the two surfaces and never negative. Because only finitely many curves
    are seen, the result is a lower bound on the Teichmüller distance.
    """
    if not sample.pairs:
        raise EmptySample("need at least one curve", field="sample")
    worst = max(abs(math.log(z) - math.log(y)) for y, z in sample.pairs.values())
    return 0.5 * worst
