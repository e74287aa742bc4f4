"""HEURISTIC random-walk recurrence probe on the pants adjacency graph.

The walk sees only the combinatorics of the pants decomposition, never the
cuff lengths, so it reflects graph recurrence. That matches parabolicity
only under bounded geometry; with degenerating cuffs the two can disagree.

Every trial draws from its own substream ``SeedSequence(seed, spawn_key=(trial,))``,
so results do not depend on how trials are batched or threaded. The three
built-in families use vectorised kernels; custom graphs and custom
conductances go through a generic walker that follows the same convention
(neighbour ``i`` is picked when the uniform draw falls in its cumulative
weight slot).
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ResourceError, ValidationError
from .surface import CantorTree, SurfaceSpec

HEURISTIC = "HEURISTIC"
QUANTILES = (0.1, 0.25, 0.5, 0.75, 0.9)
DEFAULT_NODE_CAP = 10**6
_BLOCK = 128


@dataclass(frozen=True)
class WalkConfig:
    spec: SurfaceSpec
    steps: int
    trials: int
    seed: int = 0
    # "uniform", or a callable (node, neighbour) -> positive weight
    conductance: str | Callable = "uniform"
    node_cap: int = DEFAULT_NODE_CAP

    def __post_init__(self):
        if int(self.steps) != self.steps or self.steps < 1:
            raise ValidationError("steps must be a positive integer", field="steps")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ValidationError("trials must be a positive integer", field="trials")
        if not (0 <= int(self.seed) < 2**64):
            raise ValidationError("seed must be a 64-bit unsigned integer", field="seed")
        if self.conductance != "uniform" and not callable(self.conductance):
            raise ValidationError("conductance must be 'uniform' or a callable", field="conductance")
        if self.node_cap < 1:
            raise ValidationError("node_cap must be positive", field="node_cap")
        self.spec.graph()  # UnsupportedSurface for finite tables


@dataclass
class WalkReport:
    family: str
    steps: int
    trials: int
    seed: int
    returned: np.ndarray
    max_level: np.ndarray
    label: str = HEURISTIC
    quantiles: dict = field(default_factory=dict)

    @property
    def return_fraction(self) -> float:
        return float(np.count_nonzero(self.returned)) / self.trials

    @property
    def mean_max_level(self) -> float:
        return float(np.sum(self.max_level, dtype=np.int64)) / self.trials

    @property
    def standard_error(self) -> float:
        p = self.return_fraction
        return math.sqrt(max(p * (1 - p), 0.0) / self.trials)

    def summary(self) -> dict:
        return {
            "label": self.label,
            "family": self.family,
            "steps": self.steps,
            "trials": self.trials,
            "seed": self.seed,
            "return_fraction": self.return_fraction,
            "standard_error": self.standard_error,
            "mean_max_level": self.mean_max_level,
            "max_level_quantiles": {f"{q:g}": v for q, v in self.quantiles.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["trial", "returned", "max_level"])
        for i, (r, m) in enumerate(zip(self.returned, self.max_level)):
            w.writerow([i, int(r), int(m)])
        return buf.getvalue()


def thread_count() -> int:
    raw = os.environ.get("PANTSLAB_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, min(n, os.cpu_count() or 1))


def _draws(seed: int, trials: range, steps: int) -> np.ndarray:
    out = np.empty((len(trials), steps))
    for row, t in enumerate(trials):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(t,)))
        out[row] = rng.random(steps)
    return out


# --- vectorised kernels; neighbour order matches surface.*.neighbors ---------

def _ladder(u: np.ndarray):
    pos = np.cumsum(np.where(u < 0.5, 1, -1), axis=1, dtype=np.int64)
    return (pos == 0).any(axis=1), np.abs(pos).max(axis=1) + 1


_GRID_STEPS = np.array([(1, 0), (-1, 0), (0, 1), (0, -1)], dtype=np.int64)


def _grid(u: np.ndarray):
    d = _GRID_STEPS[np.minimum((u * 4).astype(np.int64), 3)]
    x = np.cumsum(d[..., 0], axis=1)
    y = np.cumsum(d[..., 1], axis=1)
    back = ((x == 0) & (y == 0)).any(axis=1)
    return back, (np.abs(x) + np.abs(y)).max(axis=1) + 1


def _cantor(u: np.ndarray):
    # state (depth, side); neighbours are child0, child1, then parent or the other root
    c = np.minimum((u * 3).astype(np.int8), 2)
    B, steps = u.shape
    depth = np.ones(B, dtype=np.int64)
    side = np.zeros(B, dtype=np.int8)
    back = np.zeros(B, dtype=bool)
    top = depth.copy()
    for s in range(steps):
        up = c[:, s] == 2
        swap = up & (depth == 1)
        side ^= swap.astype(np.int8)
        depth += np.where(up, np.where(swap, 0, -1), 1)
        back |= (depth == 1) & (side == 0)
        np.maximum(top, depth, out=top)
    return back, top


_KERNELS = {"ladder_z_cover": _ladder, "grid_z2_cover": _grid, "cantor_tree": _cantor}


def _node_level(node) -> int:
    if isinstance(node, str):
        return CantorTree.level(node)
    return sum(abs(x) for x in node[1]) + 1


def _generic(u: np.ndarray, graph, conductance, node_cap: int):
    B, steps = u.shape
    back = np.zeros(B, dtype=bool)
    top = np.ones(B, dtype=np.int64)
    start = graph.root
    for b in range(B):
        node, seen, best = start, {start}, 1
        for s in range(steps):
            nbrs = graph.neighbors(node)
            if conductance == "uniform":
                i = min(int(u[b, s] * len(nbrs)), len(nbrs) - 1)
            else:
                w = np.array([float(conductance(node, v)) for v in nbrs])
                if not np.all(w > 0):
                    raise ValidationError("conductances must be positive", field="conductance")
                cum = np.cumsum(w) / w.sum()
                i = min(int(np.searchsorted(cum, u[b, s], side="right")), len(nbrs) - 1)
            node = nbrs[i]
            if node not in seen:
                seen.add(node)
                if len(seen) > node_cap:
                    raise ResourceError(f"walk materialised more than {node_cap} nodes")
            back[b] |= node == start
            best = max(best, _node_level(node))
        top[b] = best
    return back, top


def run_walk(config: WalkConfig, use_kernels: bool = True) -> WalkReport:
    """Simple random walk from the base pants; counts trials that revisit it.

    A trial can create at most ``steps + 1`` nodes, so the vectorised
    kernels refuse configurations whose step count alone breaks the cap.
    """
    spec = config.spec
    graph = spec.graph()
    kernel = _KERNELS.get(spec.family) if (use_kernels and config.conductance == "uniform") else None
    if kernel is not None and config.steps + 1 > config.node_cap:
        raise ResourceError(f"steps={config.steps} may materialise more than node_cap={config.node_cap} nodes")

    blocks = [range(i, min(i + _BLOCK, config.trials)) for i in range(0, config.trials, _BLOCK)]

    def work(block: range):
        u = _draws(int(config.seed), block, config.steps)
        if kernel is not None:
            return kernel(u)
        return _generic(u, graph, config.conductance, config.node_cap)

    workers = thread_count()
    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(work, blocks))
    else:
        parts = [work(b) for b in blocks]
    returned = np.concatenate([p[0] for p in parts]).astype(bool)
    max_level = np.concatenate([p[1] for p in parts]).astype(np.int64)
    q = np.quantile(max_level, QUANTILES, method="lower")
    return WalkReport(
        family=spec.family,
        steps=config.steps,
        trials=config.trials,
        seed=int(config.seed),
        returned=returned,
        max_level=max_level,
        quantiles={qq: int(v) for qq, v in zip(QUANTILES, q)},
    )
