"""Command-line interface: ``pantslab <verb> [flags]``.

Exit codes: 0 success, 2 invalid input (the message names the field),
1 numerical or resource failure. Numbers are printed with 17 significant
digits.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import yaml

from . import criteria, extremal, foliation, hyptrig, probe
from .errors import PantsLabError, ValidationError
from .sequences import Monomial, Table
from .surface import CuffRule, PeriodicGraph, SurfaceSpec, exhaustion, make_spec

FORMATS = ("json", "csv", "text")


def fmt(x) -> str:
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def _json(obj) -> str:
    return json.dumps(criteria._jsonable(obj), indent=2, sort_keys=True, allow_nan=False)


def _text(d: dict, prefix: str = "") -> str:
    lines = []
    for k, v in d.items():
        if isinstance(v, dict):
            lines.append(_text(v, f"{prefix}{k}."))
        else:
            lines.append(f"{prefix}{k}: {fmt(v)}")
    return "\n".join(lines)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) for x in row])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Surface spec files
# ---------------------------------------------------------------------------

def spec_from_dict(d: dict) -> SurfaceSpec:
    """Build a SurfaceSpec from the documented file layout::

        family: cantor_tree
        label: optional text
        rule: {kind: power_over_exp, params: {r: 3}}
        periodic: {dim: 2, types: [a], edges: [[a, a, [1, 0]], ...]}   # custom_periodic
        edges: [[p0, p1], ...]                                        # finite_table
    """
    if not isinstance(d, dict):
        raise ValidationError("spec file must contain a mapping", field="spec")
    if "family" not in d:
        raise ValidationError("missing key", field="family")
    rule = d.get("rule")
    if not isinstance(rule, dict) or "kind" not in rule:
        raise ValidationError("missing rule.kind", field="rule.kind")
    params = rule.get("params") or {}
    if not isinstance(params, dict):
        raise ValidationError("rule.params must be a mapping", field="rule.params")
    known = {"c", "r", "table", "declared_bounds"}
    extra = set(params) - known
    if extra:
        raise ValidationError(f"unknown parameter(s) {sorted(extra)}", field="rule.params")
    try:
        cuff = CuffRule(
            rule["kind"],
            c=None if params.get("c") is None else float(params["c"]),
            r=None if params.get("r") is None else float(params["r"]),
            table=params.get("table"),
            declared_bounds=tuple(params["declared_bounds"]) if params.get("declared_bounds") else None,
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(str(exc), field="rule.params") from exc
    periodic = None
    if d.get("periodic") is not None:
        p = d["periodic"]
        try:
            periodic = PeriodicGraph(int(p["dim"]), tuple(p["types"]), tuple((s, t, tuple(o)) for s, t, o in p["edges"]))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ValidationError(f"malformed periodic graph: {exc}", field="periodic") from exc
    edges = tuple(tuple(e) for e in d["edges"]) if d.get("edges") else None
    return SurfaceSpec(d["family"], cuff, str(d.get("label", "")), periodic, edges)


def load_spec(path: str) -> SurfaceSpec:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}", field="spec") from exc
    try:
        data = json.loads(text) if p.suffix == ".json" else yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ValidationError(f"cannot parse {path}: {exc}", field="spec") from exc
    return spec_from_dict(data)


def _spec(args) -> SurfaceSpec:
    if args.spec:
        return load_spec(args.spec)
    if not args.family:
        raise ValidationError("give --family (and --rule) or --spec", field="family")
    return make_spec(args.family, args.rule or "constant", r=args.r, c=args.c)


# ---------------------------------------------------------------------------
# Verbs
# ---------------------------------------------------------------------------

def _need(value, name: str):
    if value is None:
        raise ValidationError(f"--{name} is required", field=name)
    return value


def cmd_classify(args) -> str:
    v = criteria.classify(_spec(args), depth=args.depth, strict_equality=args.strict_equality)
    if args.format == "json":
        return v.to_json()
    if args.format == "csv":
        return _csv(["kind", "rule"], [[v.kind, v.rule]])
    return f"{v.kind} ({v.rule})"


def cmd_energy(args) -> str:
    r = float(_need(args.r, "r"))
    series = foliation.cantor_energy_series(r, args.n or 200, mode=args.mode)
    if args.format == "csv":
        return series.to_csv()
    if args.format == "json":
        return _json(series.as_dict())
    return _text(series.as_dict())


def cmd_trig(args) -> str:
    cuffs = hyptrig.CuffLengths(float(_need(args.l_in, "l-in")), float(_need(args.l_out, "l-out")))
    geom = hyptrig.hexagon_geometry(cuffs)
    d = {k: getattr(geom, k) for k in ("o12", "o23", "a", "t", "b", "gap")}
    d["max_residual"] = max(hyptrig.residuals(geom, cuffs).values())
    if args.format == "json":
        return _json(d)
    if args.format == "csv":
        return _csv(list(d), [list(d.values())])
    return _text(d)


def cmd_qseq(args) -> str:
    spec = _spec(args)
    n = int(_need(args.n, "n"))
    levels = exhaustion(spec, n)
    if args.format == "json":
        return _json([{"n": x.n, "q": x.q_n, "frontier_cuffs": x.frontier_cuffs} for x in levels])
    if args.format == "csv":
        return _csv(["n", "q", "frontier_cuffs"], [[x.n, x.q_n, x.frontier_cuffs] for x in levels])
    return ",".join(str(x.q_n) for x in levels)


def cmd_series(args) -> str:
    """Certified verdict on sum 1/q(n) for the chosen family."""
    spec = _spec(args)
    q = criteria._q_rule(spec, args.depth)
    inv = q.reciprocal() if isinstance(q, Monomial) else Table(tuple(1.0 / v for v in q.values))
    v = criteria.series_divergence(inv, args.depth)
    d = v.as_dict()
    if args.format == "json":
        return _json(d)
    if args.format == "csv":
        return _csv(["kind", "depth", "partial_sum", "tail_bound"], [[v.kind, v.depth, v.partial_sum, v.tail_bound]])
    return _text(d)


def _parse_pairs(text: str) -> extremal.ExtSample:
    pairs = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            y, z = (float(x) for x in chunk.split(","))
        except ValueError as exc:
            raise ValidationError(f"bad pair {chunk!r}; expected ext_Y,ext_Z", field="pairs") from exc
        pairs.append((y, z))
    return extremal.ExtSample.from_list(pairs)


def cmd_extremal(args) -> str:
    d = {}
    if args.pairs is not None:
        d["kerckhoff_lower_bound"] = extremal.kerckhoff_lower_bound(_parse_pairs(args.pairs))
    if args.annulus is not None:
        r1, r2 = (float(x) for x in args.annulus)
        d["annulus_modulus"] = extremal.annulus_modulus(extremal.Annulus(r1, r2))
    if args.K is not None:
        lo, hi = extremal.qc_modulus_bounds(args.K, float(_need(args.mod, "mod")))
        d["qc_modulus_lower"], d["qc_modulus_upper"] = lo, hi
    if not d:
        raise ValidationError("give --pairs, --annulus or --K/--mod", field="pairs")
    if args.format == "json":
        return _json(d)
    if args.format == "csv":
        return _csv(list(d), [list(d.values())])
    return _text(d)


def cmd_probe(args) -> str:
    cfg = probe.WalkConfig(_spec(args), steps=args.steps, trials=args.trials, seed=args.seed)
    rep = probe.run_walk(cfg)
    if args.format == "csv":
        return rep.to_csv()
    if args.format == "json":
        return rep.to_json()
    return f"{probe.HEURISTIC}\n" + _text(rep.summary())


VERBS = {
    "classify": cmd_classify,
    "energy": cmd_energy,
    "trig": cmd_trig,
    "qseq": cmd_qseq,
    "series": cmd_series,
    "extremal": cmd_extremal,
    "probe": cmd_probe,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message, field="arguments")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--family")
    common.add_argument("--rule")
    common.add_argument("--r", type=float)
    common.add_argument("--c", type=float)
    common.add_argument("--spec", help="YAML or JSON surface spec file")
    common.add_argument("--depth", type=int, default=50)
    common.add_argument("--n", type=int)
    common.add_argument("--steps", type=int, default=10_000)
    common.add_argument("--trials", type=int, default=1_000)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=FORMATS, default="text")
    common.add_argument("--out")
    common.add_argument("--strict-equality", action="store_true")
    common.add_argument("--mode", choices=("asymptotic", "exact"), default="asymptotic")
    common.add_argument("--l-in", type=float)
    common.add_argument("--l-out", type=float)
    common.add_argument("--pairs", help="ext_Y,ext_Z pairs separated by ';'")
    common.add_argument("--annulus", nargs=2, metavar=("R1", "R2"))
    common.add_argument("--K", type=float)
    common.add_argument("--mod", type=float)

    parser = _Parser(prog="pantslab", description="Parabolicity tools for pants-decomposed surfaces.")
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb, fn in VERBS.items():
        sub.add_parser(verb, parents=[common], help=(fn.__doc__ or "").strip().split("\n")[0] or None)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        out = VERBS[args.verb](args)
        if not out.endswith("\n"):
            out += "\n"
        if args.out:
            Path(args.out).write_text(out)
        else:
            sys.stdout.write(out)
        return 0
    except ValidationError as exc:
        where = f" [{exc.field}]" if exc.field else ""
        print(f"error{where}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (PantsLabError, ArithmeticError, OverflowError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error [out]: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
