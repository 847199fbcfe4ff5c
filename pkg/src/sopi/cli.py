"""``sopi`` command line.

Exit status: 0 success, 2 usage or validation error, 3 domain failure
(insufficient palette, assignment violations, failed audit or bound check).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path
from typing import Any

from . import design as design_mod
from .core import PrefixSpec, Sopi, prefix, symbol_id_at
from .design import DesignParams, SopiSet, audit_sopi_set, build_sopi_set, capacity_bounds
from .distribution import Assignment, InsufficientPaletteError, NodeGraph, greedy_color, validate_assignment
from .experiments import (
    TrialConfig,
    designed_overlap_experiment,
    estimate_failure_probability,
    iter_trials,
    simulate_multi_source_download,
)
from .large_object import block_structure
from .modarith import MERSENNE31, FieldParams
from .overlap import distance

EXIT_USAGE = 2
EXIT_DOMAIN = 3

GRID_N = (10007, MERSENNE31)
GRID_DELTA = (0.1, 0.3)
GRID_S = (2, 4, 8)
# largest round K keeping M = K/(1-delta) within M^2 <= 2N for delta <= 0.3 at N=10007
GRID_K = {10007: 90, MERSENNE31: 1000}


class DomainFailure(Exception):
    pass


def _emit(args: argparse.Namespace, payload: Any, text: str, rows: list[dict] | None = None) -> None:
    if args.format == "json":
        out = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    elif args.format == "csv":
        buf = io.StringIO()
        rows = rows if rows is not None else [payload] if isinstance(payload, dict) else []
        if rows:
            flat = [{k: json.dumps(v) if isinstance(v, (dict, list)) else v for k, v in r.items()} for r in rows]
            writer = csv.DictWriter(buf, fieldnames=list(flat[0]), lineterminator="\n")
            writer.writeheader()
            writer.writerows(flat)
        out = buf.getvalue()
    else:
        out = text.rstrip("\n") + "\n"
    if args.out:
        Path(args.out).write_text(out)
    else:
        sys.stdout.write(out)


def _table(rows: list[dict], columns: list[str]) -> str:
    cells = [[str(r[c]) for c in columns] for r in rows]
    widths = [max(len(c), *(len(row[k]) for row in cells)) for k, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths))]
    lines += ["  ".join(v.rjust(w) for v, w in zip(row, widths)) for row in cells]
    return "\n".join(lines)


def _kv(items: dict) -> str:
    width = max(len(k) for k in items)
    return "\n".join(f"{k.ljust(width)}  {v}" for k, v in items.items())


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ValueError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: invalid JSON ({exc})") from None


def _params(args: argparse.Namespace) -> FieldParams:
    return FieldParams(args.n)


def cmd_eval(args: argparse.Namespace) -> int:
    params = _params(args)
    sopi = Sopi(args.a, args.b).check(params)
    if args.pos is not None:
        j = symbol_id_at(sopi, args.pos, params)
        _emit(args, {"A": sopi.A, "B": sopi.B, "N": params.N, "pos": args.pos, "symbol_id": j}, str(j))
    else:
        ids = prefix(PrefixSpec(sopi, args.len), params)
        rows = [{"pos": i, "symbol_id": j} for i, j in enumerate(ids)]
        _emit(args, {"A": sopi.A, "B": sopi.B, "N": params.N, "ids": ids}, " ".join(map(str, ids)), rows)
    return 0


def cmd_distance(args: argparse.Namespace) -> int:
    params = _params(args)
    res = distance(args.b0, args.b1, args.m, params)
    payload = {"B0": args.b0, "B1": args.b1, "M": args.m, "N": params.N, **res.to_json()}
    text = f"distance {res.distance} pair ({res.d0},{res.d1})" if res.matched else f"distance {res.distance} unmatched"
    _emit(args, payload, text)
    return 0


def cmd_genset(args: argparse.Namespace) -> int:
    params = _params(args)
    dp = DesignParams(params, args.d, args.m)
    sopi_set = build_sopi_set(dp, args.b_cap, args.a_cap, args.seed, args.strategy)
    caps = capacity_bounds(dp)
    problems = audit_sopi_set(sopi_set) if args.audit else []
    doc = sopi_set.to_json()
    if args.format == "text":
        summary = {
            "N": params.N,
            "d": dp.d,
            "M": dp.M,
            "strategy": args.strategy,
            "strides": len(sopi_set.b_values),
            "sopis": len(sopi_set),
            "b_lower": f"{caps['b_lower']:.6g}",
            "a_lower": f"{caps['a_lower']:.6g}",
            "total_lower": f"{caps['total_lower']:.6g}",
        }
        if args.audit:
            summary["audit"] = "ok" if not problems else f"{len(problems)} violations"
        text = _kv(summary) + "".join(f"\n  {p}" for p in problems)
        sys.stdout.write(text + "\n")
        if args.out:
            Path(args.out).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    else:
        rows = [{"A": e["A"], "B": e["B"]} for e in doc["entries"]]
        _emit(args, doc, "", rows)
    if problems:
        for p in problems:
            print(f"audit: {p}", file=sys.stderr)
        raise DomainFailure(f"audit found {len(problems)} violations")
    return 0


def cmd_partition(args: argparse.Namespace) -> int:
    bs = block_structure(args.f, args.t, args.ws, args.kmax_limit)
    doc = bs.to_json()
    _emit(args, doc, " ".join(f"{k}={v}" for k, v in doc.items()))
    return 0


def cmd_color(args: argparse.Namespace) -> int:
    graph = NodeGraph.from_json(_load_json(args.graph))
    if args.validate:
        assignment = Assignment.from_json(_load_json(args.validate))
        bad = validate_assignment(graph, assignment)
        payload = {"violations": [list(e) for e in bad], "colors_used": assignment.colors_used}
        text = "ok" if not bad else "\n".join(f"violation {a} {b}" for a, b in bad)
        _emit(args, payload, text, [{"a": a, "b": b} for a, b in bad])
        if bad:
            raise DomainFailure(f"{len(bad)} edges share a SOPI")
        return 0
    if not args.set:
        raise ValueError("--set is required unless --validate is given")
    palette = SopiSet.from_json(_load_json(args.set)).entries()
    assignment = greedy_color(graph, palette)
    doc = assignment.to_json()
    rows = [{"node": n, **s} for n, s in doc["assignments"].items()]
    text = _table(rows, ["node", "A", "B"]) + f"\ncolors_used {doc['colors_used']}" if rows else "colors_used 0"
    _emit(args, doc, text, rows)
    return 0


def _random_configs(args: argparse.Namespace) -> list[TrialConfig]:
    if args.grid:
        return [
            TrialConfig(GRID_K[n], delta, s, args.trials, args.seed, args.split, FieldParams(n))
            for n in GRID_N
            for delta in GRID_DELTA
            for s in GRID_S
        ]
    if args.k is None:
        raise ValueError("--k is required for --kind random (or use --grid)")
    return [TrialConfig(args.k, args.delta, args.s, args.trials, args.seed, args.split, _params(args))]


def _strip_time(doc: dict, keep: bool) -> dict:
    if not keep:
        doc.pop("wall_time", None)
    return doc


def cmd_experiment(args: argparse.Namespace) -> int:
    if args.kind == "random":
        configs = _random_configs(args)
        if args.format == "csv" and not args.grid:
            cfg = configs[0]
            rows = [
                {"trial": t, "distinct": d, "duplicates": cfg.M - d, "recoverable": int(d >= cfg.K)}
                for t, d in iter_trials(cfg)
            ]
            _emit(args, {}, "", rows)
            return 0
        reports = [_strip_time(estimate_failure_probability(c).to_json(), args.timing) for c in configs]
        rows = [
            {
                "N": r["config"]["N"],
                "K": r["config"]["K"],
                "delta": r["config"]["delta"],
                "s": r["config"]["s"],
                "M": r["config"]["M"],
                "trials": r["trials_run"],
                "failures": r["failures"],
                "rate": f"{r['failure_rate']:.3g}",
                "bound": f"{r['theorem_bound']:.3g}",
                "mean_dup": f"{r['mean_duplicates']:.4f}",
                "max_dup": r["max_duplicates"],
                "ok": r["within_bound"],
            }
            for r in reports
        ]
        _emit(args, {"reports": reports}, _table(rows, list(rows[0])), rows)
        if not all(r["within_bound"] for r in reports):
            raise DomainFailure("empirical failure rate exceeds the bound by more than 3 sigma")
        return 0

    if args.kind == "designed":
        if args.set:
            sopi_set = SopiSet.from_json(_load_json(args.set))
        else:
            if args.d is None or args.m is None:
                raise ValueError("--kind designed needs --set or both --d and --m")
            dp = DesignParams(_params(args), args.d, args.m)
            sopi_set = build_sopi_set(dp, args.b_cap, args.a_cap, args.seed, args.strategy)
        total = args.total if args.total is not None else sopi_set.design.M
        rep = designed_overlap_experiment(sopi_set, args.s, total, args.samples, args.seed, args.distinct_strides)
        doc = _strip_time(rep.to_json(), args.timing)
        _emit(args, doc, _kv(doc))
        if rep.violations:
            raise DomainFailure(f"{rep.violations} samples exceed the worst-case duplicate bound")
        return 0

    params = _params(args)
    assignment = Assignment.from_json(_load_json(args.assignment))
    bs = block_structure(args.f, args.t, args.ws)
    rep = simulate_multi_source_download(bs, assignment, args.client, args.budget, args.k, seed=args.seed, params=params)
    doc = rep.to_json()
    _emit(args, doc, _kv(doc))
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=MERSENNE31, help="prime modulus N (default 2^31-1)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="write output to this path instead of stdout")
    common.add_argument("--format", choices=("json", "csv", "text"), default="text")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="sopi", description="Stream object permutation identifier toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="symbol IDs of a SOPI")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--pos", type=int)
    g.add_argument("--len", type=int)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("distance", parents=[common], help="B-distance between two strides")
    p.add_argument("--b0", type=int, required=True)
    p.add_argument("--b1", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("genset", parents=[common], help="build a designed SOPI set")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--b-cap", type=int)
    p.add_argument("--a-cap", type=int)
    p.add_argument("--strategy", choices=design_mod.STRATEGIES, default="incremental")
    p.add_argument("--audit", action="store_true", help="re-verify both set guarantees")
    p.set_defaults(func=cmd_genset)

    p = sub.add_parser("partition", parents=[common], help="source-block structure of an object")
    p.add_argument("--f", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--ws", type=int, required=True)
    p.add_argument("--kmax-limit", type=int)
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("color", parents=[common], help="assign SOPIs to a node graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--set")
    p.add_argument("--validate", metavar="ASSIGNMENT", help="check an assignment file instead of colouring")
    p.set_defaults(func=cmd_color)

    p = sub.add_parser("experiment", parents=[common], help="Monte Carlo and simulation runs")
    p.add_argument("--kind", choices=("random", "designed", "simulate"), required=True)
    p.add_argument("--timing", action="store_true", help="include wall_time in reports")
    p.add_argument("--k", type=int)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--s", type=int, default=2)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--split", choices=("equal", "random"), default="equal")
    p.add_argument("--grid", action="store_true", help="run the N x delta x s grid")
    p.add_argument("--set")
    p.add_argument("--d", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--b-cap", type=int, default=16)
    p.add_argument("--a-cap", type=int, default=4)
    p.add_argument("--strategy", choices=design_mod.STRATEGIES, default="incremental")
    p.add_argument("--total", type=int, help="total prefix length per sample (default M)")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--distinct-strides", action="store_true")
    p.add_argument("--assignment")
    p.add_argument("--client", nargs="+")
    p.add_argument("--f", type=int)
    p.add_argument("--t", type=int)
    p.add_argument("--ws", type=int)
    p.add_argument("--budget", type=int)
    p.set_defaults(func=cmd_experiment)
    return parser


def _check_simulate(args: argparse.Namespace) -> None:
    if args.command == "experiment" and args.kind == "simulate":
        missing = [f for f in ("assignment", "client", "f", "t", "ws", "budget") if getattr(args, f) is None]
        if missing:
            raise ValueError("--kind simulate needs " + ", ".join("--" + m for m in missing))


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        _check_simulate(args)
        return args.func(args)
    except InsufficientPaletteError as exc:
        print(f"sopi: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except DomainFailure as exc:
        print(f"sopi: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (ValueError, KeyError, TypeError) as exc:
        print(f"sopi: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
