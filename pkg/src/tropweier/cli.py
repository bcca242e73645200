"""Command-line interface: ``tropweier <command> [flags]``.

Exit codes: 0 success, 2 usage error, 3 invalid input, 4 computation failure.
Errors are printed to stdout as a JSON object ``{"error": {...}}``.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import io as tio
from .burning import BurningDidNotTerminate
from .divisor import canonical_divisor, rank, reduce
from .electrical import canonical_measure, resistance, voltage_function
from .equidist import (ExperimentConfig, GenericityRetriesExceeded, bounds, result_to_json,
                       rows_to_csv, run_experiment)
from .graph import GraphError, PointError
from .weierstrass import mesh_oracle, weierstrass_locus

EXIT_USAGE, EXIT_INVALID, EXIT_COMPUTE = 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _emit(obj) -> None:
    print(tio.dumps(obj))


def _fail(code: int, kind: str, message: str) -> int:
    _emit({"error": {"code": code, "type": kind, "message": message}})
    return code


def _graph(args):
    return tio.load_graph(args.graph)


def _divisor(graph, args):
    if args.divisor is None:
        return canonical_divisor(graph)
    return tio.load_divisor(graph, args.divisor)


def _slope_table(f):
    return {e.id: [{"start": a, "end": b, "slope": s} for a, b, s in f.edge_slopes(e.id)]
            for e in f.graph.edges}


def cmd_info(args) -> int:
    g = _graph(args)
    if args.emit_normalized:
        print(tio.dump_graph(g))
        return 0
    _emit({
        "vertices": list(g.vertices),
        "edges": g.to_dict()["edges"],
        "genus": g.genus,
        "bridges": sorted(g.bridges),
        "total_length": g.total_length,
    })
    return 0


def cmd_measure(args) -> int:
    g = _graph(args)
    m = canonical_measure(g)
    if args.format == "csv":
        print("segment,density,mass")
        for eid, d, mass in m.rows():
            print(f"{eid},{Fraction(d)},{Fraction(mass)}")
        print(f"total,,{m.total}")
    else:
        _emit({"segments": [{"segment": eid, "density": d, "mass": mass} for eid, d, mass in m.rows()],
               "total": m.total})
    return 0


def cmd_resistance(args) -> int:
    g = _graph(args)
    x = tio.parse_point(g, args.from_)
    y = tio.parse_point(g, args.to)
    _emit({"from": x, "to": y, "resistance": resistance(g, x, y)})
    return 0


def cmd_voltage(args) -> int:
    g = _graph(args)
    y = tio.parse_point(g, args.source)
    z = tio.parse_point(g, args.sink)
    j = voltage_function(g, y, z)
    _emit({
        "source": y,
        "sink": z,
        "slopes": _slope_table(j.function),
        "vertex_values": {v: j(g.vertex_point(v)) for v in g.vertices},
    })
    return 0


def cmd_reduce(args) -> int:
    g = _graph(args)
    if args.basepoint is None:
        raise UsageError("reduce needs --basepoint")
    q = tio.parse_point(g, args.basepoint)
    D = _divisor(g, args)
    red = reduce(g, q, D)
    _emit({"basepoint": q, "reduced": tio.divisor_to_json(red.divisor),
           "witness_slopes": _slope_table(red.witness)})
    return 0


def cmd_rank(args) -> int:
    g = _graph(args)
    D = _divisor(g, args)
    _emit({"degree": D.degree, "genus": g.genus, "rank": rank(g, D)})
    return 0


def cmd_weierstrass(args) -> int:
    g = _graph(args)
    D = _divisor(g, args)
    locus = weierstrass_locus(g, D)
    m = canonical_measure(g)
    N = locus.degree
    segments = []
    for e in g.edges:
        lo, hi = bounds(N, m.mass[e.id], g.genus)
        segments.append({"segment": e.id, "count": locus.counts.get(e.id, 0),
                         "N_mu": N * m.mass[e.id], "lower": lo, "upper": hi})
    out = {
        "degree": N,
        "rank": locus.rank,
        "generic": locus.generic,
        "points": [tio.point_to_json(p) for p in locus.points],
        "intervals": [{"edge": eid, "start": a, "end": b} for eid, a, b in locus.intervals],
        "undecided": [{"edge": eid, "start": a, "end": b} for eid, a, b in locus.undecided],
        "segments": segments,
    }
    if args.mesh_check:
        hits = mesh_oracle(g, D, args.mesh_check, locus.rank)
        out["mesh_check"] = {"resolution": args.mesh_check, "hits": len(hits),
                             "unexplained": [str(p) for p in hits if not locus.covers(g, p)]}
    _emit(out)
    return 0


def cmd_equidistribute(args) -> int:
    try:
        degrees = [int(x) for x in args.degrees.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad --degrees {args.degrees!r}") from None
    cfg = ExperimentConfig(args.graph, degrees, args.seed, args.denom, args.out, args.format,
                           workers=args.workers)
    result = run_experiment(cfg)
    text = rows_to_csv(result.rows) if cfg.format == "csv" else result_to_json(result)
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
        _emit(json.loads(tio.dumps(result.summary)))
    else:
        sys.stdout.write(text)
    return 0


COMMANDS = {
    "info": cmd_info,
    "measure": cmd_measure,
    "resistance": cmd_resistance,
    "voltage": cmd_voltage,
    "reduce": cmd_reduce,
    "rank": cmd_rank,
    "weierstrass": cmd_weierstrass,
    "equidistribute": cmd_equidistribute,
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tropweier", description="Divisors and Weierstrass points on metric graphs.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def cmd(name, help_text, divisor=False):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--graph", required=True, help="graph JSON file")
        if divisor:
            sp.add_argument("--divisor", help="divisor JSON file (default: canonical divisor)")
        return sp

    cmd("info", "vertices, edges, genus and bridges").add_argument(
        "--emit-normalized", action="store_true", help="print the graph in canonical JSON")
    cmd("measure", "canonical measure per edge").add_argument(
        "--format", choices=["json", "csv"], default="json")
    sp = cmd("resistance", "effective resistance between two points")
    sp.add_argument("--from", dest="from_", required=True)
    sp.add_argument("--to", required=True)
    sp = cmd("voltage", "voltage function for a unit current")
    sp.add_argument("--source", required=True)
    sp.add_argument("--sink", required=True)
    cmd("reduce", "reduced divisor at a basepoint", divisor=True).add_argument("--basepoint")
    cmd("rank", "Baker-Norine rank", divisor=True)
    cmd("weierstrass", "Weierstrass locus", divisor=True).add_argument(
        "--mesh-check", type=int, metavar="R", help="compare against a mesh of resolution R")
    sp = cmd("equidistribute", "per-edge counts for random generic divisors")
    sp.add_argument("--degrees", required=True, help="comma-separated, increasing")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--denom", type=int, default=1000)
    sp.add_argument("--out")
    sp.add_argument("--format", choices=["csv", "json"], default="csv")
    sp.add_argument("--workers", type=int, default=1)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        return _fail(EXIT_USAGE, "usage", str(exc))
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        return _fail(EXIT_USAGE, "usage", str(exc))
    except (GraphError, PointError, ValueError, OSError, json.JSONDecodeError) as exc:
        return _fail(EXIT_INVALID, type(exc).__name__, str(exc))
    except (BurningDidNotTerminate, GenericityRetriesExceeded, ArithmeticError, RuntimeError) as exc:
        return _fail(EXIT_COMPUTE, type(exc).__name__, str(exc))


if __name__ == "__main__":
    sys.exit(main())
