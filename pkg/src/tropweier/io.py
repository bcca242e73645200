"""JSON file formats for graphs and divisors, and the command-line point syntax."""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .divisor import Divisor
from .graph import MetricGraph, Point, PointError, as_fraction, format_fraction, validate_model


def load_graph(path) -> MetricGraph:
    with open(path, encoding="utf-8") as fh:
        return validate_model(json.load(fh))


def dump_graph(graph: MetricGraph) -> str:
    return dumps(graph.to_dict())


def parse_point(graph: MetricGraph, text: str) -> Point:
    """Parse ``vertex:NAME`` or ``edge:ID@p/q`` into a canonical point."""
    kind, sep, rest = text.partition(":")
    if not sep:
        raise PointError(f"cannot parse point {text!r}")
    if kind == "vertex":
        return graph.check_point(Point("v", rest))
    if kind == "edge":
        eid, at, off = rest.rpartition("@")
        if not at:
            raise PointError(f"edge point {text!r} needs an offset after '@'")
        try:
            offset = as_fraction(off)
        except (ValueError, ZeroDivisionError):
            raise PointError(f"bad offset in {text!r}") from None
        return graph.edge_point(eid, offset)
    raise PointError(f"unknown point kind {kind!r}")


def point_to_json(p: Point) -> dict:
    if p.is_vertex:
        return {"vertex": p.name}
    return {"edge": p.name, "offset": format_fraction(p.offset)}


def point_from_json(graph: MetricGraph, raw) -> Point:
    if not isinstance(raw, dict):
        raise PointError(f"point must be an object, got {raw!r}")
    if "vertex" in raw:
        return graph.check_point(Point("v", str(raw["vertex"])))
    if "edge" in raw:
        try:
            offset = as_fraction(raw["offset"])
        except (KeyError, ValueError, ZeroDivisionError):
            raise PointError(f"bad edge point {raw!r}") from None
        return graph.edge_point(str(raw["edge"]), offset)
    raise PointError(f"point needs 'vertex' or 'edge': {raw!r}")


def divisor_from_json(graph: MetricGraph, raw) -> Divisor:
    if not isinstance(raw, list):
        raise ValueError("divisor must be a list of {at, coeff} entries")
    terms = []
    for item in raw:
        try:
            coeff = item["coeff"]
            at = item["at"]
        except (KeyError, TypeError):
            raise ValueError(f"malformed divisor entry {item!r}") from None
        if not isinstance(coeff, int) or isinstance(coeff, bool):
            raise ValueError(f"coefficient must be an integer: {coeff!r}")
        terms.append((point_from_json(graph, at), coeff))
    return Divisor(terms)


def divisor_to_json(D: Divisor) -> list:
    return [{"at": point_to_json(p), "coeff": k} for p, k in D.items()]


def load_divisor(graph: MetricGraph, path) -> Divisor:
    return divisor_from_json(graph, json.loads(Path(path).read_text(encoding="utf-8")))


def _default(obj):
    if isinstance(obj, Fraction):
        return format_fraction(obj)
    if isinstance(obj, Point):
        return str(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, rationals as ``"p/q"``."""
    return json.dumps(obj, sort_keys=True, indent=2, default=_default)
