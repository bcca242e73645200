"""Continuous piecewise-linear functions on a metric graph."""

from __future__ import annotations

from bisect import bisect_right
from fractions import Fraction
from typing import Mapping

from .graph import MetricGraph, Point, PointError, Refinement

ZERO = Fraction(0)


class DiscontinuousFunction(ValueError):
    pass


def _canonical(breaks, values):
    """Drop interior breakpoints where the slope does not change."""
    bs = [breaks[0]]
    vs = [values[0]]
    for k in range(1, len(breaks) - 1):
        s_left = (values[k] - vs[-1]) / (breaks[k] - bs[-1])
        s_right = (values[k + 1] - values[k]) / (breaks[k + 1] - breaks[k])
        if s_left != s_right:
            bs.append(breaks[k])
            vs.append(values[k])
    bs.append(breaks[-1])
    vs.append(values[-1])
    return tuple(bs), tuple(vs)


class PLFunction:
    """A continuous function, linear between finitely many breakpoints per edge.

    ``pieces[edge_id] = (breaks, values)`` where ``breaks`` is an increasing
    tuple of offsets starting at 0 and ending at the edge length and
    ``values`` are the function values there.  The representation is kept
    canonical: consecutive pieces with equal slope are merged.
    """

    __slots__ = ("graph", "pieces")

    def __init__(self, graph: MetricGraph, pieces: Mapping, check: bool = True):
        self.graph = graph
        canon = {}
        for e in graph.edges:
            breaks, values = pieces[e.id]
            breaks = tuple(Fraction(b) for b in breaks)
            values = tuple(Fraction(v) for v in values)
            if check:
                if breaks[0] != 0 or breaks[-1] != e.length or len(breaks) != len(values):
                    raise ValueError(f"bad breakpoints on edge {e.id!r}")
                if any(b1 >= b2 for b1, b2 in zip(breaks, breaks[1:])):
                    raise ValueError(f"breakpoints on edge {e.id!r} not increasing")
            canon[e.id] = _canonical(breaks, values)
        self.pieces = canon
        if check:
            self._check_continuity()

    def _check_continuity(self) -> None:
        at_vertex: dict[str, Fraction] = {}
        for e in self.graph.edges:
            _, values = self.pieces[e.id]
            for v, val in ((e.u, values[0]), (e.v, values[-1])):
                prev = at_vertex.setdefault(v, val)
                if prev != val:
                    raise DiscontinuousFunction(f"values disagree at vertex {v!r}")

    # -- constructors ----------------------------------------------------

    @classmethod
    def constant(cls, graph: MetricGraph, c=0) -> "PLFunction":
        c = Fraction(c)
        return cls(graph, {e.id: ((ZERO, e.length), (c, c)) for e in graph.edges}, check=False)

    @classmethod
    def from_refined_values(cls, refinement: Refinement, values: Mapping[str, Fraction]) -> "PLFunction":
        """Interpolate vertex values of a refined model linearly along its edges."""
        fine = refinement.graph
        pieces = {}
        for e in refinement.base.edges:
            breaks = [ZERO]
            vals = []
            for k, (pid, a, b) in enumerate(refinement.pieces[e.id]):
                pe = fine.edge(pid)
                if k == 0:
                    vals.append(Fraction(values[pe.u]))
                breaks.append(b)
                vals.append(Fraction(values[pe.v]))
            pieces[e.id] = (breaks, vals)
        return cls(refinement.base, pieces)

    @classmethod
    def from_slopes(cls, graph: MetricGraph, slopes: Mapping, anchor: Point | None = None,
                    anchor_value=0) -> "PLFunction":
        """Assemble a function from per-edge step slopes.

        ``slopes[edge_id]`` is a list of ``(start, end, slope)`` covering the
        edge.  Vertex values are propagated along a spanning tree, so the
        slopes must integrate to zero around every cycle.
        """
        rise = {}
        for e in graph.edges:
            rise[e.id] = sum((s * (b - a) for a, b, s in slopes[e.id]), ZERO)
        root = graph.vertices[0]
        vval = {root: ZERO}
        stack = [root]
        while stack:
            v = stack.pop()
            for e, end in graph.incidence[v]:
                w = e.v if end == 0 else e.u
                if w in vval:
                    continue
                vval[w] = vval[v] + (rise[e.id] if end == 0 else -rise[e.id])
                stack.append(w)
        pieces = {}
        for e in graph.edges:
            breaks = [ZERO]
            vals = [vval[e.u]]
            for a, b, s in slopes[e.id]:
                breaks.append(b)
                vals.append(vals[-1] + s * (b - a))
            pieces[e.id] = (breaks, vals)
        f = cls(graph, pieces)
        if anchor is not None:
            f = f + (Fraction(anchor_value) - f.value(anchor))
        return f

    # -- evaluation ------------------------------------------------------

    def _eval_edge(self, edge_id: str, offset: Fraction) -> Fraction:
        breaks, values = self.pieces[edge_id]
        k = bisect_right(breaks, offset) - 1
        if k >= len(breaks) - 1:
            return values[-1]
        if offset == breaks[k]:
            return values[k]
        t = (offset - breaks[k]) / (breaks[k + 1] - breaks[k])
        return values[k] + t * (values[k + 1] - values[k])

    def value(self, x: Point) -> Fraction:
        if x.is_vertex:
            for e, end in self.graph.incidence[x.name]:
                _, values = self.pieces[e.id]
                return values[0] if end == 0 else values[-1]
            raise PointError(f"isolated vertex {x}")  # pragma: no cover
        return self._eval_edge(x.name, Fraction(x.offset))

    __call__ = value

    def edge_slopes(self, edge_id: str) -> list[tuple[Fraction, Fraction, Fraction]]:
        """``(start, end, slope)`` for each linear piece, in the edge's direction."""
        breaks, values = self.pieces[edge_id]
        return [
            (breaks[k], breaks[k + 1], (values[k + 1] - values[k]) / (breaks[k + 1] - breaks[k]))
            for k in range(len(breaks) - 1)
        ]

    def slope_at(self, edge_id: str, offset, side: int = 1) -> Fraction:
        """Slope just to the right (``side=1``) or left (``side=-1``) of ``offset``."""
        offset = Fraction(offset)
        for a, b, s in self.edge_slopes(edge_id):
            if (side > 0 and a <= offset < b) or (side < 0 and a < offset <= b):
                return s
        raise PointError(f"offset {offset} outside edge {edge_id!r}")

    def all_slopes(self) -> list[Fraction]:
        return [s for e in self.graph.edges for _, _, s in self.edge_slopes(e.id)]

    def is_integral(self) -> bool:
        return all(s.denominator == 1 for s in self.all_slopes())

    def extreme_values(self) -> tuple[Fraction, Fraction]:
        vals = [v for _, values in self.pieces.values() for v in values]
        return min(vals), max(vals)

    def integral(self, edge_id: str, density=1) -> Fraction:
        """``density * integral`` of the function over one edge (trapezoid rule, exact)."""
        breaks, values = self.pieces[edge_id]
        total = ZERO
        for k in range(len(breaks) - 1):
            total += (breaks[k + 1] - breaks[k]) * (values[k] + values[k + 1]) / 2
        return Fraction(density) * total

    # -- divisor of the function ----------------------------------------

    def laplacian(self) -> dict[Point, Fraction]:
        """Sum of outgoing slopes at every point where it is nonzero."""
        out: dict[Point, Fraction] = {}

        def add(p: Point, amount: Fraction) -> None:
            if amount:
                out[p] = out.get(p, ZERO) + amount

        for e in self.graph.edges:
            sl = self.edge_slopes(e.id)
            add(Point("v", e.u), sl[0][2])
            add(Point("v", e.v), -sl[-1][2])
            for (_, b, s1), (_, _, s2) in zip(sl, sl[1:]):
                add(Point("e", e.id, b), s2 - s1)
        return {p: c for p, c in out.items() if c}

    # -- arithmetic ------------------------------------------------------

    def _combine(self, other: "PLFunction", op) -> "PLFunction":
        if other.graph != self.graph:
            raise ValueError("functions live on different graphs")
        pieces = {}
        for e in self.graph.edges:
            b1, _ = self.pieces[e.id]
            b2, _ = other.pieces[e.id]
            breaks = sorted(set(b1) | set(b2))
            vals = [op(self._eval_edge(e.id, b), other._eval_edge(e.id, b)) for b in breaks]
            pieces[e.id] = (breaks, vals)
        return PLFunction(self.graph, pieces, check=False)

    def __add__(self, other):
        if isinstance(other, PLFunction):
            return self._combine(other, lambda a, b: a + b)
        c = Fraction(other)
        return PLFunction(
            self.graph, {k: (b, tuple(v + c for v in vs)) for k, (b, vs) in self.pieces.items()},
            check=False,
        )

    __radd__ = __add__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        if isinstance(other, PLFunction):
            return self._combine(other, lambda a, b: a - b)
        return self + (-Fraction(other))

    def __mul__(self, c):
        c = Fraction(c)
        return PLFunction(
            self.graph, {k: (b, tuple(v * c for v in vs)) for k, (b, vs) in self.pieces.items()},
            check=False,
        )

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (1 / Fraction(c))

    def __eq__(self, other) -> bool:
        if not isinstance(other, PLFunction):
            return NotImplemented
        return self.graph == other.graph and self.pieces == other.pieces

    def __hash__(self):
        return hash(tuple(sorted(self.pieces.items())))

    def maximum(self, level) -> "PLFunction":
        """Pointwise ``max(f, level)`` for a constant ``level``."""
        lam = Fraction(level)
        pieces = {}
        for e in self.graph.edges:
            breaks, values = self.pieces[e.id]
            nb = [breaks[0]]
            nv = [max(values[0], lam)]
            for k in range(len(breaks) - 1):
                a, b = breaks[k], breaks[k + 1]
                fa, fb = values[k], values[k + 1]
                if (fa - lam) * (fb - lam) < 0:
                    c = a + (lam - fa) * (b - a) / (fb - fa)
                    nb.append(c)
                    nv.append(lam)
                nb.append(b)
                nv.append(max(fb, lam))
            pieces[e.id] = (nb, nv)
        return PLFunction(self.graph, pieces, check=False)

    def __repr__(self) -> str:
        return f"PLFunction(edges={len(self.pieces)})"
