"""Weierstrass loci of divisors on metric graphs.

A point ``x`` is a Weierstrass point of ``D`` (rank ``r``) when
``[D - (r+1) x]`` is effective, i.e. when the ``x``-reduced form of ``D``
carries at least ``r + 1`` chips at ``x``.

The sweep along an edge uses the chip flow between reduced divisors at two
basepoints ``a < b``: moving the basepoint from ``a`` to ``b`` drags the
stack of ``r`` chips forward, and every Weierstrass point in ``(a, b)`` is a
collision with one chip travelling the other way.  Counting those returning
chips from the flow witness gives the number of points in ``(a, b)``;
points are then isolated by bisection and pinned down exactly by solving
for the collision of the returning chip with the basepoint.
"""

from __future__ import annotations

import os
from bisect import bisect_left
from dataclasses import dataclass, field
from fractions import Fraction

from .burning import ChipFlow, burn_reduce
from .divisor import Divisor, base_point, rank, reduce
from .graph import MetricGraph, Point

DEFAULT_MAX_REFINE = 24
INTERVAL_PROBES = 5
# neighbours of a found point are probed at this fraction of the edge length
PROBE_STEP = Fraction(1, 2**16)


class NonGenericRank(ValueError):
    """The divisor's rank differs from ``deg D - g``."""


def simplest_between(lo: Fraction, hi: Fraction) -> Fraction:
    """Rational with the smallest denominator in the open interval ``(lo, hi)``."""
    if not lo < hi:
        raise ValueError("empty interval")
    fl = lo.numerator // lo.denominator
    if fl + 1 < hi:
        return Fraction(fl + 1)
    # lo and hi share the integer part fl; recurse on reciprocals of the fractional parts
    a, b = lo - fl, hi - fl
    if a == 0:
        # (0, b): 1/n with n just above 1/b
        return fl + Fraction(1, (1 / b).__floor__() + 1)
    return fl + 1 / simplest_between(1 / b, 1 / a)


def max_refine() -> int:
    value = os.environ.get("TROPWEIER_MAX_REFINE")
    return int(value) if value else DEFAULT_MAX_REFINE


@dataclass
class WeierstrassLocus:
    """Isolated points, interval components and undecided windows of ``W_D``.

    Intervals and windows are ``(edge id, start, end)`` offset triples.
    ``counts`` maps each edge to the number of isolated points on the
    closed edge.
    """

    degree: int
    rank: int
    points: list = field(default_factory=list)
    intervals: list = field(default_factory=list)
    undecided: list = field(default_factory=list)
    counts: dict = field(default_factory=dict)
    anomalies: int = 0

    @property
    def generic(self) -> bool:
        return not self.intervals and not self.undecided

    def __len__(self) -> int:
        return len(self.points)

    def covers(self, graph: MetricGraph, x: Point) -> bool:
        """Whether ``x`` is a reported point or lies in a reported interval."""
        if x in self.points:
            return True
        return any(eid == e and a <= off <= b
                   for e, off in graph.locations(x) for eid, a, b in self.intervals)


class Sweeper:
    """Cached reduced divisors of one divisor class at many basepoints."""

    def __init__(self, graph: MetricGraph, D, r: int | None = None):
        self.graph = graph
        self.D = Divisor(D)
        self.rank = rank(graph, self.D) if r is None else r
        q0 = base_point(graph)
        self._start = reduce(graph, q0, self.D).divisor
        self._cache: dict[Point, Divisor] = {q0: self._start} if self.rank >= 0 else {}
        self._by_edge: dict[str, list[Fraction]] = {}
        if self.rank >= 0:
            self._index(q0)

    def _index(self, x: Point) -> None:
        for eid, off in self.graph.locations(x):
            lst = self._by_edge.setdefault(eid, [])
            k = bisect_left(lst, off)
            if k == len(lst) or lst[k] != off:
                lst.insert(k, off)

    def _nearest(self, x: Point) -> Divisor:
        best = None
        for eid, off in self.graph.locations(x):
            lst = self._by_edge.get(eid)
            if not lst:
                continue
            k = bisect_left(lst, off)
            for j in (k - 1, k):
                if 0 <= j < len(lst):
                    dist = abs(lst[j] - off)
                    if best is None or dist < best[0]:
                        best = (dist, eid, lst[j])
        if best is None:
            return self._start
        return self._cache[self.graph.edge_point(best[1], best[2])]

    def reduced(self, x: Point) -> Divisor:
        hit = self._cache.get(x)
        if hit is not None:
            return hit
        chips, _ = burn_reduce(self.graph, x, self._nearest(x))
        R = Divisor(chips)
        self._cache[x] = R
        self._index(x)
        return R

    def transport(self, x: Point, y: Point) -> tuple[Divisor, ChipFlow]:
        """``red_y`` computed from ``red_x``, with the flow between them."""
        chips, flow = burn_reduce(self.graph, y, self.reduced(x))
        R = Divisor(chips)
        if y not in self._cache:
            self._cache[y] = R
            self._index(y)
        return R, flow

    def is_weierstrass(self, x: Point) -> bool:
        if self.rank < 0:
            return False
        return self.reduced(x)[x] >= self.rank + 1


def is_weierstrass(graph: MetricGraph, D, x: Point, r: int | None = None) -> bool:
    """Whether ``[D - (r+1) x] >= 0`` with ``r = rank(D)``."""
    x = graph.check_point(x)
    r = rank(graph, D) if r is None else r
    if r < 0:
        return False
    return reduce(graph, x, D).divisor[x] >= r + 1


@dataclass
class _Count:
    count: int
    chip_a: Fraction | None  # nearest chip of red_a ahead of a on the edge
    chip_b: Fraction | None  # nearest chip of red_b behind b on the edge
    sane: bool


class _EdgeSweep:
    def __init__(self, sw: Sweeper, edge_id: str, cap: int):
        self.sw = sw
        self.g = sw.graph
        self.e = self.g.edge(edge_id)
        self.cap = cap
        self.points: set[Fraction] = set()
        self.intervals: list[tuple[Fraction, Fraction]] = []
        self.undecided: list[tuple[Fraction, Fraction]] = []
        self.anomalies = 0

    def pt(self, off: Fraction) -> Point:
        return self.g.edge_point(self.e.id, off)

    def is_w(self, off: Fraction) -> bool:
        return self.sw.is_weierstrass(self.pt(off))

    def _chips_between(self, R: Divisor, a: Fraction, b: Fraction) -> list[Fraction]:
        out = []
        for p, k in R.items():
            if not p.is_vertex and p.name == self.e.id and a < p.offset < b:
                out.extend([p.offset] * k)
        return out

    def _offsets(self, R: Divisor) -> list[Fraction]:
        """Chip offsets on the closed edge; end vertices appear at 0 and ``L``."""
        out = []
        for p, k in R.items():
            if not p.is_vertex:
                if p.name == self.e.id:
                    out.append(p.offset)
                continue
            if p.name == self.e.u:
                out.append(Fraction(0))
            if p.name == self.e.v:
                out.append(self.e.length)
        return out

    def count(self, a: Fraction, b: Fraction) -> _Count:
        """Number of Weierstrass points in the open interval ``(a, b)``."""
        r = self.sw.rank
        pa, pb = self.pt(a), self.pt(b)
        Ra = self.sw.reduced(pa)
        Rb, flow = self.sw.transport(pa, pb)
        deficit = r + flow.slope_right(self.e.id, a)
        inner_a = self._chips_between(Ra, a, b)
        inner_b = self._chips_between(Rb, a, b)
        sane = deficit >= 0 and len(inner_a) <= 1 and len(inner_b) <= 1
        for p, R in ((pa, Ra), (pb, Rb)):
            if not p.is_vertex and R[p] > r + 1:
                sane = False
        ahead = [x for x in self._offsets(Ra) if x > a]
        behind = [x for x in self._offsets(Rb) if x < b]
        return _Count(
            max(deficit + len(inner_b), 0),
            min(ahead) if ahead else None,
            max(behind) if behind else None,
            sane,
        )

    def interval_test(self, a: Fraction, b: Fraction) -> bool:
        if not (self.is_w(a) and self.is_w(b) and self.is_w((a + b) / 2)):
            return False
        for k in range(1, INTERVAL_PROBES + 1):
            if not self.is_w(a + (b - a) * k / (INTERVAL_PROBES + 2)):
                return False
        return True

    def run(self) -> None:
        L = self.e.length
        zero = Fraction(0)
        if self.interval_test(zero, L):
            self.intervals.append((zero, L))
            return
        self.sweep(zero, L, 0)
        for _ in range(4):
            if not self.audit():
                break

    def audit(self) -> bool:
        """Probe the midpoint of every gap between findings; True if one was missed.

        Counts can be wrong next to interval components, so a hit here is
        grown and the gap swept again.
        """
        marks = {Fraction(0), self.e.length} | self.points
        for lo, hi in self.intervals:
            marks |= {lo, hi}
        marks = sorted(marks)
        missed = False
        for x, y in zip(marks, marks[1:]):
            if any(lo <= x and y <= hi for lo, hi in self.intervals):
                continue
            m = (x + y) / 2
            if self.is_w(m):
                missed = True
                self.anomalies += 1
                if not self._found(m, x, y, 0):
                    self.sweep(x, m, 0)
                    self.sweep(m, y, 0)
        return missed

    def sweep(self, a: Fraction, b: Fraction, depth: int) -> None:
        """Sweep the closed sub-segment ``[a, b]``."""
        ends = {x for span in self.intervals for x in span}
        for off in (a, b):
            if off not in ends and self.is_w(off):
                span = self.grow(off)
                if span is not None:
                    return self._around(span, a, b, depth)
                self.points.add(off)
        self.solve(a, b, self.count(a, b), depth, None)

    def _around(self, span, a: Fraction, b: Fraction, depth: int) -> None:
        lo, hi = span
        self.intervals.append(span)
        if a < lo:
            self.sweep(a, lo, depth)
        if hi < b:
            self.sweep(hi, b, depth)

    def _boundary(self, w: Fraction, step: Fraction, direction: int) -> Fraction:
        """Far end of the run of Weierstrass points containing ``w``."""
        L = self.e.length
        while True:
            n = min(max(w + direction * step, Fraction(0)), L)
            if n == w:
                return w
            if not self.is_w(n):
                break
            w, step = n, step * 2
        for k in range(2 * self.cap):
            lo, hi = min(w, n), max(w, n)
            m = simplest_between(lo, hi) if k % 2 == 0 else (lo + hi) / 2
            if self.is_w(m):
                w = m
            else:
                n = m
        return w

    def grow(self, x: Fraction):
        """``(start, end)`` of an interval component through ``x``, or None."""
        L = self.e.length
        h = L * PROBE_STEP
        right = x + h <= L and self.is_w(x + h)
        left = x - h >= 0 and self.is_w(x - h)
        if not (left or right):
            return None
        lo = self._boundary(x - h, h, -1) if left else x
        hi = self._boundary(x + h, h, 1) if right else x
        return lo, hi

    def _guesses(self, a: Fraction, b: Fraction, c: _Count, prev):
        """Candidate collision points, assuming the returning chip moves linearly."""
        if c.chip_a is not None and prev is not None:
            x0, p0 = prev
            v = (c.chip_a - p0) / (a - x0)
            if v != 1:
                yield a + (c.chip_a - a) / (1 - v)
        if c.chip_a is not None and c.chip_b is not None:
            ahead = c.chip_a - a
            behind = c.chip_b - b
            if ahead != behind:
                yield a + ahead * (b - a) / (ahead - behind)

    def _found(self, x: Fraction, a: Fraction, b: Fraction, depth: int) -> bool:
        """Record a Weierstrass point; if it sits in an interval, sweep around it."""
        if any(lo <= x <= hi for lo, hi in self.intervals):
            return True
        span = self.grow(x)
        if span is None:
            self.points.add(x)
            return False
        self._around(span, a, b, depth + 1)
        return True

    def solve(self, a: Fraction, b: Fraction, c: _Count, depth: int, prev) -> None:
        if not c.sane:
            self.anomalies += 1
        elif c.count == 0:
            return
        if c.sane and c.count == 1:
            for x in self._guesses(a, b, c, prev):
                if a < x < b and self.is_w(x):
                    self._found(x, a, b, depth)
                    return
        if depth >= self.cap:
            self.undecided.append((a, b))
            return
        cut = (a + b) / 2
        if self.is_w(cut) and self._found(cut, a, b, depth):
            return
        left = self.count(a, cut)
        right = self.count(cut, b)
        if c.sane and left.sane and right.sane:
            if left.count + right.count + (cut in self.points) != c.count:
                self.anomalies += 1
        here = (a, c.chip_a) if c.chip_a is not None else None
        self.solve(a, cut, left, depth + 1, prev)
        self.solve(cut, b, right, depth + 1, here)


def _merge(spans):
    out = []
    for a, b in sorted(spans):
        if out and a <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], b))
        else:
            out.append((a, b))
    return out


def weierstrass_on_segment(graph: MetricGraph, D, edge_id: str, *, sweeper: Sweeper | None = None,
                           require_generic_rank: bool = True, cap: int | None = None):
    """Weierstrass points and interval components on one closed edge.

    Returns ``(points, intervals, undecided, anomalies)``; points are :class:`Point`
    objects, the others ``(start, end)`` offset pairs on the edge.
    """
    sw = sweeper or Sweeper(graph, D)
    N = sw.D.degree
    if require_generic_rank and (N < graph.genus or sw.rank != N - graph.genus):
        raise NonGenericRank(f"rank {sw.rank} differs from deg - g = {N - graph.genus}")
    if sw.rank < 0:
        return [], [], [], 0
    es = _EdgeSweep(sw, edge_id, max_refine() if cap is None else cap)
    es.run()
    intervals = _merge(es.intervals)
    pts = sorted(
        {graph.edge_point(edge_id, x) for x in es.points
         if not any(a <= x <= b for a, b in intervals)}
    )
    return pts, intervals, _merge(es.undecided), es.anomalies


def weierstrass_locus(graph: MetricGraph, D, *, cap: int | None = None,
                      sweeper: Sweeper | None = None) -> WeierstrassLocus:
    """Sweep every edge of the model and merge the results."""
    sw = sweeper or Sweeper(graph, D)
    locus = WeierstrassLocus(degree=sw.D.degree, rank=sw.rank)
    if sw.rank < 0:
        locus.counts = {e.id: 0 for e in graph.edges}
        return locus
    pts: set[Point] = set()
    per_edge_pts: dict[str, list[Point]] = {}
    for e in graph.edges:
        p, iv, und, anomalies = weierstrass_on_segment(
            graph, D, e.id, sweeper=sw, require_generic_rank=False, cap=cap)
        per_edge_pts[e.id] = p
        pts.update(p)
        locus.intervals += [(e.id, a, b) for a, b in iv]
        locus.undecided += [(e.id, a, b) for a, b in und]
        locus.anomalies += anomalies
    # a vertex lying in an interval of one edge is not an isolated point
    in_interval = set()
    for eid, a, b in locus.intervals:
        in_interval.add(graph.edge_point(eid, a))
        in_interval.add(graph.edge_point(eid, b))
    locus.points = sorted(p for p in pts if p not in in_interval)
    for e in graph.edges:
        locus.counts[e.id] = sum(1 for p in per_edge_pts[e.id] if p not in in_interval)
    return locus


def mesh_oracle(graph: MetricGraph, D, resolution: int, r: int | None = None) -> list[Point]:
    """Points ``(k / resolution) * length`` on every edge that are Weierstrass."""
    if resolution < 1:
        raise ValueError("resolution must be positive")
    sw = Sweeper(graph, D, r)
    if sw.rank < 0:
        return []
    hits = set()
    for e in graph.edges:
        for k in range(resolution + 1):
            x = graph.edge_point(e.id, e.length * Fraction(k, resolution))
            if sw.is_weierstrass(x):
                hits.add(x)
    return sorted(hits)
