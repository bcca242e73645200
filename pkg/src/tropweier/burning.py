"""Dhar's burning algorithm on a metric graph, in scaled integer coordinates.

All lengths and chip offsets are multiplied by a common denominator so the
inner loop runs on Python ints.  Every firing moves single chips along
edges; the list of moves is kept as the witness of the reduction.
"""

from __future__ import annotations

from collections import deque
from fractions import Fraction
from math import lcm
from typing import Mapping

from .graph import MetricGraph, Point
from .plfunc import PLFunction

MAX_FIRINGS = 2_000_000


class BurningDidNotTerminate(RuntimeError):
    pass


class ChipFlow:
    """Chip moves ``(edge index, start, end, multiplicity)`` at a given scale.

    The witness function ``f`` of the moves satisfies
    ``Div(f) = (divisor after) - (divisor before)``; its slope along an edge
    is minus the net number of chips that crossed in the edge's direction.
    """

    __slots__ = ("graph", "scale", "moves")

    def __init__(self, graph: MetricGraph, scale: int = 1, moves=None):
        self.graph = graph
        self.scale = scale
        self.moves = list(moves or ())

    def rescaled(self, scale: int) -> "ChipFlow":
        if scale == self.scale:
            return self
        k, rem = divmod(scale, self.scale)
        if rem:
            raise ValueError("new scale must be a multiple of the old one")
        return ChipFlow(self.graph, scale, [(i, a * k, b * k, m) for i, a, b, m in self.moves])

    def __mul__(self, c: int) -> "ChipFlow":
        return ChipFlow(self.graph, self.scale, [(i, a, b, m * c) for i, a, b, m in self.moves])

    __rmul__ = __mul__

    def __add__(self, other: "ChipFlow") -> "ChipFlow":
        s = lcm(self.scale, other.scale)
        return ChipFlow(self.graph, s, self.rescaled(s).moves + other.rescaled(s).moves)

    def slope_right(self, edge_id: str, offset) -> int:
        """Witness slope just after ``offset`` along the edge's direction."""
        i = self.graph.edge_index(edge_id)
        u = Fraction(offset) * self.scale
        s = 0
        for j, a, b, m in self.moves:
            if j != i:
                continue
            if a < b:
                if a <= u < b:
                    s -= m
            elif b <= u < a:
                s += m
        return s

    def function(self, anchor: Point | None = None, anchor_value=0) -> PLFunction:
        """The witness as a :class:`PLFunction` (integer slopes)."""
        per_edge: dict[int, dict[int, int]] = {}
        for i, a, b, m in self.moves:
            d = per_edge.setdefault(i, {})
            if a < b:
                d[a] = d.get(a, 0) - m
                d[b] = d.get(b, 0) + m
            else:
                d[b] = d.get(b, 0) + m
                d[a] = d.get(a, 0) - m
        slopes = {}
        for i, e in enumerate(self.graph.edges):
            total = int(e.length * self.scale)
            d = per_edge.get(i, {})
            stops = sorted(set(d) | {0, total})
            run = 0
            pieces = []
            for lo, hi in zip(stops, stops[1:]):
                run += d.get(lo, 0)
                pieces.append((Fraction(lo, self.scale), Fraction(hi, self.scale), Fraction(run)))
            slopes[e.id] = pieces
        return PLFunction.from_slopes(self.graph, slopes, anchor, anchor_value)


def _scale_for(graph: MetricGraph, points) -> int:
    s = 1
    for e in graph.edges:
        s = lcm(s, e.length.denominator)
    for p in points:
        if not p.is_vertex:
            s = lcm(s, p.offset.denominator)
    return s


def burn_reduce(graph: MetricGraph, q: Point, chips: Mapping[Point, int]):
    """Reduce ``chips`` with respect to ``q`` by repeated burning and firing.

    ``chips`` must be nonnegative away from ``q``.  Returns the reduced
    divisor as a dict ``Point -> int`` and the :class:`ChipFlow` witness.
    """
    S = _scale_for(graph, list(chips) + [q])
    V = len(graph.vertices)
    edges = graph.edges
    E = len(edges)
    lengths = [int(e.length * S) for e in edges]
    tails = [graph.vertex_index(e.u) for e in edges]
    heads = [graph.vertex_index(e.v) for e in edges]

    vchips = [0] * V
    echips: list[dict[int, int]] = [dict() for _ in range(E)]
    for p, c in chips.items():
        if not c:
            continue
        if p.is_vertex:
            vchips[graph.vertex_index(p.name)] += c
        else:
            i = graph.edge_index(p.name)
            o = int(p.offset * S)
            echips[i][o] = echips[i].get(o, 0) + c
    if q.is_vertex:
        q_edge, q_off, q_vertex = -1, 0, graph.vertex_index(q.name)
    else:
        q_edge, q_off, q_vertex = graph.edge_index(q.name), int(q.offset * S), -1
    for v in range(V):
        if v != q_vertex and vchips[v] < 0:
            raise ValueError("divisor must be effective away from the basepoint")
    for i in range(E):
        for o, c in echips[i].items():
            if c < 0 and not (i == q_edge and o == q_off):
                raise ValueError("divisor must be effective away from the basepoint")

    moves: list[tuple[int, int, int, int]] = []
    for _ in range(MAX_FIRINGS):
        # model: vertices are nodes 0..V-1, interior points follow
        node_chips = list(vchips)
        node_edge = [-1] * V
        node_off = [0] * V
        seg_a: list[int] = []
        seg_b: list[int] = []
        seg_edge: list[int] = []
        q_node = q_vertex
        for i in range(E):
            ec = echips[i]
            if ec or i == q_edge:
                offs = sorted(ec) if i != q_edge else sorted(set(ec) | {q_off})
                prev = tails[i]
                for o in offs:
                    n = len(node_chips)
                    node_chips.append(ec.get(o, 0))
                    node_edge.append(i)
                    node_off.append(o)
                    if i == q_edge and o == q_off:
                        q_node = n
                    seg_a.append(prev)
                    seg_b.append(n)
                    seg_edge.append(i)
                    prev = n
                seg_a.append(prev)
                seg_b.append(heads[i])
                seg_edge.append(i)
            else:
                seg_a.append(tails[i])
                seg_b.append(heads[i])
                seg_edge.append(i)
        n_nodes = len(node_chips)
        adj: list[list[int]] = [[] for _ in range(n_nodes)]
        for s in range(len(seg_a)):
            a, b = seg_a[s], seg_b[s]
            if a != b:
                adj[a].append(s)
                adj[b].append(s)

        burnt = [False] * n_nodes
        count = [0] * n_nodes
        burnt[q_node] = True
        queue = deque([q_node])
        n_burnt = 1
        while queue:
            a = queue.popleft()
            for s in adj[a]:
                b = seg_b[s] if seg_a[s] == a else seg_a[s]
                if burnt[b]:
                    continue
                count[b] += 1
                if count[b] > node_chips[b]:
                    burnt[b] = True
                    n_burnt += 1
                    queue.append(b)
        if n_burnt == n_nodes:
            break

        # fire the unburnt set along every segment leaving it
        out = []
        eps = None
        for s in range(len(seg_a)):
            a, b = seg_a[s], seg_b[s]
            if burnt[a] == burnt[b]:
                continue
            i = seg_edge[s]
            # seg_a is always the lower end along the edge, seg_b the upper one
            oa = 0 if a < V else node_off[a]
            ob = lengths[i] if b < V else node_off[b]
            if burnt[a]:
                src, o_src, o_dst = b, ob, oa
            else:
                src, o_src, o_dst = a, oa, ob
            length = abs(o_dst - o_src)
            out.append((i, src, o_src, o_dst))
            if eps is None or length < eps:
                eps = length
        for i, src, o_src, o_dst in out:
            if src < V:
                vchips[src] -= 1
            else:
                ec = echips[i]
                ec[o_src] -= 1
                if not ec[o_src]:
                    del ec[o_src]
            o_new = o_src + eps if o_dst > o_src else o_src - eps
            if o_new == 0:
                vchips[tails[i]] += 1
            elif o_new == lengths[i]:
                vchips[heads[i]] += 1
            else:
                ec = echips[i]
                ec[o_new] = ec.get(o_new, 0) + 1
            moves.append((i, o_src, o_new, 1))
    else:
        raise BurningDidNotTerminate(f"no reduced divisor after {MAX_FIRINGS} firings")

    result: dict[Point, int] = {}
    for v in range(V):
        if vchips[v]:
            result[Point("v", graph.vertices[v])] = vchips[v]
    for i in range(E):
        for o, c in echips[i].items():
            if c:
                result[Point("e", edges[i].id, Fraction(o, S))] = c
    return result, ChipFlow(graph, S, moves)
