"""Compact metric graphs with exact rational edge lengths.

A metric graph is stored through one combinatorial model: a vertex list and
an edge list, each edge carrying an oriented pair of endpoints and a positive
:class:`~fractions.Fraction` length.  Loops and parallel edges are allowed.
Points are either vertices or interior points of an edge, addressed by an
offset measured from the edge's first endpoint.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping


class GraphError(ValueError):
    """Raised when a raw graph description cannot be validated."""


class DisconnectedGraph(GraphError):
    pass


class NonpositiveLength(GraphError):
    pass


class DanglingEndpoint(GraphError):
    pass


class PointError(ValueError):
    """Raised for points that do not lie on the graph."""


def as_fraction(value) -> Fraction:
    """Parse ``value`` (int, Fraction or a "p/q" string) into a Fraction.

    Floats are rejected so that no binary rounding sneaks into the core.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if "." in text or "e" in text.lower():
            raise ValueError(f"decimal notation not allowed for rationals: {value!r}")
        return Fraction(text)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def format_fraction(value: Fraction) -> str:
    """Serialize as "n" or "p/q" in lowest terms."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class Edge:
    id: str
    u: str
    v: str
    length: Fraction

    @property
    def is_loop(self) -> bool:
        return self.u == self.v


@dataclass(frozen=True, order=True)
class Point:
    """A point of a metric graph.

    Use :meth:`MetricGraph.vertex_point` / :meth:`MetricGraph.edge_point`
    to build points; the latter canonicalizes offsets 0 and ``length`` to
    the corresponding endpoint, so equal locations compare equal.
    """

    kind: str  # "v" or "e"
    name: str  # vertex id or edge id
    offset: Fraction = Fraction(0)

    @property
    def is_vertex(self) -> bool:
        return self.kind == "v"

    def __str__(self) -> str:
        if self.is_vertex:
            return f"vertex:{self.name}"
        return f"edge:{self.name}@{format_fraction(self.offset)}"


@dataclass(frozen=True)
class Segment:
    """An edge of a model viewed as a closed segment ``[s, t]``."""

    edge: str
    s: Point
    t: Point
    length: Fraction


class MetricGraph:
    """A validated, immutable metric graph.

    Parameters
    ----------
    vertices:
        Vertex ids.
    edges:
        Iterable of :class:`Edge`.  Edge ids must be unique.

    Use :func:`validate_model` to build one from untrusted input.
    """

    def __init__(self, vertices: Iterable[str], edges: Iterable[Edge]):
        self._vertices = tuple(str(v) for v in vertices)
        self._edges = tuple(edges)
        self._vertex_index = {v: i for i, v in enumerate(self._vertices)}
        self._edge_index = {e.id: i for i, e in enumerate(self._edges)}
        if len(self._vertex_index) != len(self._vertices):
            raise GraphError("duplicate vertex ids")
        if len(self._edge_index) != len(self._edges):
            raise GraphError("duplicate edge ids")
        if not self._vertices:
            raise GraphError("graph has no vertices")
        for e in self._edges:
            if e.u not in self._vertex_index or e.v not in self._vertex_index:
                raise DanglingEndpoint(f"edge {e.id!r} has an endpoint that is not a vertex")
            if e.length <= 0:
                raise NonpositiveLength(f"edge {e.id!r} has length {e.length}")
        if len(self.components(self._edges)) != 1:
            raise DisconnectedGraph("metric graph must be connected")

    # -- basic accessors -------------------------------------------------

    @property
    def vertices(self) -> tuple[str, ...]:
        return self._vertices

    @property
    def edges(self) -> tuple[Edge, ...]:
        return self._edges

    def edge(self, edge_id: str) -> Edge:
        try:
            return self._edges[self._edge_index[edge_id]]
        except KeyError:
            raise PointError(f"unknown edge {edge_id!r}") from None

    def has_vertex(self, v: str) -> bool:
        return v in self._vertex_index

    def vertex_index(self, v: str) -> int:
        return self._vertex_index[v]

    def edge_index(self, edge_id: str) -> int:
        return self._edge_index[edge_id]

    @cached_property
    def genus(self) -> int:
        return len(self._edges) - len(self._vertices) + 1

    @cached_property
    def total_length(self) -> Fraction:
        return sum((e.length for e in self._edges), Fraction(0))

    @cached_property
    def incidence(self) -> dict[str, list[tuple[Edge, int]]]:
        """Map vertex -> list of (edge, end) with end 0 = tail, 1 = head."""
        inc: dict[str, list[tuple[Edge, int]]] = {v: [] for v in self._vertices}
        for e in self._edges:
            inc[e.u].append((e, 0))
            inc[e.v].append((e, 1))
        return inc

    def __eq__(self, other) -> bool:
        if not isinstance(other, MetricGraph):
            return NotImplemented
        return self._vertices == other._vertices and self._edges == other._edges

    def __hash__(self) -> int:
        return hash((self._vertices, self._edges))

    def __repr__(self) -> str:
        return f"MetricGraph(|V|={len(self._vertices)}, |E|={len(self._edges)}, genus={self.genus})"

    # -- points ----------------------------------------------------------

    def vertex_point(self, v: str) -> Point:
        if v not in self._vertex_index:
            raise PointError(f"unknown vertex {v!r}")
        return Point("v", v)

    def edge_point(self, edge_id: str, offset) -> Point:
        e = self.edge(edge_id)
        offset = as_fraction(offset)
        if offset < 0 or offset > e.length:
            raise PointError(f"offset {offset} outside edge {edge_id!r} of length {e.length}")
        if offset == 0:
            return Point("v", e.u)
        if offset == e.length:
            return Point("v", e.v)
        return Point("e", e.id, offset)

    def check_point(self, x: Point) -> Point:
        """Return ``x`` after verifying it is a canonical point of this graph."""
        if x.is_vertex:
            return self.vertex_point(x.name)
        y = self.edge_point(x.name, x.offset)
        if y != x:
            raise PointError(f"non-canonical point {x}")
        return y

    def locations(self, x: Point) -> list[tuple[str, Fraction]]:
        """All (edge id, offset) pairs describing ``x`` (several for a vertex)."""
        if not x.is_vertex:
            return [(x.name, x.offset)]
        out = []
        for e, end in self.incidence[x.name]:
            out.append((e.id, Fraction(0) if end == 0 else e.length))
        return out

    def compare_points(self, x: Point, y: Point) -> str:
        return "equal" if self.check_point(x) == self.check_point(y) else "distinct"

    # -- topology --------------------------------------------------------

    def local_type(self, x: Point) -> int:
        """Valence: number of branches of a small punctured neighborhood of x."""
        x = self.check_point(x)
        if not x.is_vertex:
            return 2
        return len(self.incidence[x.name])

    def components(self, edges: Iterable[Edge]) -> list[set[str]]:
        """Connected components of ``(self.vertices, edges)``."""
        adj: dict[str, list[str]] = {v: [] for v in self._vertices}
        for e in edges:
            adj[e.u].append(e.v)
            adj[e.v].append(e.u)
        seen: set[str] = set()
        comps = []
        for v in self._vertices:
            if v in seen:
                continue
            comp = {v}
            queue = deque([v])
            seen.add(v)
            while queue:
                a = queue.popleft()
                for b in adj[a]:
                    if b not in seen:
                        seen.add(b)
                        comp.add(b)
                        queue.append(b)
            comps.append(comp)
        return comps

    @cached_property
    def bridges(self) -> frozenset[str]:
        """Ids of edges whose interior disconnects the graph when removed."""
        out = set()
        for e in self._edges:
            if e.is_loop:
                continue
            rest = [f for f in self._edges if f.id != e.id]
            if not any(e.u in c and e.v in c for c in self.components(rest)):
                out.add(e.id)
        return frozenset(out)

    def segment(self, edge_id: str) -> Segment:
        e = self.edge(edge_id)
        return Segment(e.id, Point("v", e.u), Point("v", e.v), e.length)

    def segments(self) -> list[Segment]:
        return [self.segment(e.id) for e in self._edges]

    def segment_class(self, edge_id) -> str:
        """Classify a model edge as ``"bridge"``, ``"loop"`` or ``"ordinary"``."""
        if isinstance(edge_id, Segment):
            edge_id = edge_id.edge
        e = self.edge(edge_id)
        if e.is_loop:
            return "loop"
        if e.id in self.bridges:
            return "bridge"
        return "ordinary"

    # -- metric ----------------------------------------------------------

    @cached_property
    def vertex_distances(self) -> dict[str, dict[str, Fraction]]:
        """All-pairs shortest path lengths between vertices (Floyd-Warshall)."""
        verts = self._vertices
        inf = None
        dist: dict[str, dict[str, Fraction | None]] = {
            a: {b: (Fraction(0) if a == b else inf) for b in verts} for a in verts
        }
        for e in self._edges:
            if e.is_loop:
                continue
            cur = dist[e.u][e.v]
            if cur is None or e.length < cur:
                dist[e.u][e.v] = dist[e.v][e.u] = e.length
        for k in verts:
            dk = dist[k]
            for a in verts:
                dak = dist[a][k]
                if dak is None:
                    continue
                da = dist[a]
                for b in verts:
                    dkb = dk[b]
                    if dkb is None:
                        continue
                    cand = dak + dkb
                    if da[b] is None or cand < da[b]:
                        da[b] = cand
        return dist  # type: ignore[return-value]

    def _anchors(self, x: Point) -> list[tuple[str, Fraction]]:
        if x.is_vertex:
            return [(x.name, Fraction(0))]
        e = self.edge(x.name)
        return [(e.u, x.offset), (e.v, e.length - x.offset)]

    def path_distance(self, x: Point, y: Point) -> Fraction:
        """Exact shortest-path distance between two points."""
        x = self.check_point(x)
        y = self.check_point(y)
        if x == y:
            return Fraction(0)
        vd = self.vertex_distances
        best = None
        for a, da in self._anchors(x):
            for b, db in self._anchors(y):
                cand = da + vd[a][b] + db
                if best is None or cand < best:
                    best = cand
        if not x.is_vertex and not y.is_vertex and x.name == y.name:
            direct = abs(x.offset - y.offset)
            if direct < best:
                best = direct
        return best

    # -- refinement ------------------------------------------------------

    def subdivide_at(self, points: Iterable[Point]) -> "Refinement":
        """Refine the model so every given interior point becomes a vertex."""
        cuts: dict[str, set[Fraction]] = {}
        for x in points:
            x = self.check_point(x)
            if not x.is_vertex:
                cuts.setdefault(x.name, set()).add(x.offset)
        return Refinement(self, {k: sorted(v) for k, v in cuts.items()})

    # -- serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "vertices": list(self._vertices),
            "edges": [
                {"id": e.id, "ends": [e.u, e.v], "length": format_fraction(e.length)}
                for e in self._edges
            ],
        }


def _fresh_name(base: str, taken: set[str]) -> str:
    name = base
    k = 1
    while name in taken:
        name = f"{base}~{k}"
        k += 1
    taken.add(name)
    return name


class Refinement:
    """A subdivided copy of a graph plus the maps between the two models.

    ``pieces[edge_id]`` lists ``(new_edge_id, start, end)`` with offsets in
    the original edge's parametrization.
    """

    def __init__(self, base: MetricGraph, cuts: Mapping[str, list[Fraction]]):
        self.base = base
        taken_v = set(base.vertices)
        taken_e = {e.id for e in base.edges}
        vertices = list(base.vertices)
        edges: list[Edge] = []
        self.pieces: dict[str, list[tuple[str, Fraction, Fraction]]] = {}
        self._new_vertex: dict[tuple[str, Fraction], str] = {}
        self._back: dict[str, Point] = {v: Point("v", v) for v in base.vertices}
        for e in base.edges:
            offs = [c for c in cuts.get(e.id, []) if 0 < c < e.length]
            if not offs:
                edges.append(e)
                self.pieces[e.id] = [(e.id, Fraction(0), e.length)]
                continue
            names = []
            for c in offs:
                name = _fresh_name(f"{e.id}@{format_fraction(c)}", taken_v)
                vertices.append(name)
                names.append(name)
                self._new_vertex[(e.id, c)] = name
                self._back[name] = Point("e", e.id, c)
            chain = [e.u] + names + [e.v]
            stops = [Fraction(0)] + offs + [e.length]
            plist = []
            for k in range(len(chain) - 1):
                eid = _fresh_name(f"{e.id}.{k}", taken_e)
                edges.append(Edge(eid, chain[k], chain[k + 1], stops[k + 1] - stops[k]))
                plist.append((eid, stops[k], stops[k + 1]))
            self.pieces[e.id] = plist
        self.graph = MetricGraph(vertices, edges)
        self._piece_origin = {
            pid: (eid, a) for eid, plist in self.pieces.items() for pid, a, _ in plist
        }

    def to_refined(self, x: Point) -> Point:
        x = self.base.check_point(x)
        if x.is_vertex:
            return Point("v", x.name)
        name = self._new_vertex.get((x.name, x.offset))
        if name is not None:
            return Point("v", name)
        for pid, a, b in self.pieces[x.name]:
            if a < x.offset < b:
                return self.graph.edge_point(pid, x.offset - a)
        raise PointError(f"cannot map {x}")  # pragma: no cover

    def to_original(self, y: Point) -> Point:
        y = self.graph.check_point(y)
        if y.is_vertex:
            return self._back[y.name]
        eid, a = self._piece_origin[y.name]
        return self.base.edge_point(eid, a + y.offset)


# -- construction from raw descriptions ---------------------------------


def validate_model(raw: Mapping) -> MetricGraph:
    """Build a :class:`MetricGraph` from a JSON-like mapping.

    The mapping has ``vertices`` (list of ids) and ``edges`` (list of
    ``{"id", "ends": [u, v], "length": "p/q"}``).  Missing edge ids are
    assigned as ``"e0", "e1", ...``.
    """
    if not isinstance(raw, Mapping):
        raise GraphError("graph description must be an object")
    try:
        vertices = [str(v) for v in raw["vertices"]]
        raw_edges = list(raw["edges"])
    except (KeyError, TypeError) as exc:
        raise GraphError(f"malformed graph description: {exc}") from None
    edges = []
    for k, item in enumerate(raw_edges):
        try:
            ends = item["ends"]
            if len(ends) != 2:
                raise GraphError(f"edge {k} must have exactly two ends")
            length = as_fraction(item["length"])
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            if isinstance(exc, GraphError):
                raise
            raise GraphError(f"malformed edge {k}: {exc}") from None
        eid = str(item.get("id", f"e{k}"))
        edges.append(Edge(eid, str(ends[0]), str(ends[1]), length))
    vset = set(vertices)
    for e in edges:
        if e.u not in vset or e.v not in vset:
            raise DanglingEndpoint(f"edge {e.id!r} references an unknown vertex")
    for e in edges:
        if e.length <= 0:
            raise NonpositiveLength(f"edge {e.id!r} has nonpositive length {e.length}")
    return MetricGraph(vertices, edges)


def genus(graph: MetricGraph) -> int:
    return graph.genus


def from_edge_list(triples, vertices=None) -> MetricGraph:
    """Convenience builder: ``triples`` of ``(u, v, length)`` or ``(id, u, v, length)``."""
    edges = []
    seen: list[str] = []
    for k, t in enumerate(triples):
        if len(t) == 3:
            eid, (u, v, length) = f"e{k}", t
        else:
            eid, u, v, length = t
        u, v = str(u), str(v)
        for w in (u, v):
            if w not in seen:
                seen.append(w)
        edges.append(Edge(str(eid), u, v, as_fraction(length)))
    return MetricGraph(vertices if vertices is not None else seen, edges)


def circle(length=1) -> MetricGraph:
    """A single loop edge ``e0`` at vertex ``o``."""
    return MetricGraph(["o"], [Edge("e0", "o", "o", as_fraction(length))])


def theta(a=1, b=1, c=1) -> MetricGraph:
    """Two vertices ``u``, ``v`` joined by edges ``a``, ``b``, ``c``."""
    return MetricGraph(
        ["u", "v"],
        [Edge("a", "u", "v", as_fraction(a)), Edge("b", "u", "v", as_fraction(b)),
         Edge("c", "u", "v", as_fraction(c))],
    )


def wedge_of_circles(lengths) -> MetricGraph:
    """Loops ``c0, c1, ...`` glued at vertex ``x0``."""
    return MetricGraph(
        ["x0"], [Edge(f"c{k}", "x0", "x0", as_fraction(L)) for k, L in enumerate(lengths)]
    )
