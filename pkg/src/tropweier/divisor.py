"""Divisors, principal divisors, reduced divisors and Baker-Norine rank."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

from .burning import ChipFlow, burn_reduce
from .graph import MetricGraph, Point
from .linalg import LaplacianSystem, solve_grounded
from .plfunc import PLFunction


class NonIntegralFunction(ValueError):
    pass


class Divisor(Mapping):
    """Finite formal sum of points with integer coefficients (immutable)."""

    __slots__ = ("_c", "_hash", "degree")

    def __init__(self, coeffs: Mapping[Point, int] | Iterable[tuple[Point, int]] | None = None):
        c: dict[Point, int] = {}
        if coeffs is not None:
            items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
            for p, k in items:
                if int(k) != k:
                    raise ValueError(f"non-integer coefficient {k} at {p}")
                c[p] = c.get(p, 0) + int(k)
        self._c = {p: k for p, k in sorted(c.items()) if k}
        self._hash = None
        self.degree = sum(self._c.values())

    @classmethod
    def point(cls, p: Point, k: int = 1) -> "Divisor":
        return cls({p: k})

    def __getitem__(self, p: Point) -> int:
        return self._c.get(p, 0)

    def __iter__(self):
        return iter(self._c)

    def __len__(self) -> int:
        return len(self._c)

    def __contains__(self, p) -> bool:
        return p in self._c

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._c.items()))
        return self._hash

    def __eq__(self, other) -> bool:
        if isinstance(other, Divisor):
            return self._c == other._c
        if isinstance(other, Mapping):
            return self._c == {p: k for p, k in other.items() if k}
        return NotImplemented

    def __add__(self, other: Mapping) -> "Divisor":
        out = dict(self._c)
        for p, k in other.items():
            out[p] = out.get(p, 0) + k
        return Divisor(out)

    def __sub__(self, other: Mapping) -> "Divisor":
        out = dict(self._c)
        for p, k in other.items():
            out[p] = out.get(p, 0) - k
        return Divisor(out)

    def __neg__(self) -> "Divisor":
        return Divisor({p: -k for p, k in self._c.items()})

    def __mul__(self, n: int) -> "Divisor":
        return Divisor({p: n * k for p, k in self._c.items()})

    __rmul__ = __mul__

    def is_effective(self) -> bool:
        return all(k > 0 for k in self._c.values())

    def positive_part(self) -> "Divisor":
        return Divisor({p: k for p, k in self._c.items() if k > 0})

    def negative_part(self) -> "Divisor":
        return Divisor({p: -k for p, k in self._c.items() if k < 0})

    def degree_away_from(self, q: Point) -> int:
        return self.degree - self[q]

    def points(self) -> list[Point]:
        """The support as a multiset (effective part only)."""
        return [p for p, k in self._c.items() for _ in range(max(k, 0))]

    def __repr__(self) -> str:
        if not self._c:
            return "Divisor(0)"
        return "Divisor(" + " + ".join(f"{k}*{p}" for p, k in self._c.items()) + ")"


def _rational_divisor(f: PLFunction) -> dict[Point, Fraction]:
    return f.laplacian()


def principal_divisor(f: PLFunction) -> Divisor:
    """``Div(f)``: at each point, the sum of outgoing slopes of ``f``."""
    lap = _rational_divisor(f)
    if any(c.denominator != 1 for c in lap.values()) or not f.is_integral():
        raise NonIntegralFunction("function does not have integer slopes")
    return Divisor({p: int(c) for p, c in lap.items()})


def zeros(f: PLFunction) -> Divisor:
    return principal_divisor(f).positive_part()


def poles(f: PLFunction) -> Divisor:
    return principal_divisor(f).negative_part()


def interpolate_level(f: PLFunction, level) -> Divisor:
    """``poles(f) + Div(max(f, level))``: an effective divisor between poles and zeros."""
    return poles(f) + principal_divisor(f.maximum(level))


def canonical_divisor(graph: MetricGraph) -> Divisor:
    """``K = sum (valence(x) - 2) x``, supported on vertices of valence != 2."""
    return Divisor({graph.vertex_point(v): graph.local_type(graph.vertex_point(v)) - 2
                    for v in graph.vertices})


def base_point(graph: MetricGraph) -> Point:
    """Global basepoint used for class comparisons: the first vertex."""
    return graph.vertex_point(graph.vertices[0])


def q_energy(graph: MetricGraph, q: Point, D: Mapping[Point, int]) -> Fraction:
    """Sum of ``j_q^{y_i}(y_j)`` over all ordered pairs of chips of ``D``."""
    D = Divisor(D)
    if not D.is_effective():
        raise ValueError("q-energy is defined for effective divisors")
    ref = graph.subdivide_at(list(D) + [q])
    fine = ref.graph
    qn = ref.to_refined(q).name
    currents: dict[str, Fraction] = {}
    for p, k in D.items():
        n = ref.to_refined(p).name
        currents[n] = currents.get(n, Fraction(0)) + k
    currents[qn] = currents.get(qn, Fraction(0)) - D.degree
    pot = solve_grounded(LaplacianSystem.from_graph(fine, ground=qn), currents)
    return sum((pot[n] * c for n, c in currents.items() if n != qn), Fraction(0))


@dataclass(frozen=True)
class ReducedDivisor:
    """``divisor`` is the ``q``-reduced form of ``start``; ``flow`` records the moves."""

    q: Point
    divisor: Divisor
    start: Divisor
    flow: ChipFlow

    @property
    def witness(self) -> PLFunction:
        """PL function with integer slopes, ``Div = divisor - start``, zero at ``q``."""
        return self.flow.function(anchor=self.q)

    def at_base(self) -> int:
        return self.divisor[self.q]


@lru_cache(maxsize=4096)
def _debt_transfer(graph: MetricGraph, y: Point, q: Point):
    """``G = red_y((g+1) q)``; ``G - (g+1) q`` is principal and has a chip at ``y``."""
    g = graph.genus
    chips, flow = burn_reduce(graph, y, {q: g + 1})
    return Divisor(chips), flow


def reduce(graph: MetricGraph, q: Point, D: Mapping[Point, int]) -> ReducedDivisor:
    """The ``q``-reduced divisor linearly equivalent to ``D``.

    Negative coefficients away from ``q`` are first paid off by adding
    multiples of principal divisors that carry a chip to the debtor point.
    """
    q = graph.check_point(q)
    D = Divisor(D)
    chips = dict(D)
    flow = ChipFlow(graph)
    for y, c in D.items():
        if c >= 0 or y == q:
            continue
        G, fl = _debt_transfer(graph, y, q)
        for p, k in G.items():
            chips[p] = chips.get(p, 0) - c * k
        chips[q] = chips.get(q, 0) + c * (graph.genus + 1)
        flow = flow + fl * (-c)
    R, fl = burn_reduce(graph, q, chips)
    return ReducedDivisor(q, Divisor(R), D, flow + fl)


def class_key(graph: MetricGraph, D: Mapping[Point, int]) -> Divisor:
    """Canonical representative of ``[D]``: its reduced form at the global basepoint."""
    return reduce(graph, base_point(graph), D).divisor


def is_effective_class(graph: MetricGraph, D: Mapping[Point, int]) -> bool:
    D = Divisor(D)
    if D.degree < 0:
        return False
    if D.is_effective():
        return True
    q = base_point(graph)
    return reduce(graph, q, D).divisor[q] >= 0


def linearly_equivalent(graph: MetricGraph, D: Mapping, E: Mapping):
    """Return ``(equivalent, witness)`` with ``Div(witness) = D - E`` when equivalent."""
    D, E = Divisor(D), Divisor(E)
    if D.degree != E.degree:
        return False, None
    q = base_point(graph)
    rd = reduce(graph, q, D)
    re = reduce(graph, q, E)
    if rd.divisor != re.divisor:
        return False, None
    return True, re.witness - rd.witness


def rank_determining_set(graph: MetricGraph) -> list[Point]:
    """Vertices plus edge midpoints: the vertex set of a loopless model."""
    pts = [graph.vertex_point(v) for v in graph.vertices]
    pts += [graph.edge_point(e.id, e.length / 2) for e in graph.edges]
    return pts


def _minus_point(graph: MetricGraph, D: Divisor, x: Point) -> Divisor | None:
    """Effective representative of ``[D - x]`` for effective ``D``, or None."""
    if D[x] > 0:
        return D - Divisor.point(x)
    R = reduce(graph, x, D).divisor
    if R[x] < 1:
        return None
    return R - Divisor.point(x)


def rank(graph: MetricGraph, D: Mapping[Point, int]) -> int:
    """Baker-Norine rank of ``D``.

    Uses ``deg D - g`` when ``deg D >= 2g - 1``; otherwise tests
    ``[D - E] >= 0`` for all effective ``E`` supported on a rank-determining set.
    """
    D = Divisor(D)
    g = graph.genus
    d = D.degree
    if d < 0:
        return -1
    q0 = base_point(graph)
    R0 = reduce(graph, q0, D).divisor
    if R0[q0] < 0:
        return -1
    if d >= 2 * g - 1:
        return d - g
    return _rank_of_effective(graph, R0)


def _rank_of_effective(graph: MetricGraph, D: Divisor) -> int:
    rds = rank_determining_set(graph)
    memo: dict[tuple[Divisor, int], bool] = {}

    def survives(E: Divisor, k: int) -> bool:
        # every effective divisor of degree k on the rank-determining set can be removed
        if k == 0:
            return True
        key = (class_key(graph, E), k)
        if key in memo:
            return memo[key]
        ok = True
        for x in rds:
            rest = _minus_point(graph, E, x)
            if rest is None or not survives(rest, k - 1):
                ok = False
                break
        memo[key] = ok
        return ok

    k = max(0, D.degree - graph.genus)
    while k < D.degree and survives(D, k + 1):
        k += 1
    return k


def riemann_roch_defect(graph: MetricGraph, D: Mapping) -> int:
    """``r(D) - r(K - D) - (deg D + 1 - g)``; zero by Riemann-Roch."""
    D = Divisor(D)
    K = canonical_divisor(graph)
    return rank(graph, D) - rank(graph, K - D) - (D.degree + 1 - graph.genus)
