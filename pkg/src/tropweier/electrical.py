"""Voltage functions, effective resistance and the canonical measure.

Each edge of length ``L`` is a resistor of resistance ``L``.  Voltages are
exact :class:`~tropweier.plfunc.PLFunction` objects obtained by solving the
grounded Laplacian of a model refined at the source and sink.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .graph import MetricGraph, Point
from .linalg import INFINITE, LaplacianSystem, solve_grounded, vertex_resistance
from .plfunc import PLFunction


class NotQuadratic(ValueError):
    """Resistance restricted to the sampled edge is not a single quadratic."""


@dataclass(frozen=True)
class VoltageFunction:
    """``function`` has divisor ``sink - source`` and vanishes at ``sink``."""

    function: PLFunction
    source: Point
    sink: Point

    def __call__(self, x: Point) -> Fraction:
        return self.function.value(x)


def potential(graph: MetricGraph, currents: dict[Point, Fraction], ground: Point) -> PLFunction:
    """PL function with ``Div(f) = -currents`` that vanishes at ``ground``.

    ``currents`` is the externally applied current (positive = injected);
    it must have total zero.
    """
    ref = graph.subdivide_at(list(currents) + [ground])
    g_node = ref.to_refined(ground).name
    b: dict[str, Fraction] = {}
    for p, c in currents.items():
        n = ref.to_refined(p).name
        b[n] = b.get(n, Fraction(0)) + Fraction(c)
    pot = solve_grounded(LaplacianSystem.from_graph(ref.graph, ground=g_node), b)
    return PLFunction.from_refined_values(ref, pot)


def voltage_function(graph: MetricGraph, y: Point, z: Point) -> VoltageFunction:
    """Voltage when one unit of current flows from ``y`` to ``z``, grounded at ``z``."""
    y = graph.check_point(y)
    z = graph.check_point(z)
    if y == z:
        return VoltageFunction(PLFunction.constant(graph, 0), y, z)
    f = potential(graph, {y: Fraction(1), z: Fraction(-1)}, z)
    return VoltageFunction(f, y, z)


def resistance(graph: MetricGraph, x: Point, y: Point) -> Fraction:
    """Effective resistance ``r(x, y)``."""
    x = graph.check_point(x)
    y = graph.check_point(y)
    if x == y:
        return Fraction(0)
    return voltage_function(graph, x, y)(x)


@dataclass(frozen=True)
class MeasureTable:
    """Per-edge constant density of the canonical measure and its mass."""

    density: dict
    mass: dict
    total: Fraction

    def rows(self):
        for eid in self.density:
            yield eid, self.density[eid], self.mass[eid]

    def measure_of(self, edge_id: str, start=0, end=None) -> Fraction:
        """Mass of the sub-segment ``[start, end]`` of an edge."""
        d = self.density[edge_id]
        if end is None:
            return self.mass[edge_id] - d * Fraction(start)
        return d * (Fraction(end) - Fraction(start))


def complement_resistance(graph: MetricGraph, edge_id: str):
    """Resistance between the ends of an edge with its interior removed.

    Returns :data:`~tropweier.linalg.INFINITE` when removing the edge
    disconnects its ends, and 0 for a loop.
    """
    e = graph.edge(edge_id)
    if e.is_loop:
        return Fraction(0)
    rest = ((f.u, f.v, f.length) for f in graph.edges if f.id != e.id)
    system = LaplacianSystem.build(graph.vertices, rest)
    return vertex_resistance(system, e.u, e.v)


def canonical_measure(graph: MetricGraph) -> MeasureTable:
    """Density ``1 / (L_e + R_rest)`` on each edge; zero on bridges."""
    density = {}
    mass = {}
    for e in graph.edges:
        rest = complement_resistance(graph, e.id)
        d = Fraction(0) if rest is INFINITE else 1 / (e.length + rest)
        density[e.id] = d
        mass[e.id] = d * e.length
    return MeasureTable(density, mass, sum(mass.values(), Fraction(0)))


def second_difference_oracle(graph: MetricGraph, edge_id: str, y0: Point, mesh: int = 4) -> Fraction:
    """Density of the canonical measure on an edge from ``-r''(x, y0) / 2``.

    Samples ``r(x, y0)`` at ``mesh + 1`` equispaced points, checks that the
    third differences vanish and converts the (constant) second difference.
    """
    if mesh < 2:
        raise ValueError("mesh must be at least 2")
    e = graph.edge(edge_id)
    h = e.length / mesh
    values = [resistance(graph, graph.edge_point(e.id, k * h), y0) for k in range(mesh + 1)]
    d1 = [b - a for a, b in zip(values, values[1:])]
    d2 = [b - a for a, b in zip(d1, d1[1:])]
    if any(x != d2[0] for x in d2):
        raise NotQuadratic(f"r(., {y0}) is not quadratic along edge {edge_id!r}")
    return -d2[0] / (2 * h * h)
