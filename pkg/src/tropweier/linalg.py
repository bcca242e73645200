"""Exact solves of grounded weighted-Laplacian systems over the rationals."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence


class CurrentNotConserved(ValueError):
    """External currents must sum to exactly zero."""


class SingularSystem(ArithmeticError):
    pass


class _Infinite:
    """Resistance between points in different components."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFINITE"

    def __reduce__(self):
        return (_Infinite, ())


INFINITE = _Infinite()


def solve(matrix: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> list[Fraction]:
    """Solve ``matrix @ x = rhs`` exactly by Gaussian elimination.

    Rows are pivoted by the largest absolute value in the current column.
    Raises :class:`SingularSystem` if the matrix is singular.
    """
    n = len(matrix)
    a = [[Fraction(x) for x in row] + [Fraction(b)] for row, b in zip(matrix, rhs)]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(a[r][col]))
        if a[piv][col] == 0:
            raise SingularSystem("matrix is singular")
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
        prow = a[col]
        p = prow[col]
        for r in range(col + 1, n):
            row = a[r]
            f = row[col]
            if f == 0:
                continue
            f /= p
            for k in range(col, n + 1):
                if prow[k]:
                    row[k] -= f * prow[k]
    x = [Fraction(0)] * n
    for r in range(n - 1, -1, -1):
        row = a[r]
        s = row[n]
        for k in range(r + 1, n):
            if row[k]:
                s -= row[k] * x[k]
        x[r] = s / row[r]
    return x


@dataclass
class LaplacianSystem:
    """Conductance data of a resistor network on a vertex set.

    ``conductance[u][v]`` is the sum of ``1/length`` over edges joining
    ``u`` and ``v`` (loops contribute nothing).
    """

    vertices: list
    conductance: dict = field(default_factory=dict)
    ground: object = None

    @classmethod
    def build(cls, vertices: Iterable, edges: Iterable[tuple], ground=None) -> "LaplacianSystem":
        """``edges`` yields ``(u, v, length)``; lengths are resistances."""
        verts = list(vertices)
        cond: dict = {v: {} for v in verts}
        for u, v, length in edges:
            if u == v:
                continue
            c = 1 / Fraction(length)
            cond[u][v] = cond[u].get(v, Fraction(0)) + c
            cond[v][u] = cond[v].get(u, Fraction(0)) + c
        return cls(verts, cond, verts[0] if ground is None else ground)

    @classmethod
    def from_graph(cls, graph, ground=None) -> "LaplacianSystem":
        return cls.build(graph.vertices, ((e.u, e.v, e.length) for e in graph.edges), ground)

    def component_of(self, v) -> set:
        seen = {v}
        stack = [v]
        while stack:
            a = stack.pop()
            for b in self.conductance[a]:
                if b not in seen:
                    seen.add(b)
                    stack.append(b)
        return seen

    def matrix(self, order: Sequence) -> list[list[Fraction]]:
        index = {v: i for i, v in enumerate(order)}
        m = [[Fraction(0)] * len(order) for _ in order]
        for u in order:
            i = index[u]
            for v, c in self.conductance[u].items():
                m[i][i] += c
                j = index.get(v)
                if j is not None:
                    m[i][j] -= c
        return m


def solve_grounded(system: LaplacianSystem, currents: Mapping, ground=None) -> dict:
    """Potentials with value 0 at the ground satisfying Kirchhoff's current law.

    ``currents[v]`` is the external current injected at ``v``; the values
    must sum to zero.  Only the ground's connected component is solved;
    all currents must live there.
    """
    total = sum((Fraction(c) for c in currents.values()), Fraction(0))
    if total != 0:
        raise CurrentNotConserved(f"currents sum to {total}, not 0")
    ground = system.ground if ground is None else ground
    comp = system.component_of(ground)
    for v, c in currents.items():
        if c and v not in comp:
            raise SingularSystem(f"current at {v!r} outside the ground's component")
    order = [v for v in system.vertices if v in comp and v != ground]
    pot = {v: Fraction(0) for v in system.vertices}
    if order:
        x = solve(system.matrix(order), [Fraction(currents.get(v, 0)) for v in order])
        pot.update(zip(order, x))
    return pot


def vertex_resistance(system: LaplacianSystem, u, v):
    """Effective resistance between vertices; :data:`INFINITE` if disconnected."""
    if u == v:
        return Fraction(0)
    if v not in system.component_of(u):
        return INFINITE
    pot = solve_grounded(system, {u: Fraction(1), v: Fraction(-1)}, ground=v)
    return pot[u]


def residual(system: LaplacianSystem, potentials: Mapping, currents: Mapping) -> dict:
    """``L x - b`` at every vertex (all zeros for an exact solve)."""
    out = {}
    for u in system.vertices:
        s = Fraction(0)
        for v, c in system.conductance[u].items():
            s += c * (potentials[u] - potentials[v])
        out[u] = s - Fraction(currents.get(u, 0))
    return out
