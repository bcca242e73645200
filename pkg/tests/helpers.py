"""Graph generators and named example graphs shared by the tests."""

from __future__ import annotations

import random
from fractions import Fraction

from hypothesis import strategies as st

from tropweier.graph import MetricGraph, circle, from_edge_list, theta, wedge_of_circles


def random_graph(rng: random.Random, max_vertices: int = 6, max_genus: int = 3,
                 max_denominator: int = 50, loops: bool = True) -> MetricGraph:
    """Random connected graph: a spanning tree plus extra edges up to ``max_genus``."""
    n = rng.randint(1, max_vertices)
    names = [f"v{k}" for k in range(n)]

    def length():
        return Fraction(rng.randint(1, 3 * max_denominator), rng.randint(1, max_denominator))

    triples = [(names[k], names[rng.randrange(k)], length()) for k in range(1, n)]
    extra = rng.randint(1 if n == 1 else 0, max_genus)
    for _ in range(extra):
        u, v = rng.choice(names), rng.choice(names)
        if u == v and not loops:
            continue
        triples.append((u, v, length()))
    if not triples:
        triples.append((names[0], names[0], length()))
    return from_edge_list(triples, vertices=names)


@st.composite
def graphs(draw, max_vertices: int = 5, max_genus: int = 3):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_graph(random.Random(seed), max_vertices, max_genus)


@st.composite
def graph_points(draw, graph: MetricGraph, max_denominator: int = 12):
    if draw(st.booleans()):
        return graph.vertex_point(draw(st.sampled_from(graph.vertices)))
    e = draw(st.sampled_from(graph.edges))
    k = draw(st.integers(1, max_denominator - 1))
    return graph.edge_point(e.id, e.length * Fraction(k, max_denominator))


def three_loop_chain(middle=(1, 1)) -> MetricGraph:
    """Loop, bridge, two-edge cycle, bridge, loop (genus 3)."""
    a, b = middle
    return from_edge_list([
        ("v1", "v1", Fraction(1)), ("v1", "v2", Fraction(1)),
        ("v2", "v3", Fraction(a)), ("v2", "v3", Fraction(b)),
        ("v3", "v4", Fraction(1)), ("v4", "v4", Fraction(1)),
    ])


def k4(lengths=(1, Fraction(3, 2), Fraction(7, 5), Fraction(6, 5), Fraction(4, 3), Fraction(9, 7))):
    pairs = [("a", "b"), ("a", "c"), ("a", "d"), ("b", "c"), ("b", "d"), ("c", "d")]
    return from_edge_list([(u, v, Fraction(x)) for (u, v), x in zip(pairs, lengths)])


def bridged_pair() -> MetricGraph:
    """A genus-2 theta and a genus-1 loop joined by the bridge ``e3``."""
    return from_edge_list([
        ("a", "b", Fraction(1)), ("a", "b", Fraction(2)), ("a", "b", Fraction(5, 2)),
        ("b", "c", Fraction(1)), ("c", "d", Fraction(1)), ("c", "d", Fraction(3, 2)),
    ])

