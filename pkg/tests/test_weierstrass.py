import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tropweier.divisor import Divisor, canonical_divisor, linearly_equivalent, rank
from tropweier.graph import circle, wedge_of_circles
from tropweier.weierstrass import (NonGenericRank, Sweeper, is_weierstrass, mesh_oracle,
                                   simplest_between, weierstrass_locus, weierstrass_on_segment)

from .helpers import bridged_pair, k4, random_graph, three_loop_chain


def circle_locus(N):
    c = circle(1)
    return c, weierstrass_locus(c, {c.vertex_point("o"): N})


def offsets(c, pts):
    return sorted(Fraction(0) if p.is_vertex else p.offset for p in pts)


def test_is_weierstrass_on_circle():
    c = circle(1)
    D = {c.vertex_point("o"): 3}
    assert is_weierstrass(c, D, c.edge_point("e0", Fraction(1, 3)))
    assert not is_weierstrass(c, D, c.edge_point("e0", Fraction(1, 4)))


def test_rank_minus_one_has_empty_locus():
    c = circle(1)
    D = {c.edge_point("e0", Fraction(1, 3)): 1, c.vertex_point("o"): -1}
    assert not is_weierstrass(c, D, c.vertex_point("o"))
    locus = weierstrass_locus(c, D)
    assert locus.points == [] and locus.generic
    assert mesh_oracle(c, D, 10) == []


@pytest.mark.parametrize("N", [1, 2, 3, 7, 12])
def test_circle_torsion_points(N):
    c, locus = circle_locus(N)
    assert offsets(c, locus.points) == [Fraction(k, N) for k in range(N)]
    assert locus.generic and locus.anomalies == 0


def test_mesh_oracle_on_circle():
    c = circle(1)
    hits = mesh_oracle(c, {c.vertex_point("o"): 3}, 12)
    assert offsets(c, hits) == [0, Fraction(1, 3), Fraction(2, 3)]


def generic_wedge_divisor(w, N):
    """``N - g`` chips at the wedge point and one at an irrational-looking spot per loop."""
    g = len(w.edges)
    D = {w.vertex_point("x0"): N - g}
    for k, e in enumerate(w.edges):
        D[w.edge_point(e.id, e.length * Fraction(100 + 37 * k, 331))] = 1
    return Divisor(D)


def test_wedge_of_two_circles_degree_four():
    w = wedge_of_circles([1, 1])
    locus = weierstrass_locus(w, generic_wedge_divisor(w, 4))
    assert len(locus.points) == 6
    assert locus.counts == {"c0": 3, "c1": 3}


def test_special_wedge_divisor_fills_the_graph():
    w = wedge_of_circles([1, 2, 3])
    locus = weierstrass_locus(w, {w.vertex_point("x0"): 5})
    assert not locus.generic
    assert {eid for eid, a, b in locus.intervals} == {"c0", "c1", "c2"}


def test_three_loop_chain_degenerate():
    g = three_loop_chain()
    D = {g.edge_point("e1", Fraction(1, 2)): 4}
    assert linearly_equivalent(g, D, canonical_divisor(g))[0]
    assert rank(g, D) == 2
    locus = weierstrass_locus(g, D)
    assert not locus.generic
    assert sorted((eid, a, b) for eid, a, b in locus.intervals) == [
        (e.id, 0, e.length) for e in g.edges]


def test_bridge_lies_in_canonical_locus():
    g = bridged_pair()
    assert g.bridges == frozenset({"e3"})
    locus = weierstrass_locus(g, canonical_divisor(g))
    assert ("e3", 0, 1) in locus.intervals
    assert not locus.generic


def test_k4_canonical_has_eight_points():
    g = k4()
    K = canonical_divisor(g)
    locus = weierstrass_locus(g, K)
    assert len(locus.points) == 8 and locus.generic
    assert all(is_weierstrass(g, K, p) for p in locus.points)
    with pytest.raises(NonGenericRank):
        weierstrass_on_segment(g, K, "e0")


def test_interval_endpoints_are_exact(theta123):
    t = theta123
    locus = weierstrass_locus(t, {t.vertex_point("u"): 4})
    assert locus.intervals == [("c", Fraction(8, 3), Fraction(3))]
    sw = Sweeper(t, {t.vertex_point("u"): 4})
    assert sw.is_weierstrass(t.edge_point("c", Fraction(8, 3)))
    assert not sw.is_weierstrass(t.edge_point("c", Fraction(8, 3) - Fraction(1, 10**6)))


def test_depth_cap_reports_undecided(monkeypatch):
    monkeypatch.setenv("TROPWEIER_MAX_REFINE", "1")
    c = circle(1)
    locus = weierstrass_locus(c, {c.vertex_point("o"): 12})
    assert locus.undecided and not locus.generic
    assert all(is_weierstrass(c, {c.vertex_point("o"): 12}, p) for p in locus.points)


def test_simplest_between():
    assert simplest_between(Fraction(1, 3), Fraction(1, 2)) == Fraction(2, 5)
    assert simplest_between(Fraction(0), Fraction(1, 7)) == Fraction(1, 8)
    assert simplest_between(Fraction(5, 2), Fraction(7, 2)) == 3
    assert simplest_between(Fraction(-1, 2), Fraction(1, 3)) == 0


def random_divisor(rng, g, N, denom=997):
    chips = {}
    for _ in range(N):
        e = rng.choice(g.edges)
        p = g.edge_point(e.id, e.length * Fraction(rng.randint(1, denom - 1), denom))
        chips[p] = chips.get(p, 0) + 1
    return Divisor(chips)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 6))
def test_sweep_agrees_with_mesh(seed, extra):
    rng = random.Random(seed)
    g = random_graph(rng, max_vertices=4, max_genus=3, max_denominator=9)
    N = max(g.genus, 1) + extra
    D = random_divisor(rng, g, N)
    locus = weierstrass_locus(g, D)
    for p in locus.points:
        assert is_weierstrass(g, D, p, locus.rank)
    for eid, a, b in locus.intervals:
        assert is_weierstrass(g, D, g.edge_point(eid, (a + b) / 2), locus.rank)
    hits = mesh_oracle(g, D, 40, locus.rank)
    assert all(locus.covers(g, p) for p in hits)


@settings(max_examples=12, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 8))
def test_witness_slopes_track_edge_counts(seed, extra):
    # on e = [s, t] the witness of red_t - red_s takes at most three slopes,
    # adjacent ones differing by 1, all within [N-g-m, N-g-m+2] in absolute value
    from tropweier.divisor import reduce
    from tropweier.equidist import sample_generic_divisor

    rng = random.Random(seed)
    g = random_graph(rng, max_vertices=4, max_genus=3, max_denominator=9)
    N = max(g.genus, 1) + 1 + extra
    D, locus, _ = sample_generic_divisor(g, N, seed=seed, retries=128, with_locus=True)
    for e in g.edges:
        red_s = reduce(g, g.vertex_point(e.u), D).divisor
        f = reduce(g, g.vertex_point(e.v), red_s).witness
        slopes = [s for _, _, s in f.edge_slopes(e.id)]
        m = sum(1 for p in locus.points if not p.is_vertex and p.name == e.id)
        assert len(set(slopes)) <= 3
        assert all(abs(a - b) == 1 for a, b in zip(slopes, slopes[1:]))
        assert all(N - g.genus - m <= abs(s) <= N - g.genus - m + 2 for s in slopes)
