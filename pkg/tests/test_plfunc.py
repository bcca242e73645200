from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tropweier.electrical import voltage_function
from tropweier.graph import from_edge_list
from tropweier.plfunc import DiscontinuousFunction, PLFunction

from .helpers import graph_points, graphs

H = Fraction(1, 2)


def test_canonical_form_merges_collinear_pieces(unit_circle):
    f = PLFunction(unit_circle, {"e0": ((0, Fraction(1, 4), H, 1), (0, Fraction(1, 4), H, 0))})
    assert f.pieces["e0"] == ((0, H, 1), (0, H, 0))


def test_bad_breakpoints_rejected(unit_circle):
    with pytest.raises(ValueError):
        PLFunction(unit_circle, {"e0": ((0, H), (0, 1))})
    with pytest.raises(ValueError):
        PLFunction(unit_circle, {"e0": ((0, H, H, 1), (0, 1, 1, 0))})
    with pytest.raises(DiscontinuousFunction):
        PLFunction(unit_circle, {"e0": ((0, 1), (0, 1))})


def test_evaluation_and_slopes(unit_circle):
    c = unit_circle
    f = PLFunction(c, {"e0": ((0, H, 1), (0, H, 0))})
    assert f.value(c.edge_point("e0", Fraction(1, 8))) == Fraction(1, 8)
    assert f.slope_at("e0", H) == -1 and f.slope_at("e0", H, side=-1) == 1
    assert f.extreme_values() == (0, H)
    assert f.integral("e0") == Fraction(1, 4)
    assert f.is_integral() and not (f / 3).is_integral()


def test_maximum_inserts_crossings(unit_circle):
    f = PLFunction(unit_circle, {"e0": ((0, H, 1), (0, H, 0))})
    g = f.maximum(Fraction(1, 4))
    assert g.pieces["e0"] == ((0, Fraction(1, 4), H, Fraction(3, 4), 1),
                              (Fraction(1, 4), Fraction(1, 4), H, Fraction(1, 4), Fraction(1, 4)))


def test_from_slopes_anchors():
    path = from_edge_list([("u", "v", 2)])
    f = PLFunction.from_slopes(path, {"e0": [(0, 1, 1), (1, 2, -1)]},
                               anchor=path.vertex_point("v"), anchor_value=5)
    assert f.value(path.vertex_point("u")) == 5
    assert f.value(path.edge_point("e0", 1)) == 6


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_laplacian_is_additive_and_balanced(data):
    g = data.draw(graphs(max_vertices=4))
    y, z, w = (data.draw(graph_points(g)) for _ in range(3))
    f = voltage_function(g, y, z).function
    h = voltage_function(g, z, w).function
    lf, lh, lsum = f.laplacian(), h.laplacian(), (f + 3 * h).laplacian()
    keys = set(lf) | set(lh) | set(lsum)
    assert all(lsum.get(p, 0) == lf.get(p, 0) + 3 * lh.get(p, 0) for p in keys)
    assert sum(lsum.values()) == 0
    assert (f - f).all_slopes() == [0] * len(g.edges)
