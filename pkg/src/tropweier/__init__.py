"""Exact divisor theory on metric graphs: reduced divisors, rank, resistance,
the canonical measure and Weierstrass points."""

from .divisor import (Divisor, canonical_divisor, class_key, is_effective_class, linearly_equivalent,
                      principal_divisor, q_energy, rank, reduce)
from .electrical import canonical_measure, resistance, voltage_function
from .graph import MetricGraph, Point, circle, from_edge_list, theta, validate_model, wedge_of_circles
from .plfunc import PLFunction
from .weierstrass import is_weierstrass, mesh_oracle, weierstrass_locus, weierstrass_on_segment

__version__ = "0.1.0"
