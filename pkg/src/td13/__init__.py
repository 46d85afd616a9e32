"""Drawing outerplanar graphs with at most thirteen distinct edge lengths.

Vertices of the universal outerplanar graph are named by bit strings and
mapped to integer polynomials in twelve unit-modulus variables; evaluating at
a random point and scaling gives the drawing.
"""
from .encoding import (
    CONVENTIONS, GLUINGS, QrCode, TypeIndex, corners, host_node_of, is_cover_edge,
    is_tstar_edge, pi, pi_closed_form, proper_node_of, qr_decode, qr_encode, type_of,
)
from .symbolic import Poly, Monomial, classify_incidence, format_poly, parse_poly, psi_poly
from .embedder import PlaneGraphInput, TorusPoint, Drawing, draw, sample_torus
from .validator import validate, symbolic_certificate, geometric_oracle

__all__ = [
    "CONVENTIONS", "GLUINGS", "QrCode", "TypeIndex", "corners", "host_node_of",
    "is_cover_edge", "is_tstar_edge", "pi", "pi_closed_form", "proper_node_of",
    "qr_decode", "qr_encode", "type_of", "Poly", "Monomial", "classify_incidence",
    "format_poly", "parse_poly", "psi_poly", "PlaneGraphInput", "TorusPoint", "Drawing",
    "draw", "sample_torus", "validate", "symbolic_certificate", "geometric_oracle",
]
