"""Exact computations with polynomial automorphisms in two and three variables."""
from .coeff import QQ, QQT, ZZ, Domain, Elem, Frac, cyclotomic, ext_gcd, v_of_r_member
from .parse import parse_coefficient, parse_poly
from .poly import Poly, Ring, exact_div, jacobian, mgcd, substitute, wedge2

__all__ = [
    "QQ", "QQT", "ZZ", "Domain", "Elem", "Frac", "cyclotomic", "ext_gcd", "v_of_r_member",
    "parse_coefficient", "parse_poly",
    "Poly", "Ring", "exact_div", "jacobian", "mgcd", "substitute", "wedge2",
]
