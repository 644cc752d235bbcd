"""Pairing-friendly curve families (Brezing-Weng) with enlarged CM discriminants."""

from .polyring import RatPoly, cyclotomic, factorize
from .families import Family, brezing_weng, generic_construction, delta_table
from .search import CurveParams, SearchConfig, apply_improvement, instantiate, scan, select_n
from .cm import Curve, build_curve, hilbert_class_poly, verify_curve

__version__ = "0.1.0"
