"""Exact algebra of cyclonic orbits, Mackey functors, Witt vectors and cyclotomic structures."""

from .abgrp import FGAbelianGroup, GroupMorphism, Matrix, smith_normal_form
from .burnside import BurnsideElement, HMorphism, compose_h
from .cyclonic import Orbit, OrbitMap, make_orbit_map, pullback_cospan
from .cyclotomic import geometric_fixed_points, verify_cyclotomic, witt_cyclotomic
from .dga import DgaBasisSymbol, DgaElement, dga_mul
from .mackey import MackeyData, MackeyRule, burnside_mackey, validate_mackey
from .rings import QQ, ZZ, IntegerModRing, PolynomialRing, ring_from_tag
from .supernat import Supernatural, parse_supernatural
from .witt import WittVector, dress_siebeneicher, ghost, ghost_solve, witt_mackey

__all__ = [
    "FGAbelianGroup", "GroupMorphism", "Matrix", "smith_normal_form",
    "BurnsideElement", "HMorphism", "compose_h",
    "Orbit", "OrbitMap", "make_orbit_map", "pullback_cospan",
    "geometric_fixed_points", "verify_cyclotomic", "witt_cyclotomic",
    "DgaBasisSymbol", "DgaElement", "dga_mul",
    "MackeyData", "MackeyRule", "burnside_mackey", "validate_mackey",
    "QQ", "ZZ", "IntegerModRing", "PolynomialRing", "ring_from_tag",
    "Supernatural", "parse_supernatural",
    "WittVector", "dress_siebeneicher", "ghost", "ghost_solve", "witt_mackey",
]

__version__ = "0.1.0"
