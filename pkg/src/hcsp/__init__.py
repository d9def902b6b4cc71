"""Constraint satisfaction over Henson graphs and equivalence-relation graphs.

Relations are sets of atomic types; tractability is decided by checking
which canonical behaviours preserve them, and each tractable case has a
matching polynomial-time solver.
"""

from .affine import compile_parity, injectivize, solve_c2w_minority, solve_cw2_parity
from .behaviours import Behaviour, behaviour_catalog, preserves, realizable
from .classify import Verdict, classify, classify_equality, collapse_equality
from .core import (EQ, OMEGA, BaseStructure, Constraint, E, Instance, N, OrbitRelation, Signature,
                   SolveResult, TypeMatrix, enumerate_types, validate_type)
from .formula import compile_formula
from .gadgets import OneInThreeFormula, reduce_1in3, relation_H
from .gf2 import Gf2System, affine_hull, gf2_solve
from .horn import compile_horn, horn_solve
from .oracle import oracle_solve
from .solve import solve

__all__ = [
    "BaseStructure", "TypeMatrix", "OrbitRelation", "Signature", "Instance", "Constraint", "SolveResult",
    "E", "N", "EQ", "OMEGA", "enumerate_types", "validate_type", "compile_formula",
    "Behaviour", "behaviour_catalog", "preserves", "realizable",
    "compile_horn", "horn_solve", "oracle_solve",
    "Gf2System", "gf2_solve", "affine_hull", "injectivize", "solve_c2w_minority", "compile_parity",
    "solve_cw2_parity", "OneInThreeFormula", "relation_H", "reduce_1in3",
    "Verdict", "classify", "classify_equality", "collapse_equality", "solve",
]
__version__ = "0.1.0"
