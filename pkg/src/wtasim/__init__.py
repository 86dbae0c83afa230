"""Weighted tree automata over exact semirings: simulations, constructions and
equivalence by joint reduction."""

from .errors import WtaError
from .jointred import closure, decide_equiv, membership
from .linalg import IndexSet, Matrix, Vec
from .semiring import BOOL, INT, NAT, RAT, get_semiring
from .simulation import check_simulation, decompose_simulation
from .textio import parse_tree, parse_wta, print_wta
from .wta import RankedAlphabet, Tree, Wta, evaluate

__all__ = [
    "BOOL", "INT", "NAT", "RAT", "IndexSet", "Matrix", "RankedAlphabet", "Tree", "Vec",
    "Wta", "WtaError", "check_simulation", "closure", "decide_equiv", "decompose_simulation",
    "evaluate", "get_semiring", "membership", "parse_tree", "parse_wta", "print_wta",
]
