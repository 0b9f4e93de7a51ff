"""Clifford-algebra-valued lattice fields, discrete Dirac operators and their exact solutions."""
from .clifford import Multivector, Signature, cl0n, clnn
from .lattice import Field, LatticeBox, MassTerm, Semantics

__all__ = ["Field", "LatticeBox", "MassTerm", "Multivector", "Semantics", "Signature",
           "cl0n", "clnn"]
__version__ = "0.1.0"
