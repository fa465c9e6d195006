"""Exact computations on the Bruhat-Tits tree of PGL2 over a local field."""

from .errors import BTKError
from .field import LAURENT, QP, make_field
from .gl2 import Mat2, mat
from .tree import Edge, End, Vertex

__all__ = ["BTKError", "LAURENT", "QP", "Edge", "End", "Mat2", "Vertex", "make_field", "mat"]
__version__ = "0.1.0"
