"""Rigidity and global rigidity of graphs, with checkable certificates."""

from .certify import EngineOptions, Verdict, global_rigidity_nd
from .errors import InputError, InvariantFault, RigikitError
from .graph_core import Multigraph, SimpleGraph, parse_graph

__version__ = "0.1.0"

__all__ = [
    "EngineOptions",
    "InputError",
    "InvariantFault",
    "Multigraph",
    "RigikitError",
    "SimpleGraph",
    "Verdict",
    "global_rigidity_nd",
    "parse_graph",
]
