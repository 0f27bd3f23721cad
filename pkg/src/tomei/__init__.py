"""Twisted Tomei manifolds: cell complexes, homology and the Toda flow."""
from .roots import DynkinDiagram, WeylGroup, enumerate_weyl, parse_diagram
from .signs import MarkedDynkinDiagram, enumerate_markings, parse_marking, twisted_actions

__version__ = "0.1.0"

__all__ = [
    "DynkinDiagram",
    "WeylGroup",
    "enumerate_weyl",
    "parse_diagram",
    "MarkedDynkinDiagram",
    "enumerate_markings",
    "parse_marking",
    "twisted_actions",
]
