"""Reidemeister and analytic torsion of chain complexes and conical frusta."""

__version__ = "0.1.0"
