"""Edgeworth expansion engine for the discretization error of Ito integrals."""

__version__ = "1.0.0"
