"""Spectral solver and operator calculus for exterior boundary problems of the unit ball."""

__version__ = "0.1.0"
