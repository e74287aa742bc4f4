"""Parabolicity tools for infinite Riemann surfaces built from pairs of pants."""

__version__ = "0.1.0"
