"""Exact and approximate Nash equilibria of bilinear games."""

__version__ = "0.1.0"
