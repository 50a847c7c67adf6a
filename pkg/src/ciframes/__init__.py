"""Conditional independence frames, self-adhesion and their model lattices."""

__version__ = "0.1.0"
