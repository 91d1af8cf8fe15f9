"""Planar graph divisions, color-balanced divisions and b-swap local search for Maximum Coverage."""

__version__ = "0.1.0"
