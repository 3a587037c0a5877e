"""Oriented matroids from patchworked triangulations of a product of simplices."""

__version__ = "0.1.0"
