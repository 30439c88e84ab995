"""Exact computer-algebra checks for catalecticant, secant and rank-3 quadric ideals."""

__version__ = "0.1.0"
