"""Exact construction of algebraic classical W-algebras and Frobenius potentials."""

__version__ = "1.0.0"
