"""Exact computations around the algebraic Singer construction."""

__version__ = "0.1.0"
