"""Intuitionistic fuzzy Banach algebras, numerically."""

__version__ = "0.1.0"
