"""Exact-real machinery for computable bandlimited signals."""

__version__ = "0.1.0"
