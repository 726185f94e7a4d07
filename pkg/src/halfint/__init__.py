"""Exact certification tools for half-integral weight q-expansions."""

__version__ = "0.1.0"
