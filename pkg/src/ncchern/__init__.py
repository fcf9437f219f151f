"""Exact cyclic homology, truncated X-complexes and Chern character tables."""

__version__ = "0.1.0"
