"""Restricted sumsets in finite groups: kernels, structure checks and exhaustive verification."""

__version__ = "0.1.0"
