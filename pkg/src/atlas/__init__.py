"""Exact integral-affine geometry and almost toric base diagrams."""

__version__ = "0.1.0"
