"""Singular-value statistics of products of two coupled complex Gaussian matrices."""
__version__ = "0.1.0"
