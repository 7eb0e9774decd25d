"""Exact tools for complete periodicity of interval exchanges, linear
involutions and flat surfaces over real quadratic fields."""

__version__ = "0.1.0"
