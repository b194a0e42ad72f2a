"""Exact computations for the Grigorchuk groups G_ω and the wreath products F ≀_X G_ω."""

__version__ = "0.1.0"
