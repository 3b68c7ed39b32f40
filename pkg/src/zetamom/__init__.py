"""Numerical laboratory for second moments of moments of the Riemann zeta function."""

__version__ = "0.1.0"
