"""Exact and p-adic computations for half-ordinary Rankin-Selberg p-adic L-functions."""

__version__ = "0.1.0"
