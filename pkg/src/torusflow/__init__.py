"""Spectral flow toolkit for SU(2) connections on 3-manifolds split along a torus."""

__version__ = "0.1.0"
