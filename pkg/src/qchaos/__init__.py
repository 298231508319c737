"""Numerical laboratory for billiards, Laplacian spectra and semiclassical quantization."""

__version__ = "0.1.0"
