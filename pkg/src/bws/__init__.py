"""Wasserstein (Bures) Riemannian geometry of Gaussian densities."""
__version__ = "0.1.0"
