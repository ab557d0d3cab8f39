"""Dunkl-coherent pairs, Dunkl-Sobolev orthogonal polynomials and Fourier coefficients."""

__version__ = "0.1.0"
