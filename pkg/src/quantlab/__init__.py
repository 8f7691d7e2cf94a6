"""Numerical laboratory for flat-torus quantization via twisted group algebras."""

__version__ = "0.1.0"
