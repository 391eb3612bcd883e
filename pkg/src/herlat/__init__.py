"""Exact reduction of lattices carrying skew-Hermitian forms over type I/II algebras."""

__version__ = "0.1.0"
