"""Nullstellensatz and Positivstellensatz certificates for polynomial systems."""

__version__ = "0.1.0"
