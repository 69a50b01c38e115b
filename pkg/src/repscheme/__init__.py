"""Exact representation schemes of finitely presented groups into SL(2) and SO(3)."""

__version__ = "0.1.0"
