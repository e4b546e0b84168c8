"""Schrödingerlet frames: coherent states of the group generated by the free
Schrödinger flow together with similitudes, in dimensions 2 and 3, with
numerical verification of admissibility and of the Parseval property."""

__version__ = "0.1.0"
