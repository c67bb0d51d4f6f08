"""Entanglement and mixedness of random two-rebit and two-qubit states."""

__version__ = "0.1.0"
