"""Correlation witnesses from distance measures between reduced qubit states."""

__version__ = "1.0.0"
