"""Resonant-state expansion of quantum decay for one and two particles."""

__version__ = "0.1.0"
