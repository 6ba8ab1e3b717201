"""Coulomb force model of bilateral trade: calibration and prediction."""

__version__ = "0.1.0"
