"""Averaged two-scale solutions of electron-ion plasma bunch expansion."""

__version__ = "0.1.0"
