"""Hecke operators on the 2-sphere via quaternion orders, and their restriction theory."""

__version__ = "0.1.0"
