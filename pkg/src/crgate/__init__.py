"""Effective Hamiltonians for the cross-resonance gate."""
__version__ = "0.1.0"
