"""Turan-type independent-set algorithms, bounds and tight instances."""

__version__ = "0.1.0"
