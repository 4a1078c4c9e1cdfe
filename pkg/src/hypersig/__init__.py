"""Hypermedia environment with signifier exposure, plus PRS and STRIPS client agents."""

__version__ = "0.1.0"
