"""Forced part-of-speech tag correction for parsing patent claims."""

__version__ = "0.1.0"
