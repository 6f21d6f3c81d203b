"""Dimers on the Aztec diamond with doubly periodic weights."""

__version__ = "0.1.0"
