"""Bounded model checking for quotients of bounded natural functors."""

__version__ = "0.1.0"
