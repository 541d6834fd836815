"""Exact invariant theory of abelian matrix groups over prime fields."""

__version__ = "0.1.0"
