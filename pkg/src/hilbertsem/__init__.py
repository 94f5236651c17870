"""Typed Hilbert-operator semantics for determiners on top of a second-order lambda calculus."""

__version__ = "0.1.0"
