"""Finite sketches: categories with chosen cones and cocones, their
construction calculus, finite-set model enumeration, and chase-based
approximation of the classifying category."""

__version__ = "0.1.0"
