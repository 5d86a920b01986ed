"""Exact-rational polyhedral and lattice-point machinery for the dimensions
of Kisin varieties, together with the closed-form bounds and polytope tables
they satisfy."""

__version__ = "0.1.0"
