"""Stationary discs attached to weighted-homogeneous model hypersurfaces and their perturbations."""

__version__ = "0.1.0"
