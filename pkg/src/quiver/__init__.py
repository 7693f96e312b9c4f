"""Quiver lab: safe HVAC control perturbations on a simulated VAV building."""

__version__ = "0.1.0"
