"""Certified reproduction of the planes, hypersurface and sum-freeness constants."""

__version__ = "0.1.0"
