"""Curl eigenfields on the solid toroidal annulus whose zero sets are torus knots."""

__version__ = "0.1.0"
