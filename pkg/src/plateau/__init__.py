"""Construction, relaxation and verification of minimal Plateau surfaces."""

__version__ = "0.1.0"
