"""Special open-set posets, nerves, and homology checks over finite manifold models."""

__version__ = "0.1.0"
