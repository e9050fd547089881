"""Computational toolkit for topological measure spaces: spaces, the
diameter-cover outer measure, axiom checks and absolute-continuity analysis."""

__version__ = "0.1.0"
