"""Exact calculator for Levi components of parabolic subalgebras of
finitary Lie algebras (sl/gl/so/sp of countable rank)."""

__version__ = "0.1.0"
