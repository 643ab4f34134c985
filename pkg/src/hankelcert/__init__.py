"""Exact certified bounds for Hankel determinants of convex functions subordinate to 1 + z + a z^2."""

from .exactalg import Box, MultiPoly, Rational, as_rational, format_rational

__all__ = ["Box", "MultiPoly", "Rational", "as_rational", "format_rational"]
