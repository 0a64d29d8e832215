"""Exact computations with Schreier families, dyadic trees, ordinal indices and Tsirelson-type norms."""
from .ordinal import Ordinal, parse as parse_ordinal, render as render_ordinal
from .families import Explicit, Schreier, Singletons

__all__ = ["Ordinal", "parse_ordinal", "render_ordinal", "Schreier", "Singletons", "Explicit"]
__version__ = "0.1.0"
