"""Exact unrestriction algorithms and border rank diagnostics for tensors."""

from __future__ import annotations

from .exceptions import UnrestrictError

__all__ = ["UnrestrictError", "__version__"]

__version__ = "0.1.0"
