"""Structural continuation toolkit over a black-box operator contract."""
from .numerics import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
