"""HTTP service exposing the pricing engine."""
from .app import create_app

__all__ = ["create_app"]
