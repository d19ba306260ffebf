"""HTTP service layer wrapping the core flow solvers."""

from .app import create_app

__all__ = ["create_app"]
