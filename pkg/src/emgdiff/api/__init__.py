"""HTTP service exposing the comparison engine to the workbench UI."""

from .app import create_app

__all__ = ["create_app"]
