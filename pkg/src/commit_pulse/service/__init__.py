"""HTTP service wrapping the analytics core."""

from commit_pulse.service.app import create_app

__all__ = ["create_app"]
