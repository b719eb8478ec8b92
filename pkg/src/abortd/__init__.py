"""Abort-command planning for household kitchen robots."""

__version__ = "0.1.0"
