"""Configuration module."""

from .settings import Settings, settings

__all__ = ["settings", "Settings"]
