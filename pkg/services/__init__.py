"""Services package - command lookup."""

from .command_registry import command_registry

__all__ = ["command_registry"]
