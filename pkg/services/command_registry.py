"""Command registry for looking up and extending CLI commands."""
from typing import Dict, List, Type

from loguru import logger

from commands import (
    BaseCommand, BirkhoffCommand, CheckEndoCommand, DecideTvwbCommand, EstimateTvwbCommand,
    GenericCheckCommand, StateDistanceCommand, SyncBoundCommand, TbarCommand,
)


class CommandRegistry:
    """Registry mapping command names to command classes."""

    def __init__(self):
        self._commands: Dict[str, Type[BaseCommand]] = {}
        self._register_default_commands()

    def _register_default_commands(self):
        for command_class in (
            CheckEndoCommand, DecideTvwbCommand, TbarCommand, StateDistanceCommand,
            BirkhoffCommand, EstimateTvwbCommand, GenericCheckCommand, SyncBoundCommand,
        ):
            self.register(command_class.name, command_class)

    def register(self, name: str, command_class: Type[BaseCommand]):
        """Register a new command type."""
        if not issubclass(command_class, BaseCommand):
            raise ValueError("Command class must inherit from BaseCommand")
        self._commands[name] = command_class

    def get_command(self, name: str) -> BaseCommand:
        """Fresh command instance by name."""
        if name not in self._commands:
            raise ValueError(f"Command '{name}' not registered")
        logger.debug(f"Building command {name}")
        return self._commands[name]()

    def get_class(self, name: str) -> Type[BaseCommand]:
        return self._commands[name]

    def list_commands(self) -> List[str]:
        return list(self._commands.keys())


# Global command registry
command_registry = CommandRegistry()
