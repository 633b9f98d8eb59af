"""Commands package - one class per CLI command."""

from .base import BaseCommand
from .CheckEndo import CheckEndoCommand
from .DecideTvwb import DecideTvwbCommand
from .Tbar import TbarCommand
from .StateDistance import StateDistanceCommand
from .Birkhoff import BirkhoffCommand
from .EstimateTvwb import EstimateTvwbCommand
from .GenericCheck import GenericCheckCommand
from .SyncBound import SyncBoundCommand

__all__ = [
    "BaseCommand",
    "CheckEndoCommand",
    "DecideTvwbCommand",
    "TbarCommand",
    "StateDistanceCommand",
    "BirkhoffCommand",
    "EstimateTvwbCommand",
    "GenericCheckCommand",
    "SyncBoundCommand",
]
