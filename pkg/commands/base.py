"""Base class and shared helpers for CLI commands."""
from abc import ABC, abstractmethod
from argparse import ArgumentParser
from typing import Any, Dict, List, Optional

from loguru import logger

from config import VERSION
from models.errors import InputFormatError
from models.models import RunReport, SystemDescriptor
from utils.documents import SCHEMA_VERSION, descriptor_from_document, digest, load_document, to_jsonable

# argparse options that only steer output and never enter the digest
OUTPUT_OPTIONS = ("command", "json", "out", "log_level")


class BaseCommand(ABC):
    """Base class for all commands."""

    name: str = ""
    help: str = ""
    stochastic: bool = False

    def __init__(self):
        self.documents: Dict[str, Any] = {}
        logger.debug(f"Initialized command {self.name}")

    @classmethod
    def add_arguments(cls, parser: ArgumentParser) -> None:
        """Add command-specific arguments."""

    @abstractmethod
    def run(self, input_data: Dict[str, Any]) -> Dict[str, Any]:
        """Compute the command's results payload."""

    @abstractmethod
    def render(self, results: Dict[str, Any]) -> str:
        """Human-readable summary of a results payload."""

    def load(self, key: str, path: str) -> Dict[str, Any]:
        document = load_document(path)
        self.documents[key] = document
        return document

    def load_descriptor(self, key: str, path: str) -> SystemDescriptor:
        return descriptor_from_document(self.load(key, path))

    def process(self, input_data: Dict[str, Any]) -> RunReport:
        """Run the command and wrap its payload in a RunReport."""
        self.documents = {}
        results = to_jsonable(self.run(input_data))
        parameters = {k: v for k, v in input_data.items() if k not in OUTPUT_OPTIONS}
        report = RunReport(
            command=self.name,
            inputs_digest=digest({"documents": self.documents, "parameters": parameters}),
            results=results,
            versions={"tool": VERSION, "schema": str(SCHEMA_VERSION)},
            seed=input_data.get("seed") if self.stochastic else None,
        )
        logger.info(f"Command {self.name} finished")
        return report


def parse_heights(text: str) -> List[int]:
    """'2,4,6' or '1-12' (inclusive) or a mix of both."""
    heights: List[int] = []
    try:
        for part in text.split(","):
            part = part.strip()
            if "-" in part:
                lo, hi = part.split("-", 1)
                heights.extend(range(int(lo), int(hi) + 1))
            elif part:
                heights.append(int(part))
    except ValueError as e:
        raise InputFormatError(f"Bad height list {text!r}") from e
    if not heights or any(h < 1 for h in heights):
        raise InputFormatError(f"Heights must be positive integers, got {text!r}")
    return heights


def format_matrix(matrix: List[List[float]], labels: Optional[List[str]] = None, digits: int = 6) -> str:
    """Aligned plain-text matrix."""
    labels = labels or [str(i) for i in range(1, len(matrix) + 1)]
    width = max([len(label) for label in labels] + [digits + 2])
    lines = [" " * width + " " + " ".join(label.rjust(width) for label in labels)]
    for label, row in zip(labels, matrix):
        lines.append(label.rjust(width) + " " + " ".join(f"{value:.{digits}f}".rjust(width) for value in row))
    return "\n".join(lines)
