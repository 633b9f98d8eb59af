"""sync-bound: the N^(3N) synchronizing path bound."""
from argparse import ArgumentParser
from typing import Any, Dict

from commands.base import BaseCommand
from core.markov import sync_bound
from models.errors import DescriptorError


class SyncBoundCommand(BaseCommand):
    name = "sync-bound"
    help = "Print N^(3N) and the subset-search bound 2^N"

    @classmethod
    def add_arguments(cls, parser: ArgumentParser) -> None:
        parser.add_argument("n_states", type=int, help="Number of states N")

    def run(self, input_data: Dict[str, Any]) -> Dict[str, Any]:
        n = input_data["n_states"]
        if n < 1:
            raise DescriptorError(f"n_states must be positive, got {n}")
        return {"n_states": n, "bound": sync_bound(n), "subset_bound": 2 ** n}

    def render(self, results: Dict[str, Any]) -> str:
        """The two bounds on one line."""
        return f"N = {results['n_states']}: N^(3N) = {results['bound']}, 2^N = {results['subset_bound']}"
