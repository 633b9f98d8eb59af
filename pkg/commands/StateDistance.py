"""state-distance: t-bar between the state tree names of a finite-state system."""
from argparse import ArgumentParser
from typing import Any, Dict, List

from commands.base import BaseCommand, format_matrix, parse_heights
from core.dynsim import preimage_graph_for
from core.tbar import tbar_states
from models.models import SystemDescriptor


def state_distance_table(descriptor: SystemDescriptor, heights: List[int]) -> Dict[str, Any]:
    graph = preimage_graph_for(descriptor)
    table = tbar_states(graph, heights)
    return {
        "states": list(graph.states),
        "heights": {str(m): table[m] for m in heights},
        "max_off_diagonal": {
            str(m): max((table[m][i][j] for i in range(graph.size) for j in range(graph.size) if i != j), default=0.0)
            for m in heights
        },
    }


def render_state_table(results: Dict[str, Any]) -> str:
    """A state-by-state distance matrix for every height."""
    blocks = []
    for m, matrix in results["heights"].items():
        blocks.append(f"height {m} (max off-diagonal {results['max_off_diagonal'][m]:.6f})")
        blocks.append(format_matrix(matrix, results["states"]))
    return "\n".join(blocks)


class StateDistanceCommand(BaseCommand):
    name = "state-distance"
    help = "Per-height t-bar matrices between state tree names"

    @classmethod
    def add_arguments(cls, parser: ArgumentParser) -> None:
        parser.add_argument("path", help="JSON system descriptor (or bare matrix document)")
        parser.add_argument("--heights", default="1-12", help="Heights, e.g. '1-12' or '2,4,8' (default 1-12)")

    def run(self, input_data: Dict[str, Any]) -> Dict[str, Any]:
        descriptor = self.load_descriptor("system", input_data["path"])
        return state_distance_table(descriptor, parse_heights(input_data["heights"]))

    def render(self, results: Dict[str, Any]) -> str:
        return render_state_table(results)
