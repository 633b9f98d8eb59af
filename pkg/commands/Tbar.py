"""tbar: t-bar between two tree names, between state names, or between two processes."""
from argparse import ArgumentParser
from typing import Any, Dict, Optional

from commands.base import BaseCommand
from commands.StateDistance import render_state_table, state_distance_table
from core.tbar import process_tbar_mc, tbar_bruteforce, tbar_exact
from models.errors import InputFormatError
from utils.documents import automorphism_to_document, tree_name_from_document


class TbarCommand(BaseCommand):
    name = "tbar"
    help = "t-bar distance between tree names (or --states / --process for systems)"

    @classmethod
    def add_arguments(cls, parser: ArgumentParser) -> None:
        parser.add_argument("path1", help="Tree name document, or system descriptor with --states/--process")
        parser.add_argument("path2", nargs="?", help="Second tree name document (or descriptor with --process)")
        parser.add_argument("--height", type=int, help="Largest height for --states, tree height for --process")
        parser.add_argument("--brute-force", action="store_true", help="Also run the exhaustive oracle")
        parser.add_argument("--states", action="store_true", help="State tree names of one finite-state system")
        parser.add_argument("--process", action="store_true", help="Monte Carlo t-bar between two systems")
        parser.add_argument("--pairs", type=int, default=200, help="Point pairs for --process (default 200)")
        parser.add_argument("--seed", type=int, default=0, help="Seed for --process (default 0)")

    def process(self, input_data: Dict[str, Any]):
        self.stochastic = bool(input_data.get("process"))
        return super().process(input_data)

    def run(self, input_data: Dict[str, Any]) -> Dict[str, Any]:
        height: Optional[int] = input_data.get("height")
        if input_data.get("states"):
            descriptor = self.load_descriptor("system", input_data["path1"])
            return {"mode": "states", **state_distance_table(descriptor, list(range(1, (height or 12) + 1)))}

        if not input_data.get("path2"):
            raise InputFormatError("tbar needs two documents unless --states is given")
        if input_data.get("process"):
            if height is None:
                raise InputFormatError("--process needs --height")
            sys_a = self.load_descriptor("system_a", input_data["path1"])
            sys_b = self.load_descriptor("system_b", input_data["path2"])
            summary = process_tbar_mc(sys_a, sys_b, height, input_data["pairs"], input_data["seed"])
            return {"mode": "process", "summary": summary}

        t1 = tree_name_from_document(self.load("name1", input_data["path1"]))
        t2 = tree_name_from_document(self.load("name2", input_data["path2"]))
        result = tbar_exact(t1, t2)
        payload: Dict[str, Any] = {
            "mode": "names",
            "height": result.height,
            "value": result.value,
            "witness": automorphism_to_document(result.witness),
        }
        if input_data.get("brute_force"):
            oracle = tbar_bruteforce(t1, t2)
            payload["brute_force_value"] = oracle.value
            payload["agree"] = abs(oracle.value - result.value) <= 1e-12
        return payload

    def render(self, results: Dict[str, Any]) -> str:
        """Value and witness, state tables or the Monte Carlo summary."""
        if results["mode"] == "states":
            return render_state_table(results)
        if results["mode"] == "process":
            summary = results["summary"]
            if not summary["pairs"]:
                return f"t-bar_{summary['height']} between processes: no pairs sampled"
            quantiles = ", ".join(f"q{q}={v:.6f}" for q, v in summary["quantiles"].items())
            return f"t-bar_{summary['height']} between processes: mean {summary['mean']:.6f} over {summary['pairs']} pairs ({quantiles})"
        lines = [f"t-bar_{results['height']} = {results['value']:.12f}"]
        if "brute_force_value" in results:
            lines.append(f"brute force  = {results['brute_force_value']:.12f} (agree: {results['agree']})")
        lines.append("witness child permutations:")
        for node, perm in results["witness"]["child_perms"].items():
            lines.append(f"  [{node or 'root'}] {perm}")
        return "\n".join(lines)
