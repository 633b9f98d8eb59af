"""generic-check: genericity of sampled points for a partition."""
from argparse import ArgumentParser
from typing import Any, Dict

from commands.base import BaseCommand
from core.dynsim import genericity, sample_point
from utils.seeding import derive_seed


class GenericCheckCommand(BaseCommand):
    name = "generic-check"
    help = "Weighted preimage-tree distribution of a partition versus its reference law"
    stochastic = True

    @classmethod
    def add_arguments(cls, parser: ArgumentParser) -> None:
        parser.add_argument("path", help="JSON system descriptor")
        parser.add_argument("--M", dest="M", type=int, default=100, help="Tree height M (default 100)")
        parser.add_argument("--samples", type=int, default=8, help="Sampled points (default 8)")
        parser.add_argument("--seed", type=int, default=0, help="Seed (default 0)")
        parser.add_argument(
            "--partition", default="symbol", help="symbol, state, fiber or dyadic:N (default symbol)"
        )

    def run(self, input_data: Dict[str, Any]) -> Dict[str, Any]:
        descriptor = self.load_descriptor("system", input_data["path"])
        reports = []
        for k in range(input_data["samples"]):
            x = sample_point(descriptor, 1, derive_seed(input_data["seed"], "sample", k))
            reports.append(genericity(descriptor, x, input_data["M"], input_data["partition"]))
        deviations = [report.deviation for report in reports]
        return {
            "partition": input_data["partition"],
            "M": input_data["M"],
            "reports": reports,
            "max_deviation": max(deviations, default=0.0),
        }

    def render(self, results: Dict[str, Any]) -> str:
        """Deviation from the reference distribution per sampled point."""
        lines = [f"partition {results['partition']}, M = {results['M']}"]
        for k, report in enumerate(results["reports"]):
            lines.append(f"  sample {k}: deviation {report['deviation']:.6f}")
        lines.append(f"max deviation: {results['max_deviation']:.6f}")
        return "\n".join(lines)
