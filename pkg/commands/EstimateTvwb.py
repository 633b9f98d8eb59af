"""estimate-tvwb: Monte Carlo epsilon-hat profile over heights."""
from argparse import ArgumentParser
from typing import Any, Dict

from commands.base import BaseCommand, parse_heights
from core.dynsim import estimate_tvwb_profile


class EstimateTvwbCommand(BaseCommand):
    name = "estimate-tvwb"
    help = "Estimate the tvwB profile of a system from sampled point pairs"
    stochastic = True

    @classmethod
    def add_arguments(cls, parser: ArgumentParser) -> None:
        parser.add_argument("path", help="JSON system descriptor")
        parser.add_argument("--heights", default="2,4,6,8,10,12", help="Heights (default 2,4,6,8,10,12)")
        parser.add_argument("--samples", type=int, default=64, help="Sampled points (default 64)")
        parser.add_argument("--pairs", type=int, default=200, help="Random point pairs (default 200)")
        parser.add_argument("--seed", type=int, default=0, help="Seed (default 0)")
        parser.add_argument("--dyadic", type=int, help="Discretize circle fibers to dyadic midpoints of this level")
        parser.add_argument("--keep-distances", action="store_true", help="Include every pair distance")

    def run(self, input_data: Dict[str, Any]) -> Dict[str, Any]:
        descriptor = self.load_descriptor("system", input_data["path"])
        rows = estimate_tvwb_profile(
            descriptor,
            parse_heights(input_data["heights"]),
            input_data["samples"],
            input_data["pairs"],
            input_data["seed"],
            dyadic=input_data.get("dyadic"),
        )
        if not input_data.get("keep_distances"):
            rows = [row.model_copy(update={"distances": []}) for row in rows]
        return {"kind": descriptor.kind.value, "profile": rows}

    def render(self, results: Dict[str, Any]) -> str:
        """One table row per height."""
        lines = [f"{'height':>6} {'eps_hat':>8} {'mean':>10} {'frac<eps':>9}"]
        for row in results["profile"]:
            lines.append(
                f"{row['height']:>6} {row['epsilon_hat']:>8.2f} {row['mean']:>10.6f} {row['fraction_below']:>9.3f}"
            )
        return "\n".join(lines)
