"""birkhoff: decompose a constant-sum matrix, a block coupling, or a tree of couplings."""
from argparse import ArgumentParser
from typing import Any, Dict

import numpy as np

from commands.base import BaseCommand
from core.birkhoff import (
    automorphism_measure, birkhoff_decompose, block_decompose, induced_pair_mass, measure_pair_mass,
    permutation_pushforward,
)
from models.errors import InputFormatError
from utils.documents import automorphism_to_document, couplings_from_document, format_node
from utils.exact import parse_fraction


class BirkhoffCommand(BaseCommand):
    name = "birkhoff"
    help = "Birkhoff decomposition of a matrix (or of couplings with --block)"

    @classmethod
    def add_arguments(cls, parser: ArgumentParser) -> None:
        parser.add_argument("path", help="JSON matrix document, or coupling document with --block")
        parser.add_argument("--block", action="store_true", help="Input is a BlockCoupling document")

    def run(self, input_data: Dict[str, Any]) -> Dict[str, Any]:
        document = self.load("input", input_data["path"])
        if input_data.get("block"):
            return self._block(document)
        if "matrix" not in document:
            raise InputFormatError("Matrix document needs a 'matrix' field")
        decomposition = birkhoff_decompose(document["matrix"])
        original = np.array([[float(parse_fraction(x)) for x in row] for row in document["matrix"]])
        residual = float(np.abs(np.array(decomposition.reconstruct()) - original).max())
        return {"mode": "matrix", "decomposition": decomposition, "residual": residual}

    def _block(self, document: Dict[str, Any]) -> Dict[str, Any]:
        p, couplings = couplings_from_document(document)
        height = document.get("height")
        if height is None:
            root = couplings[((), ())] if ((), ()) in couplings else None
            if root is None:
                raise InputFormatError("Block document needs a root coupling under '|' or 'coupling'")
            atoms = block_decompose(root)
            rebuilt = np.array(permutation_pushforward(p, atoms))
            residual = float(np.abs(rebuilt - np.array(root.entries)).max())
            return {"mode": "block", "atoms": atoms, "residual": residual}

        measure = automorphism_measure(p, couplings, height)
        expected = induced_pair_mass(p, couplings, height)
        actual = measure_pair_mass(measure, p)
        residual = max(abs(expected.get(pair, 0.0) - actual.get(pair, 0.0)) for pair in set(expected) | set(actual))
        return {
            "mode": "measure",
            "height": height,
            "support": [
                {"probability": atom.probability, "automorphism": automorphism_to_document(atom.automorphism)}
                for atom in measure.support
            ],
            "pair_mass": {f"{format_node(v)}|{format_node(u)}": mass for (v, u), mass in sorted(expected.items())},
            "residual": residual,
        }

    def render(self, results: Dict[str, Any]) -> str:
        """Terms, atoms or the measure support, one per line."""
        lines = []
        if results["mode"] == "matrix":
            decomposition = results["decomposition"]
            lines.append(f"{len(decomposition['terms'])} terms (alpha = {decomposition['alpha']:.6g})")
            for term in decomposition["terms"]:
                lines.append(f"  {term['coefficient']:.6f} x {term['permutation']}")
        elif results["mode"] == "block":
            for atom in results["atoms"]:
                lines.append(f"  {atom['probability']:.6f} x {atom['permutation']}")
        else:
            lines.append(f"{len(results['support'])} automorphisms of height {results['height']}")
            for atom in results["support"]:
                lines.append(f"  {atom['probability']:.6f} x {atom['automorphism']['child_perms']}")
        lines.append(f"reconstruction residual: {results['residual']:.3e}")
        return "\n".join(lines)
