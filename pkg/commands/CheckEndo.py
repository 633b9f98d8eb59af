"""check-endo: End(p) membership and basic chain properties of a matrix."""
from argparse import ArgumentParser
from typing import Any, Dict

from loguru import logger

from commands.base import BaseCommand
from core.markov import end_p_check, is_irreducible, is_primitive, stationary
from core.tree import entropy
from models.errors import EndPError, ReducibleMatrixError
from utils.documents import matrix_from_document


class CheckEndoCommand(BaseCommand):
    name = "check-endo"
    help = "Check that a stochastic matrix defines a one-sided Markov shift in End(p)"

    @classmethod
    def add_arguments(cls, parser: ArgumentParser) -> None:
        parser.add_argument("path", help="JSON matrix document")

    def run(self, input_data: Dict[str, Any]) -> Dict[str, Any]:
        matrix = matrix_from_document(self.load("matrix", input_data["path"]))
        if not is_irreducible(matrix):
            logger.error("check-endo: matrix is reducible")
            raise ReducibleMatrixError("Matrix is reducible; End(p) systems here must be irreducible")
        check = end_p_check(matrix)
        if not check.accepted:
            logger.error(f"check-endo: {check.reason}")
            raise EndPError(check.reason)
        return {
            "accepted": True,
            "p": list(check.p.components),
            "p_exact": check.exact,
            "entropy": entropy(check.p),
            "stationary": stationary(matrix),
            "irreducible": True,
            "primitive": is_primitive(matrix),
            "states": matrix.state_labels(),
        }

    def render(self, results: Dict[str, Any]) -> str:
        """Acceptance, p and the stationary vector."""
        return "\n".join([
            f"End(p) with p = ({', '.join(results['p_exact'])})",
            f"entropy h(p) = {results['entropy']:.6f} bits",
            "stationary q = (" + ", ".join(f"{q:.6f}" for q in results["stationary"]) + ")",
            f"irreducible: {results['irreducible']}, primitive: {results['primitive']}",
        ])
