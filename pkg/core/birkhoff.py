"""Birkhoff decompositions of constant-sum matrices and class-blocked couplings,
and the product-form measures they induce on tree automorphisms."""
from itertools import product
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from scipy.optimize import linear_sum_assignment

from config import settings
from core.tree import weight
from models.errors import DecompositionError, HeightMismatchError, MissingCouplingError, TooLargeError
from models.models import (
    AutomorphismAtom, AutomorphismMeasure, BirkhoffDecomposition, BirkhoffTerm, BlockCoupling,
    Node, Permutation, PermutationAtom, ProbVector, TreeAutomorphism, iter_nodes,
)
from utils.exact import parse_fraction

NodePair = Tuple[Node, Node]


def _has_perfect_matching(support: np.ndarray) -> bool:
    if support.shape[0] == 0:
        return True
    missing = (~support).astype(float)
    rows, cols = linear_sum_assignment(missing)
    return not missing[rows, cols].any()


def _lexicographic_matching(support: np.ndarray) -> Optional[List[int]]:
    """Least permutation (row -> column) inside the support, or None."""
    n = support.shape[0]
    if not _has_perfect_matching(support):
        return None
    chosen: List[int] = []
    free_rows = list(range(n))
    free_cols = list(range(n))
    for row in range(n):
        free_rows.remove(row)
        for col in free_cols:
            if not support[row, col]:
                continue
            rest = [c for c in free_cols if c != col]
            if _has_perfect_matching(support[np.ix_(free_rows, rest)]):
                chosen.append(col)
                free_cols = rest
                break
    return chosen


def _bottleneck_matching(residual: np.ndarray, zero: float) -> Optional[List[int]]:
    """Perfect matching in the positive support maximizing its smallest entry."""
    values = np.unique(residual[residual > zero])
    if values.size == 0:
        return None
    lo, hi = 0, values.size - 1
    if not _has_perfect_matching(residual >= values[0]):
        return None
    # largest threshold that still admits a perfect matching
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if _has_perfect_matching(residual >= values[mid]):
            lo = mid
        else:
            hi = mid - 1
    return _lexicographic_matching(residual >= values[lo])


def birkhoff_decompose(M: Sequence[Sequence[Any]]) -> BirkhoffDecomposition:
    """Peel permutations off a nonnegative matrix with constant row and column sums.

    Coefficients are normalized by the common sum alpha, so they sum to 1.
    """
    matrix = np.array([[float(parse_fraction(x)) for x in row] for row in M], dtype=float)
    n = matrix.shape[0]
    if matrix.ndim != 2 or n == 0 or matrix.shape[1] != n:
        raise DecompositionError("Matrix must be square and nonempty")
    if (matrix < -settings.ZERO_THRESHOLD).any():
        raise DecompositionError("Matrix has negative entries")
    alpha = float(matrix[0].sum())
    sums = np.concatenate([matrix.sum(axis=1), matrix.sum(axis=0)])
    if np.abs(sums - alpha).max() > settings.SUM_TOLERANCE:
        logger.error(f"Non-constant row/column sums: {sums.tolist()}")
        raise DecompositionError(f"Row and column sums are not all equal to {alpha}")
    if alpha <= settings.ZERO_THRESHOLD:
        raise DecompositionError("Matrix sums are zero")

    residual = np.where(matrix > settings.ZERO_THRESHOLD, matrix, 0.0)
    terms: List[BirkhoffTerm] = []
    while (residual > settings.ZERO_THRESHOLD).any():
        perm = _bottleneck_matching(residual, settings.ZERO_THRESHOLD)
        if perm is None:
            logger.error(f"No perfect matching after {len(terms)} terms")
            raise DecompositionError("Positive support has no perfect matching; sums violate the tolerance")
        rows = np.arange(n)
        mass = float(residual[rows, perm].min())
        residual[rows, perm] -= mass
        residual[residual <= settings.ZERO_THRESHOLD] = 0.0
        terms.append(BirkhoffTerm(coefficient=mass / alpha, permutation=tuple(c + 1 for c in perm)))

    logger.info(f"Birkhoff decomposition of a {n}x{n} matrix: {len(terms)} terms")
    return BirkhoffDecomposition(n=n, alpha=alpha, terms=terms)


def block_decompose(c: BlockCoupling) -> List[PermutationAtom]:
    """Product over weight classes of the per-block decompositions.

    The result is a measure on class-preserving permutations of {1..s},
    sorted by permutation.
    """
    p = c.p
    per_class: List[List[Tuple[Tuple[int, ...], float]]] = []
    for group in p.classes:
        if len(group) == 1:
            per_class.append([((group[0],), 1.0)])
            continue
        block = [[c.entries[v - 1][u - 1] for u in group] for v in group]
        decomposition = birkhoff_decompose(block)
        per_class.append([
            (tuple(group[k - 1] for k in term.permutation), term.coefficient)
            for term in decomposition.terms
        ])

    atoms = []
    for combo in product(*per_class):
        perm = [0] * p.size
        probability = 1.0
        for group, (images, coefficient) in zip(p.classes, combo):
            for symbol, image in zip(group, images):
                perm[symbol - 1] = image
            probability *= coefficient
        atoms.append(PermutationAtom(permutation=tuple(perm), probability=probability))
    atoms.sort(key=lambda atom: atom.permutation)
    return atoms


def permutation_pushforward(p: ProbVector, atoms: Sequence[PermutationAtom]) -> List[List[float]]:
    """Entry (j, k) is p_j times the mass of permutations sending j to k."""
    matrix = [[0.0] * p.size for _ in range(p.size)]
    for atom in atoms:
        for j, k in enumerate(atom.permutation, start=1):
            matrix[j - 1][k - 1] += atom.probability * p.weight_of(j)
    return matrix


def induced_pair_mass(
    p: ProbVector, node_couplings: Mapping[NodePair, BlockCoupling], N: int
) -> Dict[NodePair, float]:
    """Path masses p(v, u) for depth <= N: p((), ()) = 1, p(jv, ku) = p(v, u) * c_(v,u)[j, k].

    Only pairs with positive mass are listed.
    """
    masses: Dict[NodePair, float] = {((), ()): 1.0}
    frontier = [((), ())]
    for _ in range(N):
        following = []
        for v, u in frontier:
            coupling = node_couplings.get((v, u))
            if coupling is None:
                raise MissingCouplingError(f"No coupling for reachable node pair {v} ~ {u}")
            for j, k in product(range(1, p.size + 1), repeat=2):
                entry = coupling.entries[j - 1][k - 1]
                if entry > settings.ZERO_THRESHOLD:
                    pair = ((j,) + v, (k,) + u)
                    masses[pair] = masses[(v, u)] * entry
                    following.append(pair)
        frontier = following
    return masses


def measure_pair_mass(measure: AutomorphismMeasure, p: ProbVector) -> Dict[NodePair, float]:
    """sum over A of m(A) * w_v * [A v = u], for every node v of the measure's height."""
    masses: Dict[NodePair, float] = {}
    for atom in measure.support:
        a = atom.automorphism
        for v in iter_nodes(p.size, 0, a.height):
            pair = (v, a.image(v))
            masses[pair] = masses.get(pair, 0.0) + atom.probability * weight(p, v)
    return masses


def automorphism_measure(
    p: ProbVector,
    node_couplings: Mapping[NodePair, BlockCoupling],
    N: int,
    cap: Optional[int] = None,
) -> AutomorphismMeasure:
    """Product-form measure on A_N.

    Each node v draws its child permutation from the block decomposition of the
    coupling at (v, A v), independently of the other nodes.
    """
    cap = settings.MEASURE_SUPPORT_CAP if cap is None else cap
    if not 1 <= N <= settings.MEASURE_MAX_HEIGHT:
        raise HeightMismatchError(f"Height {N} is outside 1..{settings.MEASURE_MAX_HEIGHT}")
    decompositions: Dict[NodePair, List[PermutationAtom]] = {}

    partials: List[Tuple[Dict[Node, Permutation], Dict[Node, Node], float]] = [({}, {(): ()}, 1.0)]
    for v in iter_nodes(p.size, 0, N - 1):
        extended = []
        for perms, images, probability in partials:
            pair = (v, images[v])
            if pair not in decompositions:
                coupling = node_couplings.get(pair)
                if coupling is None:
                    raise MissingCouplingError(f"No coupling for reachable node pair {pair[0]} ~ {pair[1]}")
                decompositions[pair] = block_decompose(coupling)
            for atom in decompositions[pair]:
                new_images = dict(images)
                for j in range(1, p.size + 1):
                    new_images[(j,) + v] = (atom.permutation[j - 1],) + images[v]
                extended.append(({**perms, v: atom.permutation}, new_images, probability * atom.probability))
        if len(extended) > cap:
            raise TooLargeError("automorphism measure support", len(extended), cap)
        partials = extended

    support = [
        AutomorphismAtom(automorphism=TreeAutomorphism(p=p, height=N, child_perms=perms), probability=probability)
        for perms, _, probability in partials
    ]
    logger.info(f"Automorphism measure of height {N}: {len(support)} atoms from {len(decompositions)} couplings")
    return AutomorphismMeasure(support=support)
