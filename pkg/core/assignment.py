"""Exact minimum-cost assignment with lexicographic tie-breaking."""
from itertools import permutations
from typing import List, Sequence, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

# costs within this distance of the optimum count as ties
TIE_TOLERANCE = 1e-13
BRUTE_FORCE_SIZE = 4


def _optimum(cost: np.ndarray) -> float:
    if cost.size == 0:
        return 0.0
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].sum())


def solve_assignment(cost: Sequence[Sequence[float]]) -> Tuple[Tuple[int, ...], float]:
    """Return (perm, value) with perm[i] the 0-based column of row i.

    Among optimal assignments the lexicographically least perm is returned.
    Small instances are enumerated; larger ones use the Hungarian solver and
    fix rows one at a time to the smallest column that keeps the optimum.
    """
    k = len(cost)
    if k <= BRUTE_FORCE_SIZE:
        best_perm: Tuple[int, ...] = ()
        best = float("inf")
        for perm in permutations(range(k)):
            value = sum(cost[i][perm[i]] for i in range(k))
            if value < best - TIE_TOLERANCE:
                best, best_perm = value, perm
        return best_perm, best

    matrix = np.asarray(cost, dtype=float)
    best = _optimum(matrix)
    chosen: List[int] = []
    free_cols = list(range(k))
    spent = 0.0
    for row in range(k):
        for col in free_cols:
            rest_rows = list(range(row + 1, k))
            rest_cols = [c for c in free_cols if c != col]
            rest = _optimum(matrix[np.ix_(rest_rows, rest_cols)]) if rest_rows else 0.0
            if spent + matrix[row, col] + rest <= best + TIE_TOLERANCE:
                chosen.append(col)
                spent += matrix[row, col]
                free_cols.remove(col)
                break
    return tuple(chosen), best
