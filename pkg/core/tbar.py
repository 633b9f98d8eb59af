"""t-bar distances between tree names, between states, and between processes.

The exact distance is a bottom-up dynamic program. Subtrees are hash-consed
(equal labeled subtrees share one id), and the memo is keyed on id pairs, so
names whose subtrees repeat, such as every name generated by a finite-state
system, cost time polynomial in the height.
"""
from typing import Any, Callable, Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from config import settings
from core.assignment import solve_assignment
from core.tree import enumerate_automorphisms, weight
from models.errors import HeightMismatchError, MetricMismatchError, TooLargeError
from models.models import (
    LabelMetric, Node, Permutation, PreimageGraph, ProbVector, ProcessTbarSummary,
    SystemDescriptor, TbarResult, TreeAutomorphism, TreeName, iter_nodes,
)

Children = Tuple[Tuple[Any, Hashable], ...]
QUANTILES = (0.5, 0.9, 0.99)


def circle_distance(a: float, b: float) -> float:
    """Arc length on [0, 1); diameter 1/2."""
    gap = abs(a - b) % 1.0
    return min(gap, 1.0 - gap)


def label_distance(metric: LabelMetric) -> Callable[[Any, Any], float]:
    if metric == LabelMetric.DISCRETE:
        return lambda a, b: 0.0 if a == b else 1.0

    def symbol_circle(a: Any, b: Any) -> float:
        return 0.5 * (0.0 if a[0] == b[0] else 1.0) + 0.5 * circle_distance(a[1], b[1])

    return symbol_circle


class SubtreeIndex:
    """Interns the labeled subtrees of tree names.

    The id of a node stands for the labels of its children together with their
    ids, so two nodes at the same depth with equal ids root identical subtrees.
    """

    LEAF = 0

    def __init__(self):
        self._ids: Dict[Children, int] = {(): self.LEAF}
        self._children: List[Children] = [()]

    def __len__(self) -> int:
        return len(self._children)

    def _intern(self, key: Children) -> int:
        found = self._ids.get(key)
        if found is None:
            found = len(self._children)
            self._ids[key] = found
            self._children.append(key)
        return found

    def index(self, t: TreeName) -> Dict[Node, int]:
        """Ids of every node of length < height, root included."""
        s = t.p.size
        ids: Dict[Node, int] = {}
        for depth in range(t.height - 1, -1, -1):
            for v in iter_nodes(s, depth, depth):
                key = tuple((t.labels[(j,) + v], ids.get((j,) + v, self.LEAF)) for j in range(1, s + 1))
                ids[v] = self._intern(key)
        return ids

    def children(self, key: int) -> Children:
        return self._children[key]


class SubtreeMatcher:
    """Memoized optimal matching of two subtrees.

    cost(a, b) is the weight-relative cost: the minimum over class-preserving
    child permutations of sum_j p_j * (d(label_j, label_pi(j)) + cost(child_j, child_pi(j))).
    """

    def __init__(
        self,
        p: ProbVector,
        distance: Callable[[Any, Any], float],
        left: Callable[[Hashable], Children],
        right: Callable[[Hashable], Children],
        cap: Optional[int] = None,
    ):
        self.p = p
        self.distance = distance
        self.left = left
        self.right = right
        self.cap = settings.MEMO_CAP if cap is None else cap
        self._memo: Dict[Tuple[Hashable, Hashable], Tuple[float, Permutation]] = {}
        self._identity = tuple(range(1, p.size + 1))

    def __len__(self) -> int:
        return len(self._memo)

    def _solve(self, a: Hashable, b: Hashable) -> Tuple[float, Permutation]:
        found = self._memo.get((a, b))
        if found is not None:
            return found
        kids_a, kids_b = self.left(a), self.right(b)
        if not kids_a:
            result = (0.0, self._identity)
        else:
            perm = list(self._identity)
            total = 0.0
            for group in self.p.classes:
                matrix = [
                    [
                        self.distance(kids_a[i - 1][0], kids_b[j - 1][0])
                        + self._solve(kids_a[i - 1][1], kids_b[j - 1][1])[0]
                        for j in group
                    ]
                    for i in group
                ]
                cols, value = solve_assignment(matrix)
                for row, col in enumerate(cols):
                    perm[group[row] - 1] = group[col]
                total += self.p.weight_of(group[0]) * value
            result = (total, tuple(perm))
        if len(self._memo) >= self.cap:
            raise TooLargeError("t-bar memo entries", len(self._memo) + 1, self.cap)
        self._memo[(a, b)] = result
        return result

    def cost(self, a: Hashable, b: Hashable) -> float:
        return self._solve(a, b)[0]

    def best_perm(self, a: Hashable, b: Hashable) -> Permutation:
        return self._solve(a, b)[1]


def _check_compatible(t1: TreeName, t2: TreeName) -> None:
    if t1.height != t2.height:
        raise HeightMismatchError(f"Tree names have heights {t1.height} and {t2.height}")
    if t1.p.components != t2.p.components:
        raise HeightMismatchError("Tree names are built on different probability vectors")
    if t1.metric != t2.metric:
        raise MetricMismatchError(f"Label spaces differ: {t1.metric.value} vs {t2.metric.value}")


class TbarEngine:
    """Repeated t-bar comparisons among names sharing p, metric and height."""

    def __init__(self, p: ProbVector, metric: LabelMetric, height: int, cap: Optional[int] = None):
        self.p = p
        self.metric = metric
        self.height = height
        self.index = SubtreeIndex()
        self.matcher = SubtreeMatcher(p, label_distance(metric), self.index.children, self.index.children, cap)

    def add(self, t: TreeName) -> Dict[Node, int]:
        if t.height != self.height or t.metric != self.metric or t.p.components != self.p.components:
            raise HeightMismatchError("Tree name does not match this engine's p, metric and height")
        return self.index.index(t)

    def value(self, root_a: int, root_b: int) -> float:
        return self.matcher.cost(root_a, root_b) / self.height

    def witness(self, ids1: Dict[Node, int], ids2: Dict[Node, int]) -> TreeAutomorphism:
        s, N = self.p.size, self.height
        images: Dict[Node, Node] = {(): ()}
        perms: Dict[Node, Permutation] = {}
        for v in iter_nodes(s, 0, N - 1):
            perm = self.matcher.best_perm(ids1[v], ids2[images[v]])
            perms[v] = perm
            if len(v) + 1 < N:
                for j in range(1, s + 1):
                    images[(j,) + v] = (perm[j - 1],) + images[v]
        return TreeAutomorphism(p=self.p, height=N, child_perms=perms)


def matching_cost(a: TreeAutomorphism, t1: TreeName, t2: TreeName) -> float:
    """(1/N) * sum over 0 < |v| <= N of w_v * d(t1(v), t2(A v))."""
    _check_compatible(t1, t2)
    if a.height != t1.height:
        raise HeightMismatchError(f"Automorphism height {a.height} does not match names of height {t1.height}")
    distance = label_distance(t1.metric)
    images: Dict[Node, Node] = {(): ()}
    total = 0.0
    for v in iter_nodes(t1.p.size, 1, t1.height):
        image = (a.child_perms[v[1:]][v[0] - 1],) + images[v[1:]]
        images[v] = image
        total += weight(t1.p, v) * distance(t1.labels[v], t2.labels[image])
    return total / t1.height


def tbar_exact(t1: TreeName, t2: TreeName, cap: Optional[int] = None) -> TbarResult:
    """Exact t-bar distance with an optimal witness automorphism."""
    _check_compatible(t1, t2)
    engine = TbarEngine(t1.p, t1.metric, t1.height, cap)
    ids1, ids2 = engine.add(t1), engine.add(t2)
    value = engine.value(ids1[()], ids2[()])
    witness = engine.witness(ids1, ids2)
    logger.debug(f"tbar_exact height {t1.height}: {len(engine.index)} subtrees, {len(engine.matcher)} memo entries")
    return TbarResult(value=value, witness=witness, height=t1.height)


def tbar_bruteforce(t1: TreeName, t2: TreeName, cap: Optional[int] = None) -> TbarResult:
    """Exhaustive minimum over A_N; first automorphism wins ties."""
    _check_compatible(t1, t2)
    best: Optional[TreeAutomorphism] = None
    best_value = float("inf")
    for a in enumerate_automorphisms(t1.p, t1.height, cap):
        value = matching_cost(a, t1, t2)
        if value < best_value - 1e-15:
            best, best_value = a, value
    return TbarResult(value=best_value, witness=best, height=t1.height)


def tbar_states(g: PreimageGraph, heights: Sequence[int], cap: Optional[int] = None) -> Dict[int, List[List[float]]]:
    """Per-height matrices of t-bar between the state tree names of g.

    The subtree of a state tree name at node v depends only on the state at v,
    so the memo runs over (state, remaining height) pairs.
    """

    def children(key: Tuple[int, int]) -> Children:
        state, remaining = key
        if remaining == 0:
            return ()
        return tuple((target, (target, remaining - 1)) for target in g.targets[state])

    matcher = SubtreeMatcher(g.p, label_distance(LabelMetric.DISCRETE), children, children, cap)
    table: Dict[int, List[List[float]]] = {}
    for m in heights:
        if m < 1:
            raise HeightMismatchError(f"Heights must be positive, got {m}")
        table[m] = [[matcher.cost((i, m), (j, m)) / m for j in range(g.size)] for i in range(g.size)]
    logger.info(f"tbar_states over {g.size} states, heights {list(heights)}: {len(matcher)} memo entries")
    return table


def process_tbar_mc(
    sys_a: SystemDescriptor,
    sys_b: SystemDescriptor,
    n: int,
    pairs: int,
    seed: int,
    cap: Optional[int] = None,
) -> ProcessTbarSummary:
    """Monte Carlo t-bar between two processes under the product measure."""
    from core.dynsim import label_mode_for, preimage_tree, sample_point, system_p
    from utils.seeding import derive_seed

    p_a, p_b = system_p(sys_a), system_p(sys_b)
    if p_a.components != p_b.components:
        raise MetricMismatchError("Both systems must share the same probability vector")
    cap = settings.WORK_CAP if cap is None else cap
    work = n * p_a.size ** n
    if work > cap:
        raise TooLargeError("tree building work n*s^n", work, cap)
    if pairs <= 0:
        return ProcessTbarSummary(height=n, pairs=0)

    mode = label_mode_for(sys_a)
    if label_mode_for(sys_b) != mode:
        raise MetricMismatchError("Systems produce tree names in different label spaces")
    values = []
    engine: Optional[TbarEngine] = None
    for k in range(pairs):
        x = sample_point(sys_a, 1, derive_seed(seed, "point-a", k))
        y = sample_point(sys_b, 1, derive_seed(seed, "point-b", k))
        t1 = preimage_tree(sys_a, x, n, mode)
        t2 = preimage_tree(sys_b, y, n, mode)
        if engine is None:
            engine = TbarEngine(t1.p, t1.metric, n)
        values.append(engine.value(engine.add(t1)[()], engine.add(t2)[()]))
    array = np.asarray(values)
    summary = ProcessTbarSummary(
        height=n,
        pairs=pairs,
        mean=float(array.mean()),
        quantiles={str(q): float(v) for q, v in zip(QUANTILES, np.quantile(array, QUANTILES))},
    )
    logger.info(f"process_tbar_mc n={n} pairs={pairs}: mean {summary.mean:.6f}")
    return summary
