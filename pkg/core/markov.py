"""One-sided Markov shifts, preimage graphs and the tvwB decision procedure."""
import math
from collections import Counter, deque
from fractions import Fraction
from itertools import product
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np
from loguru import logger

from config import settings
from models.errors import DescriptorError, EndPError, PrecisionError, ReducibleMatrixError, TooLargeError
from models.models import (
    EndPCheck, LabelMetric, Node, PreimageGraph, ProbVector, StochasticMatrix, SyncPath,
    TreeName, TvwbVerdict, iter_nodes,
)
from utils.exact import format_fraction

GroupElement = Tuple[int, ...]


def support_graph(A: StochasticMatrix) -> nx.DiGraph:
    graph = nx.DiGraph()
    graph.add_nodes_from(range(A.size))
    for i, row in enumerate(A.entries):
        for j, value in enumerate(row):
            if value > 0:
                graph.add_edge(i, j)
    return graph


def is_irreducible(A: StochasticMatrix) -> bool:
    return nx.is_strongly_connected(support_graph(A))


def is_primitive(A: StochasticMatrix) -> bool:
    """Some power is strictly positive; powers checked up to (n-1)^2 + 1."""
    n = A.size
    base = np.array([[x > 0 for x in row] for row in A.entries], dtype=np.int64)
    power = base.copy()
    for _ in range((n - 1) ** 2 + 1):
        if power.all():
            return True
        power = ((power @ base) > 0).astype(np.int64)
    return False


def stationary(A: StochasticMatrix) -> List[float]:
    """The left fixed probability vector q with qA = q."""
    if not is_irreducible(A):
        logger.error("stationary() called on a reducible matrix")
        raise ReducibleMatrixError("Matrix is reducible; the left fixed vector is not unique")
    n = A.size
    matrix = np.array(A.as_float())
    system = matrix.T - np.eye(n)
    system[-1, :] = 1.0
    rhs = np.zeros(n)
    rhs[-1] = 1.0
    q = np.linalg.solve(system, rhs)
    residual = float(np.abs(q @ matrix - q).sum())
    for _ in range(3):
        if residual <= settings.STATIONARY_TOLERANCE:
            break
        q = q + np.linalg.solve(system, rhs - system @ q)
        residual = float(np.abs(q @ matrix - q).sum())
    logger.debug(f"stationary vector {q.tolist()} with residual {residual:.3e}")
    if residual > settings.STATIONARY_TOLERANCE:
        raise PrecisionError(f"Stationary residual {residual:.3e} exceeds {settings.STATIONARY_TOLERANCE:.0e}")
    return [float(x) for x in q]


def end_p_check(A: StochasticMatrix) -> EndPCheck:
    """Accept when every row's nonzero entries form one common multiset.

    The common p lists those entries in ascending order.
    """
    rows = [Counter(x for x in row if x != 0) for row in A.entries]
    for i, row in enumerate(rows[1:], start=2):
        if row != rows[0]:
            return EndPCheck(accepted=False, offending_row=i, reason=f"Row {i} has different nonzero entries than row 1")
    common: List[Fraction] = sorted(rows[0].elements())
    exact = [format_fraction(x) for x in common]
    if len(common) < 2:
        return EndPCheck(accepted=False, exact=exact, reason="Rows have a single nonzero entry (degenerate p)")
    return EndPCheck(accepted=True, p=ProbVector(components=tuple(float(x) for x in common)), exact=exact)


def _require_end_p(A: StochasticMatrix) -> ProbVector:
    check = end_p_check(A)
    if not check.accepted:
        raise EndPError(check.reason or "Matrix is not in End(p)")
    if not is_irreducible(A):
        raise ReducibleMatrixError("Matrix is reducible")
    return check.p


def preimage_graph_from_markov(A: StochasticMatrix) -> PreimageGraph:
    """G(A) with the canonical tree partition.

    At state I the branch symbols of a weight class go, in ascending symbol
    order, to the states J with A_IJ of that weight, in ascending J order.
    """
    p = _require_end_p(A)
    exact = sorted(Counter(x for x in A.entries[0] if x != 0).elements())
    targets = []
    for row in A.entries:
        row_targets = [0] * p.size
        used: Dict[int, int] = {}
        for j, value in enumerate(row):
            if value == 0:
                continue
            # symbols with this exact weight, in order; take the next unused one
            candidates = [k for k, x in enumerate(exact) if x == value]
            symbol = candidates[used.get(candidates[0], 0)]
            used[candidates[0]] = used.get(candidates[0], 0) + 1
            row_targets[symbol] = j
        targets.append(tuple(row_targets))
    graph = PreimageGraph(p=p, states=tuple(A.state_labels()), targets=tuple(targets))
    logger.info(f"Built preimage graph with {graph.size} states from a {A.size}x{A.size} matrix")
    return graph


def group_elements(orders: Sequence[int]) -> List[GroupElement]:
    return [tuple(g) for g in product(*(range(n) for n in orders))]


def _format_element(g: GroupElement) -> str:
    return str(g[0]) if len(g) == 1 else "(" + ",".join(map(str, g)) + ")"


def _normalize_cocycle(p: ProbVector, orders: Sequence[int], cocycle: Union[Sequence[Any], Mapping[Any, Any]]) -> List[GroupElement]:
    if isinstance(cocycle, Mapping):
        values = []
        for key in cocycle:
            if not isinstance(key, int) and not (isinstance(key, str) and key.isdigit()):
                raise DescriptorError(f"Cocycle key {key!r} is not a single symbol; only memory-1 cocycles are supported")
        for symbol in range(1, p.size + 1):
            if symbol not in cocycle and str(symbol) not in cocycle:
                raise DescriptorError(f"Cocycle has no value for symbol {symbol}")
            values.append(cocycle[symbol] if symbol in cocycle else cocycle[str(symbol)])
    else:
        values = list(cocycle)
    if len(values) != p.size:
        raise DescriptorError(f"Expected {p.size} cocycle values (one per symbol), got {len(values)}")
    elements = []
    for value in values:
        g = (value,) if isinstance(value, int) else tuple(value)
        if len(g) != len(orders) or not all(isinstance(x, int) for x in g):
            raise DescriptorError(f"Cocycle value {value!r} is not an element of Z/{list(orders)}")
        elements.append(tuple(x % n for x, n in zip(g, orders)))
    return elements


def preimage_graph_from_extension(
    p: ProbVector,
    group_order: Union[int, Sequence[int]],
    cocycle: Union[Sequence[Any], Mapping[Any, Any]],
) -> PreimageGraph:
    """Preimage graph of a memory-1 (G, phi)-extension of the Bernoulli shift.

    States are (symbol, g); branch j leads from (i, g) to (j, g - phi_j).
    """
    orders = [group_order] if isinstance(group_order, int) else list(group_order)
    phi = _normalize_cocycle(p, orders, cocycle)
    elements = group_elements(orders)
    position = {(i, g): k for k, (i, g) in enumerate(product(range(1, p.size + 1), elements))}
    states, targets = [], []
    for (i, g), _ in sorted(position.items(), key=lambda item: item[1]):
        states.append(f"({i},{_format_element(g)})")
        row = []
        for j in range(1, p.size + 1):
            h = tuple((x - y) % n for x, y, n in zip(g, phi[j - 1], orders))
            row.append(position[(j, h)])
        targets.append(tuple(row))
    return PreimageGraph(p=p, states=tuple(states), targets=tuple(targets))


def generator_condition(p: ProbVector, group_order: Union[int, Sequence[int]], cocycle: Sequence[Any]) -> bool:
    """Some i != j with p_i = p_j has phi_j - phi_i generating G.

    In a finite group a dense orbit means the element generates the group; this
    is the sufficient condition for tvwB of the skew product.
    """
    orders = [group_order] if isinstance(group_order, int) else list(group_order)
    phi = _normalize_cocycle(p, orders, cocycle)
    size = math.prod(orders)
    for group in p.classes:
        for i in group:
            for j in group:
                if i == j:
                    continue
                diff = [(a - b) % n for a, b, n in zip(phi[j - 1], phi[i - 1], orders)]
                order = math.lcm(*(n // math.gcd(x, n) for x, n in zip(diff, orders)))
                if order == size:
                    return True
    return False


def sufficient_mixing_uniform(A: StochasticMatrix) -> Optional[bool]:
    """Uniform p and primitive A imply tvwB. None when p is not uniform."""
    check = end_p_check(A)
    if not check.accepted:
        raise EndPError(check.reason or "Matrix is not in End(p)")
    if len(check.p.classes) != 1:
        return None
    return is_primitive(A)


def sufficient_shared_entries(A: StochasticMatrix) -> bool:
    """Every pair of rows has a column holding the same nonzero entry in both."""
    _require_end_p(A)
    rows = A.entries
    for a in range(len(rows)):
        for b in range(a + 1, len(rows)):
            if not any(x != 0 and x == y for x, y in zip(rows[a], rows[b])):
                return False
    return True


def sync_bound(n_states: int) -> int:
    """The N^(3N) bound on synchronizing path length."""
    if n_states < 1:
        raise ValueError(f"n_states must be positive, got {n_states}")
    return n_states ** (3 * n_states)


def _successors(
    g: PreimageGraph, members: List[int], group: Tuple[int, ...], cap: int
) -> Dict[frozenset, Tuple[int, ...]]:
    """Every endpoint set reachable from `members` by one edge of the class, with one choice per set.

    Sets are grown one member at a time and deduplicated, so the work is bounded
    by the number of distinct partial sets rather than the number of choices.
    """
    partial: Dict[frozenset, Tuple[int, ...]] = {frozenset(): ()}
    for u in members:
        options = sorted({g.targets[u][j - 1] for j in group})
        grown: Dict[frozenset, Tuple[int, ...]] = {}
        for chosen, picks in partial.items():
            for target in options:
                key = chosen | {target}
                if key not in grown:
                    grown[key] = picks + (target,)
        if len(grown) > cap:
            raise TooLargeError("successor sets per (set, weight)", len(grown), cap)
        partial = grown
    return partial


def decide_tvwb(g: PreimageGraph, cap: Optional[int] = None) -> TvwbVerdict:
    """Breadth-first search over endpoint sets.

    From a set S and a weight class, each state of S picks one out-edge of that
    weight; the successor is the set of chosen targets. The system is tvwB iff a
    singleton is reachable from the set of all states.
    """
    cap = settings.SUCCESSOR_CAP if cap is None else cap
    if not nx.is_strongly_connected(_graph_of(g)):
        logger.warning("decide_tvwb on a reducible preimage graph; the verdict covers the given graph only")
    classes = g.p.classes
    start = frozenset(range(g.size))
    parents: Dict[frozenset, Optional[Tuple[frozenset, int, Dict[int, int]]]] = {start: None}
    depth = {start: 0}
    found = start if len(start) == 1 else None
    queue = deque([start])
    while queue and found is None:
        current = queue.popleft()
        members = sorted(current)
        for class_index, group in enumerate(classes):
            for successor, choice in _successors(g, members, group, cap).items():
                if successor in parents:
                    continue
                parents[successor] = (current, class_index, dict(zip(members, choice)))
                depth[successor] = depth[current] + 1
                if len(successor) == 1:
                    found = successor
                    break
                queue.append(successor)
            if found is not None:
                break

    n = g.size
    verdict_args = dict(explored=len(parents), bound=sync_bound(n), subset_bound=2 ** n)
    if found is None:
        certificate = sorted((sorted(s) for s in parents), key=lambda s: (len(s), s))
        logger.info(f"decide_tvwb: not tvwB, {len(parents)} closed endpoint sets")
        return TvwbVerdict(
            decision=False,
            certificate=[[g.states[u] for u in s] for s in certificate],
            depth=max(depth.values()),
            **verdict_args,
        )

    steps: List[Tuple[int, Dict[int, int]]] = []
    node = found
    while parents[node] is not None:
        previous, class_index, choice = parents[node]
        steps.append((class_index, choice))
        node = previous
    steps.reverse()
    paths = []
    for u in range(n):
        current, symbols, visited = u, [], [g.states[u]]
        for class_index, choice in steps:
            target = choice[current]
            symbols.append(min(j for j in classes[class_index] if g.targets[current][j - 1] == target))
            current = target
            visited.append(g.states[current])
        paths.append(SyncPath(start=g.states[u], symbols=symbols, states=visited))
    weights = [g.p.weight_of(classes[class_index][0]) for class_index, _ in steps]
    logger.info(f"decide_tvwb: tvwB, synchronizing weight sequence of length {len(steps)}")
    return TvwbVerdict(decision=True, weights=weights, paths=paths, depth=len(steps), **verdict_args)


def _graph_of(g: PreimageGraph) -> nx.DiGraph:
    graph = nx.DiGraph()
    graph.add_nodes_from(range(g.size))
    for u, row in enumerate(g.targets):
        graph.add_edges_from((u, t) for t in row)
    return graph


def state_tree_names(g: PreimageGraph, m: int) -> Dict[str, TreeName]:
    """Expanded height-m state tree names, labels = state names."""
    names = {}
    for start in range(g.size):
        state: Dict[Node, int] = {(): start}
        labels = {}
        for v in iter_nodes(g.p.size, 1, m):
            state[v] = g.targets[state[v[1:]]][v[0] - 1]
            labels[v] = g.states[state[v]]
        names[g.states[start]] = TreeName(p=g.p, height=m, metric=LabelMetric.DISCRETE, labels=labels)
    return names
