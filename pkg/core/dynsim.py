"""Example systems: sampling, preimage tree names, p-names, genericity and
the empirical tvwB profile.

Every supported system has a state model: the label of T_v x depends only on
a state attached to v, and the state of a child jv depends only on the state
of v and on j. Bernoulli states are leading symbols, Markov states are chain
states, finite-group states are (symbol, g) pairs, and circle states are
(symbol, count vector) pairs whose fiber is g minus the counted rotations.
"""
import math
from abc import ABC, abstractmethod
from collections import defaultdict
from typing import Any, Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from config import settings
from core.markov import (
    group_elements, preimage_graph_from_extension, preimage_graph_from_markov, stationary,
)
from core.tbar import TbarEngine
from models.errors import DescriptorError, MetricMismatchError, TooLargeError
from models.models import (
    GenericityReport, LabelMetric, LabelMode, Node, PointSample, PreimageGraph, ProbVector,
    ProfileRow, SystemDescriptor, SystemKind, TreeName, iter_nodes,
)
from utils.seeding import derive_seed, rng_for

EPSILON_GRID = tuple(k / 100 for k in range(1, 101))


def discretize(x: float, N: int) -> float:
    """Midpoint of the dyadic interval of length 2^-N containing x."""
    return (2 * dyadic_cell(x, N) + 1) / 2 ** (N + 1)


def dyadic_cell(x: float, N: int) -> int:
    """t with x in [t/2^N, (t+1)/2^N)."""
    if not 0.0 <= x < 1.0:
        raise DescriptorError(f"Circle point {x} is outside [0, 1)")
    if N < 1:
        raise DescriptorError(f"Dyadic level must be positive, got {N}")
    return min(int(math.floor(x * 2 ** N)), 2 ** N - 1)


def system_p(d: SystemDescriptor) -> ProbVector:
    if d.kind == SystemKind.MARKOV:
        return state_model(d).p
    return d.p


def label_mode_for(d: SystemDescriptor) -> LabelMode:
    """Extensions are compared on symbol and fiber; the rest on symbols."""
    if d.kind in (SystemKind.FINITE_GROUP_EXTENSION, SystemKind.CIRCLE_EXTENSION):
        return LabelMode.SYMBOL_AND_FIBER
    return LabelMode.SYMBOL


class StateModel(ABC):
    """Preimage-state view of one system."""

    def __init__(self, p: ProbVector):
        self.p = p

    @abstractmethod
    def root(self, x: PointSample) -> Hashable:
        """State of x itself."""

    @abstractmethod
    def child(self, state: Hashable, j: int) -> Hashable:
        """State of the preimage of a point in `state` along branch symbol j."""

    @abstractmethod
    def label(self, state: Hashable, mode: LabelMode, dyadic: Optional[int] = None) -> Any:
        pass

    def metric(self, mode: LabelMode) -> LabelMetric:
        return LabelMetric.DISCRETE

    def cell(self, state: Hashable, partition: str) -> str:
        if partition == "symbol":
            return str(self.label(state, LabelMode.SYMBOL))
        raise DescriptorError(f"Partition {partition!r} is not defined for this system")

    def reference(self, partition: str) -> Dict[str, float]:
        if partition == "symbol":
            return {str(j): self.p.weight_of(j) for j in range(1, self.p.size + 1)}
        raise DescriptorError(f"Partition {partition!r} is not defined for this system")


class BernoulliModel(StateModel):
    def root(self, x: PointSample) -> int:
        return x.symbol_stream[0]

    def child(self, state: int, j: int) -> int:
        return j

    def label(self, state: int, mode: LabelMode, dyadic: Optional[int] = None) -> int:
        if mode != LabelMode.SYMBOL:
            raise MetricMismatchError("Bernoulli tree names carry symbol labels only")
        return state


class GraphModel(StateModel):
    """Systems whose states are the vertices of a finite preimage graph."""

    def __init__(self, graph: PreimageGraph, stationary_q: Optional[List[float]] = None):
        super().__init__(graph.p)
        self.graph = graph
        self.stationary_q = stationary_q

    def root(self, x: PointSample) -> int:
        return x.symbol_stream[0] - 1

    def child(self, state: int, j: int) -> int:
        return self.graph.targets[state][j - 1]

    def label(self, state: int, mode: LabelMode, dyadic: Optional[int] = None) -> str:
        if mode != LabelMode.SYMBOL:
            raise MetricMismatchError("Markov tree names carry state labels only")
        return self.graph.states[state]

    def cell(self, state: int, partition: str) -> str:
        if partition in ("symbol", "state"):
            return self.graph.states[state]
        return super().cell(state, partition)

    def reference(self, partition: str) -> Dict[str, float]:
        if partition in ("symbol", "state"):
            return dict(zip(self.graph.states, self.stationary_q))
        return super().reference(partition)


class FiniteGroupModel(StateModel):
    def __init__(self, d: SystemDescriptor):
        super().__init__(d.p)
        self.orders = list(d.group.order)
        self.graph = preimage_graph_from_extension(d.p, self.orders, d.group.cocycle)
        self.elements = group_elements(self.orders)

    def root(self, x: PointSample) -> int:
        g = tuple(x.aux)
        return (x.symbol_stream[0] - 1) * len(self.elements) + self.elements.index(g)

    def child(self, state: int, j: int) -> int:
        return self.graph.targets[state][j - 1]

    def fiber(self, state: int) -> Tuple[int, ...]:
        return self.elements[state % len(self.elements)]

    def label(self, state: int, mode: LabelMode, dyadic: Optional[int] = None) -> Any:
        if mode == LabelMode.SYMBOL:
            return state // len(self.elements) + 1
        return self.graph.states[state]

    def cell(self, state: int, partition: str) -> str:
        if partition == "state":
            return self.graph.states[state]
        if partition == "fiber":
            return str(list(self.fiber(state)))
        return super().cell(state, partition)

    def reference(self, partition: str) -> Dict[str, float]:
        size = len(self.elements)
        if partition == "state":
            return {
                self.graph.states[u]: self.p.weight_of(u // size + 1) / size for u in range(self.graph.size)
            }
        if partition == "fiber":
            return {str(list(g)): 1.0 / size for g in self.elements}
        return super().reference(partition)


class CircleModel(StateModel):
    """States are (symbol, counts, g); the fiber is g minus sum_j counts_j * alpha_j mod 1."""

    def __init__(self, d: SystemDescriptor):
        super().__init__(d.p)
        self.alphas = d.alphas

    def root(self, x: PointSample) -> Tuple[int, Tuple[int, ...], float]:
        return (x.symbol_stream[0], (0,) * self.p.size, float(x.aux))

    def child(self, state, j: int):
        _, counts, g = state
        counts = counts[: j - 1] + (counts[j - 1] + 1,) + counts[j:]
        return (j, counts, g)

    def fiber(self, state) -> float:
        _, counts, g = state
        value = math.fsum([g] + [-c * a for c, a in zip(counts, self.alphas)]) % 1.0
        return 0.0 if value >= 1.0 else value

    def metric(self, mode: LabelMode) -> LabelMetric:
        return LabelMetric.SYMBOL_CIRCLE

    def label(self, state, mode: LabelMode, dyadic: Optional[int] = None) -> Any:
        if mode != LabelMode.SYMBOL_AND_FIBER:
            raise MetricMismatchError("Circle-extension tree names need symbol-and-fiber labels")
        fiber = self.fiber(state)
        return (state[0], discretize(fiber, dyadic) if dyadic else fiber)

    def cell(self, state, partition: str) -> str:
        if partition == "symbol":
            return str(state[0])
        if partition.startswith("dyadic:"):
            return str(dyadic_cell(self.fiber(state), _dyadic_level(partition)))
        raise DescriptorError(f"Partition {partition!r} is not defined for circle extensions; use dyadic:N")

    def reference(self, partition: str) -> Dict[str, float]:
        if partition.startswith("dyadic:"):
            level = _dyadic_level(partition)
            return {str(t): 1.0 / 2 ** level for t in range(2 ** level)}
        return super().reference(partition)


def _dyadic_level(partition: str) -> int:
    try:
        return int(partition.split(":", 1)[1])
    except ValueError as e:
        raise DescriptorError(f"Bad dyadic partition {partition!r}") from e


def state_model(d: SystemDescriptor) -> StateModel:
    if d.kind == SystemKind.BERNOULLI:
        return BernoulliModel(d.p)
    if d.kind == SystemKind.MARKOV:
        return GraphModel(preimage_graph_from_markov(d.matrix), stationary(d.matrix))
    if d.kind == SystemKind.FINITE_GROUP_EXTENSION:
        return FiniteGroupModel(d)
    return CircleModel(d)


def preimage_graph_for(d: SystemDescriptor) -> PreimageGraph:
    """The finite preimage graph of a decidable system."""
    if d.kind == SystemKind.MARKOV:
        return preimage_graph_from_markov(d.matrix)
    if d.kind == SystemKind.FINITE_GROUP_EXTENSION:
        return preimage_graph_from_extension(d.p, d.group.order, d.group.cocycle)
    if d.kind == SystemKind.BERNOULLI:
        s = d.p.size
        return PreimageGraph(
            p=d.p, states=tuple(str(j) for j in range(1, s + 1)), targets=tuple(tuple(range(s)) for _ in range(s))
        )
    raise DescriptorError("undecidable kind; use estimate")


def sample_point(d: SystemDescriptor, length: int, seed: int) -> PointSample:
    """Finitely many coordinates of a point drawn from the system's measure.

    Markov streams hold states, current state first, then its past.
    """
    if length < 1:
        raise DescriptorError(f"Sample length must be positive, got {length}")
    rng = rng_for(seed, "sample", 0)
    trace = [int(seed)]
    if d.kind == SystemKind.MARKOV:
        q = np.asarray(stationary(d.matrix))
        rows = np.asarray(d.matrix.as_float())
        chain = [int(rng.choice(len(q), p=q / q.sum()))]
        for _ in range(length - 1):
            row = rows[chain[-1]]
            chain.append(int(rng.choice(len(row), p=row / row.sum())))
        return PointSample(symbol_stream=[state + 1 for state in reversed(chain)], seed_trace=trace)

    p = np.asarray(d.p.components)
    stream = [int(j) + 1 for j in rng.choice(d.p.size, size=length, p=p / p.sum())]
    aux: Any = None
    if d.kind == SystemKind.FINITE_GROUP_EXTENSION:
        aux = [int(rng.integers(n)) for n in d.group.order]
    elif d.kind == SystemKind.CIRCLE_EXTENSION:
        aux = float(rng.random())
    return PointSample(symbol_stream=stream, aux=aux, seed_trace=trace)


def preimage_tree(
    d: SystemDescriptor,
    x: PointSample,
    height: int,
    mode: Optional[LabelMode] = None,
    dyadic: Optional[int] = None,
    model: Optional[StateModel] = None,
) -> TreeName:
    """Height-`height` tree name of x: node v carries the label of T_v x."""
    if height > settings.TREE_HEIGHT_CAP:
        raise TooLargeError("tree height", height, settings.TREE_HEIGHT_CAP)
    model = model or state_model(d)
    work = height * model.p.size ** height
    if work > settings.WORK_CAP:
        raise TooLargeError("tree building work n*s^n", work, settings.WORK_CAP)
    mode = mode or label_mode_for(d)
    states: Dict[Node, Hashable] = {(): model.root(x)}
    labels = {}
    for v in iter_nodes(model.p.size, 1, height):
        state = model.child(states[v[1:]], v[0])
        states[v] = state
        labels[v] = model.label(state, mode, dyadic)
    return TreeName(p=model.p, height=height, metric=model.metric(mode), labels=labels)


def p_name(d: SystemDescriptor, x: PointSample, length: int) -> List[float]:
    """p_X(x), p_X(Tx), ...: the weight of the branch each step came from."""
    stream = x.symbol_stream
    if d.kind == SystemKind.MARKOV:
        if length > len(stream) - 1:
            raise DescriptorError(f"A Markov p-name of length {length} needs {length + 1} states, have {len(stream)}")
        entries = d.matrix.entries
        return [float(entries[stream[t + 1] - 1][stream[t] - 1]) for t in range(length)]
    if length > len(stream):
        raise DescriptorError(f"p-name length {length} exceeds the {len(stream)} sampled coordinates")
    return [d.p.weight_of(j) for j in stream[:length]]


def genericity(d: SystemDescriptor, x: PointSample, M: int, partition: str = "symbol") -> GenericityReport:
    """theta_(x,M,P): weight of each cell over the height-M preimage tree, by mass propagation.

    States sharing all of their children are merged before each step, so the
    per-level mass vectors stay small and exact where the tree is node-determined.
    """
    if not 1 <= M <= settings.GENERICITY_CAP:
        raise TooLargeError("genericity height M", M, settings.GENERICITY_CAP)
    model = state_model(d)
    s = model.p.size
    reference = model.reference(partition)
    per_cell: Dict[str, List[float]] = defaultdict(list)
    level: Dict[Hashable, float] = {model.root(x): 1.0}
    for _ in range(M):
        rows: Dict[Tuple[Hashable, ...], List[float]] = defaultdict(list)
        for state, mass in level.items():
            rows[tuple(model.child(state, j) for j in range(1, s + 1))].append(mass)
        following: Dict[Hashable, List[float]] = defaultdict(list)
        level_cells: Dict[str, List[float]] = defaultdict(list)
        for row, masses in rows.items():
            mass = math.fsum(masses)
            for j, child in enumerate(row, start=1):
                share = mass * model.p.weight_of(j)
                following[child].append(share)
                level_cells[model.cell(child, partition)].append(share)
        for cell, shares in level_cells.items():
            per_cell[cell].append(math.fsum(shares))
        level = {state: math.fsum(shares) for state, shares in following.items()}

    theta = {cell: math.fsum(values) / M for cell, values in sorted(per_cell.items())}
    cells = sorted(set(theta) | set(reference))
    deviation = 0.5 * math.fsum(abs(theta.get(c, 0.0) - reference.get(c, 0.0)) for c in cells)
    logger.info(f"genericity M={M} partition={partition}: deviation {deviation:.6f}")
    return GenericityReport(M=M, theta=theta, reference=reference, deviation=deviation)


def epsilon_hat(distances: Sequence[float]) -> Tuple[float, float]:
    """Least grid epsilon whose below-epsilon pair fraction is at least (1 - epsilon)^2."""
    total = len(distances)
    for eps in EPSILON_GRID:
        fraction = sum(1 for value in distances if value < eps) / total
        if fraction >= (1.0 - eps) ** 2:
            return eps, fraction
    return 1.0, 1.0


def estimate_tvwb_profile(
    d: SystemDescriptor,
    heights: Sequence[int],
    samples: int,
    pairs: int,
    seed: int,
    dyadic: Optional[int] = None,
) -> List[ProfileRow]:
    """Per-height epsilon-hat from t-bar on random pairs of sampled points.

    The same points and the same pairs are used at every height.
    """
    if samples < 2 or pairs < 1:
        raise DescriptorError(f"Need at least 2 samples and 1 pair, got {samples} and {pairs}")
    model = state_model(d)
    mode = label_mode_for(d)
    points = [sample_point(d, 1, derive_seed(seed, "sample", k)) for k in range(samples)]
    chosen = []
    for k in range(pairs):
        i, j = rng_for(seed, "pair", k).choice(samples, size=2, replace=False)
        chosen.append((int(i), int(j)))

    rows = []
    for n in heights:
        engine = TbarEngine(model.p, model.metric(mode), n)
        roots: Dict[int, int] = {}

        def root_id(k: int) -> int:
            if k not in roots:
                roots[k] = engine.add(preimage_tree(d, points[k], n, mode, dyadic, model))[()]
            return roots[k]

        distances = [engine.value(root_id(i), root_id(j)) for i, j in chosen]
        eps, fraction = epsilon_hat(distances)
        rows.append(ProfileRow(
            height=n,
            epsilon_hat=eps,
            mean=math.fsum(distances) / len(distances),
            fraction_below=fraction,
            distances=distances,
        ))
        logger.info(f"estimate n={n}: epsilon_hat {eps:.2f}, mean t-bar {rows[-1].mean:.6f}")
    return rows
