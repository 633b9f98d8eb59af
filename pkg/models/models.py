"""Data models for the toolkit."""
from enum import Enum
from fractions import Fraction
from itertools import product
from typing import Any, Dict, Iterator, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from config import settings
from models.errors import (
    DecompositionError, DescriptorError, InvalidMatrixError, InvalidNodeError, InvalidProbVectorError,
)
from utils.exact import format_fraction, parse_fraction

# A node of the p-tree: a finite sequence of symbols in {1..s}. The root is ().
# The parent of v is v with its leftmost symbol deleted, so the children of v
# are (j,) + v.
Node = Tuple[int, ...]
Permutation = Tuple[int, ...]


def iter_nodes(s: int, min_length: int, max_length: int) -> Iterator[Node]:
    """Nodes in length-then-lexicographic order."""
    for length in range(min_length, max_length + 1):
        for node in product(range(1, s + 1), repeat=length):
            yield node


def node_count(s: int, min_length: int, max_length: int) -> int:
    return sum(s ** length for length in range(min_length, max_length + 1))


def _freeze_label(value: Any) -> Any:
    """JSON arrays become tuples, recursively, so labels can be hashed."""
    if isinstance(value, list):
        return tuple(_freeze_label(x) for x in value)
    return value


def _circle_label(node: Node, label: Any) -> Tuple[Any, float]:
    if not (isinstance(label, tuple) and len(label) == 2):
        raise InvalidNodeError(f"Label {label!r} at {node} is not a (symbol, circle point) pair")
    point = label[1]
    if isinstance(point, bool) or not isinstance(point, (int, float)) or not 0.0 <= point < 1.0:
        raise InvalidNodeError(f"Circle point {point!r} at {node} is not a number in [0, 1)")
    return label[0], float(point)


class LabelMetric(str, Enum):
    DISCRETE = "discrete"
    SYMBOL_CIRCLE = "symbol-circle"


class SystemKind(str, Enum):
    BERNOULLI = "bernoulli"
    MARKOV = "markov"
    FINITE_GROUP_EXTENSION = "finite-group-extension"
    CIRCLE_EXTENSION = "circle-extension"


class LabelMode(str, Enum):
    SYMBOL = "symbol"
    SYMBOL_AND_FIBER = "symbol-and-fiber"


class ProbVector(BaseModel):
    """Probability vector p with its weight-class structure.

    Classes are tuples of 1-based symbols with equal components, ordered by
    their smallest member.
    """

    model_config = ConfigDict(frozen=True)

    components: Tuple[float, ...]
    classes: Tuple[Tuple[int, ...], ...] = ()

    @classmethod
    def of(cls, values: List[Any]) -> "ProbVector":
        """Build from fractions, fraction strings or decimals (converted once)."""
        return cls(components=tuple(float(parse_fraction(v)) for v in values))

    @model_validator(mode="after")
    def _check(self) -> "ProbVector":
        comps = self.components
        if len(comps) < 2:
            raise InvalidProbVectorError(f"A probability vector needs at least 2 components, got {len(comps)}")
        if any(c <= 0 for c in comps):
            raise InvalidProbVectorError(f"Components must be strictly positive: {comps}")
        if abs(sum(comps) - 1.0) > settings.CLASS_TOLERANCE:
            raise InvalidProbVectorError(f"Components sum to {sum(comps)!r}, not 1")
        classes: List[List[int]] = []
        for symbol, value in enumerate(comps, start=1):
            for group in classes:
                if abs(comps[group[0] - 1] - value) <= settings.CLASS_TOLERANCE:
                    group.append(symbol)
                    break
            else:
                classes.append([symbol])
        computed = tuple(tuple(group) for group in classes)
        if self.classes and self.classes != computed:
            raise InvalidProbVectorError(f"Declared classes {self.classes} do not match components")
        object.__setattr__(self, "classes", computed)
        return self

    @property
    def size(self) -> int:
        return len(self.components)

    def weight_of(self, symbol: int) -> float:
        return self.components[symbol - 1]

    def class_index(self, symbol: int) -> int:
        for index, group in enumerate(self.classes):
            if symbol in group:
                return index
        raise InvalidNodeError(f"Symbol {symbol} is outside 1..{self.size}")

    def same_class(self, a: int, b: int) -> bool:
        return self.class_index(a) == self.class_index(b)


class TreeName(BaseModel):
    """Labels on every nonempty node of length <= height.

    Discrete labels are any hashable JSON value; symbol-circle labels are
    (symbol, point) pairs with the point in [0, 1).
    """

    model_config = ConfigDict(frozen=True)

    p: ProbVector
    height: int = Field(ge=1)
    metric: LabelMetric = LabelMetric.DISCRETE
    labels: Dict[Node, Any]

    @field_validator("labels", mode="before")
    @classmethod
    def _freeze_labels(cls, value: Any) -> Any:
        if isinstance(value, dict):
            return {tuple(k): _freeze_label(v) for k, v in value.items()}
        return value

    @model_validator(mode="after")
    def _check(self) -> "TreeName":
        s = self.p.size
        expected = node_count(s, 1, self.height)
        if len(self.labels) != expected:
            raise InvalidNodeError(f"Tree name of height {self.height} needs {expected} labels, got {len(self.labels)}")
        for node, label in self.labels.items():
            if not 0 < len(node) <= self.height or any(not 1 <= a <= s for a in node):
                raise InvalidNodeError(f"Node {node} is not a node of height <= {self.height} for s={s}")
            try:
                hash(label)
            except TypeError as e:
                raise InvalidNodeError(f"Label {label!r} at {node} is not hashable") from e
        if self.metric == LabelMetric.SYMBOL_CIRCLE:
            object.__setattr__(self, "labels", {v: _circle_label(v, label) for v, label in self.labels.items()})
        return self


class TreeAutomorphism(BaseModel):
    """Per-node child permutations; child_perms[v][j-1] is the image of symbol j."""

    model_config = ConfigDict(frozen=True)

    p: ProbVector
    height: int = Field(ge=1)
    child_perms: Dict[Node, Permutation]

    @model_validator(mode="after")
    def _check(self) -> "TreeAutomorphism":
        s = self.p.size
        expected = node_count(s, 0, self.height - 1)
        if len(self.child_perms) != expected:
            raise InvalidNodeError(f"Automorphism of height {self.height} needs {expected} permutations")
        for node, perm in self.child_perms.items():
            if len(node) >= self.height or sorted(perm) != list(range(1, s + 1)):
                raise InvalidNodeError(f"Invalid permutation {perm} at node {node}")
            for j, image in enumerate(perm, start=1):
                if not self.p.same_class(j, image):
                    raise InvalidNodeError(f"Permutation {perm} at node {node} moves {j} across weight classes")
        return self

    def image(self, node: Node) -> Node:
        """A(v), built from the root: A(jv) = pi_v(j) A(v)."""
        result: Node = ()
        for i in range(len(node) - 1, -1, -1):
            result = (self.child_perms[node[i + 1:]][node[i] - 1],) + result
        return result


class TbarResult(BaseModel):
    value: float
    witness: TreeAutomorphism
    height: int


class StochasticMatrix(BaseModel):
    """Square stochastic matrix with exact entries."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    entries: Tuple[Tuple[Fraction, ...], ...]
    labels: Optional[Tuple[str, ...]] = None

    @field_validator("entries", mode="before")
    @classmethod
    def _parse(cls, value: Any) -> Any:
        return tuple(tuple(parse_fraction(x) for x in row) for row in value)

    @model_validator(mode="after")
    def _check(self) -> "StochasticMatrix":
        n = len(self.entries)
        if n == 0 or any(len(row) != n for row in self.entries):
            raise ValueError("Matrix must be square and nonempty")
        for i, row in enumerate(self.entries, start=1):
            if any(x < 0 for x in row):
                raise InvalidMatrixError(f"Row {i} has a negative entry")
            if abs(float(sum(row)) - 1.0) > settings.CLASS_TOLERANCE:
                raise InvalidMatrixError(f"Row {i} sums to {format_fraction(sum(row))}, not 1")
        if self.labels is not None and len(self.labels) != n:
            raise ValueError(f"Expected {n} state labels, got {len(self.labels)}")
        return self

    @property
    def size(self) -> int:
        return len(self.entries)

    def state_labels(self) -> List[str]:
        return list(self.labels) if self.labels else [str(i) for i in range(1, self.size + 1)]

    def as_float(self) -> List[List[float]]:
        return [[float(x) for x in row] for row in self.entries]


class EndPCheck(BaseModel):
    accepted: bool
    p: Optional[ProbVector] = None
    exact: List[str] = Field(default_factory=list)
    offending_row: Optional[int] = None
    reason: Optional[str] = None


class PreimageGraph(BaseModel):
    """Finite-state preimage graph; targets[u][j-1] is the state reached from u via branch symbol j."""

    model_config = ConfigDict(frozen=True)

    p: ProbVector
    states: Tuple[str, ...]
    targets: Tuple[Tuple[int, ...], ...]

    @model_validator(mode="after")
    def _check(self) -> "PreimageGraph":
        n, s = len(self.states), self.p.size
        if len(self.targets) != n:
            raise ValueError(f"Expected out-edges for {n} states, got {len(self.targets)}")
        for u, row in enumerate(self.targets):
            if len(row) != s:
                raise ValueError(f"State {self.states[u]} has {len(row)} out-edges, expected {s}")
            if any(not 0 <= t < n for t in row):
                raise ValueError(f"State {self.states[u]} has an edge to an unknown state")
        return self

    @property
    def size(self) -> int:
        return len(self.states)


class SyncPath(BaseModel):
    start: str
    symbols: List[int]
    states: List[str]


class TvwbVerdict(BaseModel):
    decision: bool
    weights: List[float] = Field(default_factory=list)
    paths: List[SyncPath] = Field(default_factory=list)
    certificate: List[List[str]] = Field(default_factory=list)
    depth: int
    explored: int
    bound: int
    subset_bound: int


class BirkhoffTerm(BaseModel):
    coefficient: float
    permutation: Permutation


class BirkhoffDecomposition(BaseModel):
    n: int
    alpha: float
    terms: List[BirkhoffTerm]

    def reconstruct(self) -> List[List[float]]:
        matrix = [[0.0] * self.n for _ in range(self.n)]
        for term in self.terms:
            for row, col in enumerate(term.permutation):
                matrix[row][col - 1] += term.coefficient * self.alpha
        return matrix


class BlockCoupling(BaseModel):
    """Coupling of one node pair's children, blocked by weight class."""

    model_config = ConfigDict(frozen=True)

    p: ProbVector
    entries: Tuple[Tuple[float, ...], ...]

    @field_validator("entries", mode="before")
    @classmethod
    def _parse(cls, value: Any) -> Any:
        return tuple(tuple(float(parse_fraction(x)) for x in row) for row in value)

    @model_validator(mode="after")
    def _check(self) -> "BlockCoupling":
        s = self.p.size
        if len(self.entries) != s or any(len(row) != s for row in self.entries):
            raise ValueError(f"Coupling must be {s}x{s}")
        tol = settings.CLASS_TOLERANCE
        for v in range(1, s + 1):
            for u in range(1, s + 1):
                value = self.entries[v - 1][u - 1]
                if value < -tol:
                    raise DecompositionError(f"Negative coupling entry at ({v},{u})")
                if not self.p.same_class(v, u) and abs(value) > tol:
                    raise DecompositionError(f"Entry ({v},{u}) couples symbols of different weight")
        for group in self.p.classes:
            weight = self.p.weight_of(group[0])
            for v in group:
                row = sum(self.entries[v - 1][u - 1] for u in group)
                col = sum(self.entries[u - 1][v - 1] for u in group)
                if abs(row - weight) > tol or abs(col - weight) > tol:
                    raise DecompositionError(f"Row/column {v} of the class block does not sum to {weight}")
        return self


class PermutationAtom(BaseModel):
    permutation: Permutation
    probability: float


class AutomorphismAtom(BaseModel):
    automorphism: TreeAutomorphism
    probability: float


class AutomorphismMeasure(BaseModel):
    support: List[AutomorphismAtom]


class GroupSpec(BaseModel):
    """Finite abelian group Z/n1 x ... x Z/nk and a memory-1 cocycle."""

    order: List[int]
    cocycle: List[List[int]]

    @field_validator("order", mode="before")
    @classmethod
    def _orders(cls, value: Any) -> Any:
        return [value] if isinstance(value, int) else value

    @field_validator("cocycle", mode="before")
    @classmethod
    def _elements(cls, value: Any) -> Any:
        return [[g] if isinstance(g, int) else g for g in value]

    @model_validator(mode="after")
    def _check(self) -> "GroupSpec":
        if not self.order or any(n < 1 for n in self.order):
            raise DescriptorError(f"Invalid group orders {self.order}")
        for g in self.cocycle:
            if len(g) != len(self.order):
                raise DescriptorError(f"Cocycle value {g} does not belong to Z/{self.order}")
        return self


class SystemDescriptor(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: SystemKind
    p: Optional[ProbVector] = None
    matrix: Optional[StochasticMatrix] = None
    group: Optional[GroupSpec] = None
    alphas: Optional[Tuple[float, ...]] = None

    @field_validator("p", mode="before")
    @classmethod
    def _parse_p(cls, value: Any) -> Any:
        if isinstance(value, (list, tuple)):
            return {"components": tuple(float(parse_fraction(v)) for v in value)}
        return value

    @field_validator("alphas", mode="before")
    @classmethod
    def _parse_alphas(cls, value: Any) -> Any:
        if value is None:
            return value
        return tuple(float(parse_fraction(a)) % 1.0 for a in value)

    @model_validator(mode="after")
    def _check(self) -> "SystemDescriptor":
        if self.kind == SystemKind.MARKOV:
            if self.matrix is None:
                raise ValueError("A markov descriptor needs a matrix")
            return self
        if self.p is None:
            raise ValueError(f"A {self.kind.value} descriptor needs p")
        if self.kind == SystemKind.FINITE_GROUP_EXTENSION:
            if self.group is None or len(self.group.cocycle) != self.p.size:
                raise DescriptorError("A finite-group-extension needs one cocycle value per symbol")
        if self.kind == SystemKind.CIRCLE_EXTENSION:
            if self.alphas is None or len(self.alphas) != self.p.size:
                raise DescriptorError("A circle-extension needs one rotation per symbol")
        return self


class PointSample(BaseModel):
    """Finitely many coordinates of a sampled point.

    For markov systems symbol_stream holds states, current state first.
    """

    symbol_stream: List[int]
    aux: Optional[Any] = None
    seed_trace: List[int] = Field(default_factory=list)


class GenericityReport(BaseModel):
    M: int
    theta: Dict[str, float]
    reference: Dict[str, float]
    deviation: float


class ProfileRow(BaseModel):
    height: int
    epsilon_hat: float
    mean: float
    fraction_below: float
    distances: List[float] = Field(default_factory=list)


class ProcessTbarSummary(BaseModel):
    height: int
    pairs: int
    mean: Optional[float] = None
    quantiles: Dict[str, float] = Field(default_factory=dict)


class RunReport(BaseModel):
    command: str
    inputs_digest: str
    results: Dict[str, Any]
    versions: Dict[str, str]
    seed: Optional[int] = None
