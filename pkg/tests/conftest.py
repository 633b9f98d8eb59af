"""Shared fixtures: the standard matrices, extension descriptors and random generators."""
import json
from fractions import Fraction
from typing import Any, Dict, List

import numpy as np
import pytest

from core.markov import is_irreducible
from models.models import BlockCoupling, ProbVector, StochasticMatrix, SystemDescriptor

COUNTEREXAMPLE = [["2/3", "1/3"], ["1/3", "2/3"]]
CIRCULANT = [["1/2", "1/4", "1/4"], ["1/4", "1/2", "1/4"], ["1/4", "1/4", "1/2"]]
EXAMPLE_P = ["3/10", "3/10", "2/5"]


def matrix(rows) -> StochasticMatrix:
    return StochasticMatrix(entries=rows)


def bernoulli_rows(p: List[str]) -> StochasticMatrix:
    return StochasticMatrix(entries=[list(p) for _ in p])


def group_extension(order, cocycle, p=EXAMPLE_P) -> SystemDescriptor:
    return SystemDescriptor(kind="finite-group-extension", p=p, group={"order": order, "cocycle": cocycle})


def random_permutation_average(rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    """Doubly stochastic matrix averaging k random permutation matrices."""
    result = np.zeros((n, n))
    for _ in range(k):
        result[np.arange(n), rng.permutation(n)] += 1.0 / k
    return result


def random_block_coupling(p: ProbVector, rng: np.random.Generator) -> BlockCoupling:
    entries = np.zeros((p.size, p.size))
    for group in p.classes:
        block = random_permutation_average(rng, len(group), int(rng.integers(1, 4))) * p.weight_of(group[0])
        for a, v in enumerate(group):
            for b, u in enumerate(group):
                entries[v - 1][u - 1] = block[a][b]
    return BlockCoupling(p=p, entries=entries.tolist())


def random_irreducible_matrix(rng: np.random.Generator, n: int) -> StochasticMatrix:
    rows = []
    for _ in range(n):
        weights = [int(x) for x in rng.integers(1, 10, size=n)]
        total = sum(weights)
        rows.append([Fraction(w, total) for w in weights])
    return StochasticMatrix(entries=rows)


def random_end_p_matrix(rng: np.random.Generator, components: List[str], n: int) -> StochasticMatrix:
    """An irreducible n-state matrix whose rows each place the entries of p in random columns."""
    values = [Fraction(c) for c in components]
    while True:
        rows = []
        for _ in range(n):
            row = [Fraction(0)] * n
            order = rng.permutation(len(values))
            for column, k in zip(rng.choice(n, size=len(values), replace=False), order):
                row[int(column)] = values[int(k)]
            rows.append(row)
        A = StochasticMatrix(entries=rows)
        if is_irreducible(A):
            return A


@pytest.fixture
def counterexample() -> StochasticMatrix:
    return matrix(COUNTEREXAMPLE)


@pytest.fixture
def circulant() -> StochasticMatrix:
    return matrix(CIRCULANT)


@pytest.fixture
def counterexample_system(counterexample) -> SystemDescriptor:
    return SystemDescriptor(kind="markov", matrix=counterexample)


@pytest.fixture
def circulant_system(circulant) -> SystemDescriptor:
    return SystemDescriptor(kind="markov", matrix=circulant)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)


@pytest.fixture
def write_doc(tmp_path):
    """Write a JSON document (schema 1 added) and return its path."""

    def write(name: str, document: Dict[str, Any], schema: bool = True) -> str:
        path = tmp_path / name
        payload = {"schema": 1, **document} if schema else document
        path.write_text(json.dumps(payload), encoding="utf-8")
        return str(path)

    return write
