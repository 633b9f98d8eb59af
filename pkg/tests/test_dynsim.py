import math
from collections import Counter

import numpy as np
import pytest

from core.dynsim import (
    discretize, dyadic_cell, epsilon_hat, estimate_tvwb_profile, genericity, p_name, preimage_graph_for,
    preimage_tree, sample_point,
)
from core.tbar import tbar_exact
from models.errors import DescriptorError, MetricMismatchError, TooLargeError
from models.models import LabelMode, PointSample, SystemDescriptor
from utils.seeding import derive_seed

from conftest import EXAMPLE_P, group_extension, random_end_p_matrix

GOLDEN = (math.sqrt(5) - 1) / 2


def _circle(alphas, p=("1/2", "1/2")) -> SystemDescriptor:
    return SystemDescriptor(kind="circle-extension", p=list(p), alphas=list(alphas))


def test_discretize_and_cells():
    assert discretize(0.3, 1) == 0.25
    assert discretize(0.3, 2) == 0.375
    assert discretize(0.999, 3) == 15 / 16
    assert dyadic_cell(0.0, 4) == 0
    with pytest.raises(DescriptorError):
        dyadic_cell(1.0, 2)
    with pytest.raises(DescriptorError):
        discretize(0.5, 0)


def test_sampling_is_deterministic(counterexample_system):
    bernoulli = SystemDescriptor(kind="bernoulli", p=["1/4", "3/4"])
    assert sample_point(bernoulli, 20, 5) == sample_point(bernoulli, 20, 5)
    assert sample_point(counterexample_system, 20, 5) == sample_point(counterexample_system, 20, 5)
    assert sample_point(bernoulli, 20, 5) != sample_point(bernoulli, 20, 6)
    assert sample_point(bernoulli, 20, 5).seed_trace == [5]


def test_sample_frequencies(counterexample_system):
    bernoulli = sample_point(SystemDescriptor(kind="bernoulli", p=["1/2", "1/2"]), 10_000, 1)
    assert Counter(bernoulli.symbol_stream)[1] / 10_000 == pytest.approx(0.5, abs=0.02)
    chain = sample_point(counterexample_system, 10_000, 1)
    assert set(chain.symbol_stream) == {1, 2}
    assert Counter(chain.symbol_stream)[1] / 10_000 == pytest.approx(0.5, abs=0.02)



def test_sample_aux_values():
    extension = sample_point(group_extension(3, [0, 1, 0]), 5, 2)
    assert len(extension.aux) == 1 and 0 <= extension.aux[0] < 3
    circle = sample_point(_circle(["0", "1/4"]), 5, 2)
    assert 0.0 <= circle.aux < 1.0


def test_bernoulli_tree_labels_are_branch_symbols():
    d = SystemDescriptor(kind="bernoulli", p=EXAMPLE_P)
    tree = preimage_tree(d, sample_point(d, 1, 0), 4)
    assert all(label == v[0] for v, label in tree.labels.items())


def test_markov_tree_follows_parity(counterexample_system):
    tree = preimage_tree(counterexample_system, PointSample(symbol_stream=[1]), 5)
    for v, label in tree.labels.items():
        # the weight-1/3 branch switches state and the weight-2/3 branch keeps it
        assert label == ("1" if v.count(1) % 2 == 0 else "2")


@pytest.mark.parametrize("seed", range(5))
def test_markov_tree_edges_retrace_transitions(seed):
    A = random_end_p_matrix(np.random.default_rng(300 + seed), ["1/4", "1/4", "1/2"], 4)
    d = SystemDescriptor(kind="markov", matrix=A)
    p = sorted(x for x in A.entries[0] if x != 0)
    index = {label: i for i, label in enumerate(A.state_labels())}
    for start in range(A.size):
        tree = preimage_tree(d, PointSample(symbol_stream=[start + 1]), 4)
        for v, label in tree.labels.items():
            state = index[label]
            for k in range(1, len(v) + 1):
                forward = index[tree.labels[v[k:]]] if k < len(v) else start
                assert A.entries[forward][state] == p[v[k - 1] - 1]
                state = forward
            assert state == start


def test_circle_tree_labels_telescope():
    d = _circle(["0", "1/4"])
    tree = preimage_tree(d, PointSample(symbol_stream=[1], aux=0.125), 4)
    for v, (symbol, fiber) in tree.labels.items():
        assert symbol == v[0]
        assert fiber == pytest.approx((0.125 - 0.25 * v.count(2)) % 1.0, abs=1e-15)
    discretized = preimage_tree(d, PointSample(symbol_stream=[1], aux=0.125), 2, dyadic=1)
    assert {fiber for _, fiber in discretized.labels.values()} <= {0.25, 0.75}


def test_extension_symbol_mode_projects_to_bernoulli():
    d = group_extension(3, [0, 1, 0])
    x = PointSample(symbol_stream=[2], aux=[1])
    projected = preimage_tree(d, x, 3, mode=LabelMode.SYMBOL)
    bernoulli = SystemDescriptor(kind="bernoulli", p=EXAMPLE_P)
    assert projected == preimage_tree(bernoulli, x, 3)
    full = preimage_tree(d, x, 1)
    # (2,1) via 2 goes to (2, 1 - 1)
    assert full.labels[(2,)] == "(2,0)"


def test_label_mode_errors():
    bernoulli = SystemDescriptor(kind="bernoulli", p=["1/2", "1/2"])
    with pytest.raises(MetricMismatchError):
        preimage_tree(bernoulli, PointSample(symbol_stream=[1]), 2, mode=LabelMode.SYMBOL_AND_FIBER)
    with pytest.raises(MetricMismatchError):
        preimage_tree(_circle(["0", "1/4"]), PointSample(symbol_stream=[1], aux=0.5), 2, mode=LabelMode.SYMBOL)


def test_tree_caps():
    d = SystemDescriptor(kind="bernoulli", p=EXAMPLE_P)
    x = PointSample(symbol_stream=[1])
    with pytest.raises(TooLargeError):
        preimage_tree(d, x, 17)
    with pytest.raises(TooLargeError):
        preimage_tree(d, x, 13)


def test_circle_has_no_preimage_graph():
    with pytest.raises(DescriptorError):
        preimage_graph_for(_circle(["0", "1/4"]))


def test_p_names(counterexample_system):
    bernoulli = SystemDescriptor(kind="bernoulli", p=EXAMPLE_P)
    assert p_name(bernoulli, PointSample(symbol_stream=[3, 1, 2]), 3) == [0.4, 0.3, 0.3]
    chain = PointSample(symbol_stream=[1, 2, 2])
    assert p_name(counterexample_system, chain, 2) == pytest.approx([1 / 3, 2 / 3], abs=1e-15)
    with pytest.raises(DescriptorError):
        p_name(counterexample_system, chain, 3)
    with pytest.raises(DescriptorError):
        p_name(bernoulli, PointSample(symbol_stream=[1]), 2)


@pytest.mark.parametrize("M", [1, 7, 50])
def test_bernoulli_genericity_is_exact(M):
    d = SystemDescriptor(kind="bernoulli", p=EXAMPLE_P)
    report = genericity(d, sample_point(d, 1, 3), M)
    assert report.theta == pytest.approx({"1": 0.3, "2": 0.3, "3": 0.4}, abs=1e-15)
    assert report.deviation <= 1e-15


def test_markov_genericity_converges(counterexample_system):
    report = genericity(counterexample_system, PointSample(symbol_stream=[1]), 2000)
    assert report.reference == pytest.approx({"1": 0.5, "2": 0.5}, abs=1e-12)
    assert report.deviation <= 0.05


def test_extension_genericity_partitions():
    d = group_extension(3, [0, 1, 0])
    x = PointSample(symbol_stream=[1], aux=[0])
    fibers = genericity(d, x, 500, partition="fiber")
    assert set(fibers.reference) == {"[0]", "[1]", "[2]"}
    assert fibers.deviation <= 0.05
    states = genericity(d, x, 500, partition="state")
    assert math.fsum(states.theta.values()) == pytest.approx(1.0, abs=1e-12)


def test_circle_genericity_dyadic_cells():
    report = genericity(_circle(["0", str(GOLDEN)]), PointSample(symbol_stream=[1], aux=0.3), 100, partition="dyadic:2")
    assert set(report.theta) <= {"0", "1", "2", "3"}
    assert math.fsum(report.theta.values()) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(DescriptorError):
        genericity(_circle(["0", "1/4"]), PointSample(symbol_stream=[1], aux=0.3), 10, partition="state")


def test_genericity_caps(counterexample_system):
    with pytest.raises(TooLargeError):
        genericity(counterexample_system, PointSample(symbol_stream=[1]), 0)
    with pytest.raises(DescriptorError):
        genericity(counterexample_system, PointSample(symbol_stream=[1]), 5, partition="fiber")


def test_epsilon_hat_grid():
    assert epsilon_hat([0.0] * 10) == (0.01, 1.0)
    assert epsilon_hat([1.0] * 10) == (1.0, 0.0)
    # half the pairs at distance zero: (1 - eps)^2 <= 1/2 first holds at 0.30
    assert epsilon_hat([0.0] * 5 + [1.0] * 5) == (0.3, 0.5)


def test_estimate_counterexample_stays_away_from_zero(counterexample_system):
    rows = estimate_tvwb_profile(counterexample_system, [1, 4], samples=32, pairs=100, seed=11)
    assert [row.height for row in rows] == [1, 4]
    for row in rows:
        assert row.epsilon_hat >= 0.2
        assert all(min(d, abs(d - 1.0)) <= 1e-12 for d in row.distances)
    assert rows[0].distances == pytest.approx(rows[1].distances, abs=1e-12)


def test_estimate_is_deterministic(circulant_system):
    first = estimate_tvwb_profile(circulant_system, [2, 3], samples=16, pairs=30, seed=4)
    second = estimate_tvwb_profile(circulant_system, [2, 3], samples=16, pairs=30, seed=4)
    assert first == second


def test_estimate_golden_rotation_improves_with_height():
    d = _circle(["0", str(GOLDEN)])
    low, high = estimate_tvwb_profile(d, [2, 12], samples=64, pairs=200, seed=2024)
    assert high.epsilon_hat <= low.epsilon_hat
    assert high.mean < low.mean


@pytest.mark.parametrize("base,symbols", [(0.2, (1, 1)), (0.55, (1, 2)), (0.9, (2, 1))])
def test_rational_rotation_keeps_offset_points_apart(base, symbols):
    d = _circle(["0", "1/4"])
    x = PointSample(symbol_stream=[symbols[0]], aux=base)
    y = PointSample(symbol_stream=[symbols[1]], aux=(base + 0.125) % 1.0)
    for n in range(1, 13):
        # every fiber difference is 1/8 plus a multiple of 1/4
        assert tbar_exact(preimage_tree(d, x, n), preimage_tree(d, y, n)).value >= 1 / 16 - 1e-12



def test_estimate_rejects_degenerate_sampling(counterexample_system):
    with pytest.raises(DescriptorError):
        estimate_tvwb_profile(counterexample_system, [1], samples=1, pairs=5, seed=0)
    with pytest.raises(DescriptorError):
        estimate_tvwb_profile(counterexample_system, [1], samples=4, pairs=0, seed=0)


def test_negative_seeds_wrap_into_the_unsigned_range():
    assert derive_seed(-1, "sample", 0) == derive_seed(2 ** 64 - 1, "sample", 0)
    bernoulli = SystemDescriptor(kind="bernoulli", p=["1/2", "1/2"])
    assert sample_point(bernoulli, 10, -3) == sample_point(bernoulli, 10, -3)
