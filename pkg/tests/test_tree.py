import math
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings as hsettings, strategies as st

from core.tree import (
    apply_automorphism, automorphism_count, compose_automorphisms, entropy, enumerate_automorphisms,
    identity_automorphism, invert_automorphism, random_tree_name, restrict_automorphism, weight,
)
from models.errors import InvalidNodeError, TooLargeError
from models.models import ProbVector, TreeAutomorphism, TreeName, iter_nodes

VECTORS = [
    ["1/2", "1/2"],
    ["1/3", "2/3"],
    ["1/4", "1/4", "1/2"],
    ["1/3", "1/3", "1/3"],
    ["1/2", "1/4", "1/4"],
]


def test_entropy_examples():
    assert entropy(ProbVector.of(["1/2", "1/2"])) == pytest.approx(1.0, abs=1e-15)
    assert entropy(ProbVector.of(["1/4"] * 4)) == pytest.approx(2.0, abs=1e-15)
    expected = -(1 / 3) * math.log2(1 / 3) - (2 / 3) * math.log2(2 / 3)
    assert entropy(ProbVector.of(["1/3", "2/3"])) == pytest.approx(expected, abs=1e-12)
    assert entropy(ProbVector.of(["1/3", "2/3"])) == pytest.approx(0.9183, abs=1e-4)


def test_weight_examples():
    p = ProbVector.of(["1/3", "2/3"])
    assert weight(p, ()) == 1
    assert weight(p, (2, 1)) == pytest.approx(2 / 9, abs=1e-15)
    assert weight(ProbVector.of(["1/2", "1/4", "1/4"]), (3, 3)) == 0.0625


def test_weight_rejects_out_of_range_symbol():
    with pytest.raises(InvalidNodeError):
        weight(ProbVector.of(["1/3", "2/3"]), (3,))


def test_prob_vector_classes_and_validation():
    p = ProbVector.of(["1/4", "1/2", "1/4"])
    assert p.classes == ((1, 3), (2,))
    assert p.same_class(1, 3) and not p.same_class(1, 2)
    with pytest.raises(ValueError):
        ProbVector.of(["1"])
    with pytest.raises(ValueError):
        ProbVector.of(["1/2", "1/2", "0"])
    with pytest.raises(ValueError):
        ProbVector.of(["1/2", "1/3"])


@pytest.mark.parametrize("components", VECTORS)
def test_level_weights_sum_to_one(components):
    p = ProbVector.of(components)
    for k in range(1, 5):
        total = math.fsum(weight(p, v) for v in iter_nodes(p.size, k, k))
        assert abs(total - 1.0) <= 1e-12


def test_automorphism_counts():
    assert len(enumerate_automorphisms(ProbVector.of(["1/3", "2/3"]), 3)) == 1
    assert len(enumerate_automorphisms(ProbVector.of(["1/2", "1/2"]), 1)) == 2
    uniform = enumerate_automorphisms(ProbVector.of(["1/2", "1/2"]), 2)
    assert len(uniform) == 8
    assert len({tuple(sorted(a.child_perms.items())) for a in uniform}) == 8
    assert automorphism_count(ProbVector.of(["1/4", "1/4", "1/2"]), 3) == 2 ** 13


def test_enumeration_cap():
    with pytest.raises(TooLargeError) as info:
        enumerate_automorphisms(ProbVector.of(["1/2", "1/2"]), 5, cap=1000)
    assert info.value.count == 2 ** 31


def _key(a: TreeAutomorphism):
    return tuple(sorted(a.child_perms.items()))


@pytest.mark.parametrize("components,N", [(["1/2", "1/2"], 2), (["1/4", "1/4", "1/2"], 2), (["1/3"] * 3, 1)])
def test_group_closed_under_composition_and_inverse(components, N):
    p = ProbVector.of(components)
    group = enumerate_automorphisms(p, N)
    assert len(group) <= 100
    keys = {_key(a) for a in group}
    for a, b in product(group, repeat=2):
        assert _key(compose_automorphisms(a, b)) in keys
    for a in group:
        assert _key(invert_automorphism(a)) in keys
        assert _key(compose_automorphisms(a, invert_automorphism(a))) == _key(identity_automorphism(p, N))


@pytest.mark.parametrize("components", VECTORS)
def test_automorphisms_preserve_weights_and_commute_with_parent(components):
    p = ProbVector.of(components)
    for a in enumerate_automorphisms(p, 2)[:50]:
        for v in iter_nodes(p.size, 1, 2):
            image = a.image(v)
            assert weight(p, v) == weight(p, image)
            assert a.image(v[1:]) == image[1:]


def test_apply_identity_and_swap():
    p = ProbVector.of(["1/2", "1/2"])
    t = TreeName(p=p, height=1, labels={(1,): "x", (2,): "y"})
    assert apply_automorphism(identity_automorphism(p, 1), t) == t
    swap = TreeAutomorphism(p=p, height=1, child_perms={(): (2, 1)})
    swapped = apply_automorphism(swap, t)
    assert swapped.labels[(1,)] == "y" and swapped.labels[(2,)] == "x"


def test_automorphism_rejects_cross_class_permutation():
    p = ProbVector.of(["1/3", "2/3"])
    with pytest.raises(ValueError):
        TreeAutomorphism(p=p, height=1, child_perms={(): (2, 1)})


@hsettings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000), pick_a=st.integers(0, 63), pick_b=st.integers(0, 63))
def test_apply_composition_law(seed, pick_a, pick_b):
    p = ProbVector.of(["1/4", "1/4", "1/2"])
    group = enumerate_automorphisms(p, 2)
    a, b = group[pick_a % len(group)], group[pick_b % len(group)]
    t = random_tree_name(p, 2, 4, seed)
    assert apply_automorphism(a, apply_automorphism(b, t)) == apply_automorphism(compose_automorphisms(a, b), t)
    assert apply_automorphism(a, apply_automorphism(invert_automorphism(a), t)) == t


def test_random_tree_name_determinism():
    p = ProbVector.of(["1/2", "1/2"])
    assert random_tree_name(p, 3, 2, 7) == random_tree_name(p, 3, 2, 7)
    assert random_tree_name(p, 3, 2, 7) != random_tree_name(p, 3, 2, 8)
    constant = random_tree_name(p, 3, 1, 7)
    assert set(constant.labels.values()) == {1}


def test_restrict_automorphism():
    p = ProbVector.of(["1/2", "1/2"])
    a = enumerate_automorphisms(p, 2)[5]
    restricted = restrict_automorphism(a, 1)
    assert restricted.child_perms == {(): a.child_perms[()]}


def test_tree_name_rejects_missing_labels():
    p = ProbVector.of(["1/2", "1/2"])
    with pytest.raises(ValueError):
        TreeName(p=p, height=2, labels={(1,): 1, (2,): 2})


def test_random_names_labels_uniform_support():
    p = ProbVector.of(["1/3", "1/3", "1/3"])
    t = random_tree_name(p, 4, 3, 11)
    values = np.array(list(t.labels.values()))
    assert set(values.tolist()) == {1, 2, 3}


def test_tree_name_labels_are_frozen_recursively():
    p = ProbVector.of(["1/2", "1/2"])
    name = TreeName(p=p, height=1, labels={(1,): [[1, 2], 3], (2,): "b"})
    assert name.labels[(1,)] == ((1, 2), 3)
    hash(name.labels[(1,)])
    with pytest.raises(ValueError):
        TreeName(p=p, height=1, labels={(1,): {"a": 1}, (2,): "b"})


def test_circle_points_must_be_numbers():
    p = ProbVector.of(["1/2", "1/2"])
    name = TreeName(p=p, height=1, metric="symbol-circle", labels={(1,): [1, 0], (2,): (2, 0.5)})
    assert name.labels[(1,)] == (1, 0.0) and isinstance(name.labels[(1,)][1], float)
    for point in ("0.5", True, 1.0, -0.1):
        with pytest.raises(ValueError):
            TreeName(p=p, height=1, metric="symbol-circle", labels={(1,): (1, point), (2,): (2, 0.5)})
