"""p-tree vocabulary: weights, entropy, tree names and tree automorphisms."""
import math
from itertools import permutations, product
from typing import Dict, List, Optional

from loguru import logger

from config import settings
from models.errors import HeightMismatchError, InvalidNodeError, TooLargeError
from utils.seeding import rng_for
from models.models import (
    LabelMetric, Node, Permutation, ProbVector, TreeAutomorphism, TreeName, iter_nodes,
)


def entropy(p: ProbVector) -> float:
    """h(p) in bits."""
    return -math.fsum(c * math.log2(c) for c in p.components)


def weight(p: ProbVector, v: Node) -> float:
    """w_v, the product of the components along v; the root has weight 1."""
    for a in v:
        if not 1 <= a <= p.size:
            raise InvalidNodeError(f"Symbol {a} of node {v} is outside 1..{p.size}")
    # sorted factors so that weight-preserving relabelings give bit-identical weights
    return math.prod(sorted(p.weight_of(a) for a in v))


def parent(v: Node) -> Node:
    """sigma(v): delete the leftmost symbol."""
    if not v:
        raise InvalidNodeError("The root has no parent")
    return v[1:]


def class_permutations(p: ProbVector) -> List[Permutation]:
    """All class-preserving permutations of {1..s}, lexicographic."""
    s = p.size
    perms = []
    for perm in permutations(range(1, s + 1)):
        if all(p.same_class(j, image) for j, image in enumerate(perm, start=1)):
            perms.append(perm)
    return perms


def automorphism_count(p: ProbVector, N: int) -> int:
    """|A_N| = (prod over classes of |c|!) ** (number of nodes of length < N)."""
    per_node = math.prod(math.factorial(len(group)) for group in p.classes)
    internal = sum(p.size ** k for k in range(N))
    return per_node ** internal


def identity_automorphism(p: ProbVector, N: int) -> TreeAutomorphism:
    """The automorphism fixing every node of height N."""
    identity = tuple(range(1, p.size + 1))
    return TreeAutomorphism(p=p, height=N, child_perms={v: identity for v in iter_nodes(p.size, 0, N - 1)})


def enumerate_automorphisms(p: ProbVector, N: int, cap: Optional[int] = None) -> List[TreeAutomorphism]:
    """Every element of A_N, in lexicographic order over (node order, permutation order)."""
    cap = settings.AUTOMORPHISM_CAP if cap is None else cap
    count = automorphism_count(p, N)
    if count > cap:
        logger.error(f"Refusing to enumerate {count} automorphisms (cap {cap})")
        raise TooLargeError("automorphism count", count, cap)
    nodes = list(iter_nodes(p.size, 0, N - 1))
    perms = class_permutations(p)
    result = [
        TreeAutomorphism(p=p, height=N, child_perms=dict(zip(nodes, choice)))
        for choice in product(perms, repeat=len(nodes))
    ]
    logger.info(f"Enumerated {len(result)} automorphisms of height {N}")
    return result


def compose_automorphisms(a: TreeAutomorphism, b: TreeAutomorphism) -> TreeAutomorphism:
    """The product a*b acting on names: apply(a*b, t) == apply(a, apply(b, t)).

    As a node map, (a*b)(v) = b(a(v)).
    """
    if a.height != b.height:
        raise HeightMismatchError(f"Cannot compose heights {a.height} and {b.height}")
    perms: Dict[Node, Permutation] = {}
    for v, pa in a.child_perms.items():
        pb = b.child_perms[a.image(v)]
        perms[v] = tuple(pb[image - 1] for image in pa)
    return TreeAutomorphism(p=a.p, height=a.height, child_perms=perms)


def invert_automorphism(a: TreeAutomorphism) -> TreeAutomorphism:
    """The inverse, so compose_automorphisms(a, invert_automorphism(a)) is the identity."""
    perms: Dict[Node, Permutation] = {}
    for v, pa in a.child_perms.items():
        inverse = [0] * len(pa)
        for j, image in enumerate(pa, start=1):
            inverse[image - 1] = j
        perms[a.image(v)] = tuple(inverse)
    return TreeAutomorphism(p=a.p, height=a.height, child_perms=perms)


def restrict_automorphism(a: TreeAutomorphism, N: int) -> TreeAutomorphism:
    """Keep the child permutations of nodes shorter than N."""
    if not 1 <= N <= a.height:
        raise HeightMismatchError(f"Cannot restrict height {a.height} to {N}")
    return TreeAutomorphism(
        p=a.p, height=N, child_perms={v: perm for v, perm in a.child_perms.items() if len(v) < N}
    )


def truncate_name(t: TreeName, N: int) -> TreeName:
    """Drop the labels below height N."""
    if not 1 <= N <= t.height:
        raise HeightMismatchError(f"Cannot truncate height {t.height} to {N}")
    return TreeName(
        p=t.p, height=N, metric=t.metric, labels={v: label for v, label in t.labels.items() if len(v) <= N}
    )


def apply_automorphism(a: TreeAutomorphism, t: TreeName) -> TreeName:
    """The name whose label at v is t's label at A(v)."""
    if a.height != t.height:
        raise HeightMismatchError(f"Automorphism height {a.height} does not match name height {t.height}")
    images: Dict[Node, Node] = {(): ()}
    labels = {}
    for v in iter_nodes(t.p.size, 1, t.height):
        image = (a.child_perms[v[1:]][v[0] - 1],) + images[v[1:]]
        images[v] = image
        labels[v] = t.labels[image]
    return TreeName(p=t.p, height=t.height, metric=t.metric, labels=labels)


def random_tree_name(p: ProbVector, N: int, alphabet_size: int, seed: int) -> TreeName:
    """Labels i.i.d. uniform on {1..alphabet_size}, drawn in node order."""
    if alphabet_size < 1:
        raise InvalidNodeError(f"Alphabet size must be positive, got {alphabet_size}")
    rng = rng_for(seed, "tree-name", 0)
    nodes = list(iter_nodes(p.size, 1, N))
    draws = rng.integers(1, alphabet_size + 1, size=len(nodes))
    return TreeName(p=p, height=N, metric=LabelMetric.DISCRETE, labels={v: int(x) for v, x in zip(nodes, draws)})
