"""Input documents, canonical JSON and digests.

Every input document is a JSON object carrying ``"schema": 1``. Nodes are
written as comma-separated symbol strings ("2,1"); the root is "".
"""
import hashlib
import json
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Tuple, Union

from pydantic import BaseModel

from models.errors import InputFormatError
from models.models import (
    BlockCoupling, Node, ProbVector, StochasticMatrix, SystemDescriptor, TreeAutomorphism, TreeName,
)
from utils.exact import format_fraction

SCHEMA_VERSION = 1


def load_document(path: Union[str, Path]) -> Dict[str, Any]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InputFormatError(f"Cannot read {path}: {e}") from e
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputFormatError(f"{path} is not valid JSON: {e}") from e
    if not isinstance(document, dict):
        raise InputFormatError(f"{path} must hold a JSON object")
    if document.get("schema") != SCHEMA_VERSION:
        raise InputFormatError(f"{path} must declare \"schema\": {SCHEMA_VERSION}")
    return document


def parse_node(key: str) -> Node:
    key = key.strip()
    if not key:
        return ()
    try:
        return tuple(int(part) for part in key.split(","))
    except ValueError as e:
        raise InputFormatError(f"Bad node key {key!r}") from e


def format_node(v: Node) -> str:
    return ",".join(str(a) for a in v)


def _field(document: Dict[str, Any], name: str) -> Any:
    if name not in document:
        raise InputFormatError(f"Document is missing the {name!r} field")
    return document[name]


def tree_name_from_document(document: Dict[str, Any]) -> TreeName:
    labels = {parse_node(k): v for k, v in _field(document, "labels").items()}
    return TreeName(
        p=ProbVector.of(_field(document, "p")),
        height=_field(document, "height"),
        metric=document.get("metric", "discrete"),
        labels=labels,
    )


def tree_name_to_document(t: TreeName) -> Dict[str, Any]:
    return {
        "schema": SCHEMA_VERSION,
        "p": list(t.p.components),
        "height": t.height,
        "metric": t.metric.value,
        "labels": {format_node(v): to_jsonable(label) for v, label in t.labels.items()},
    }


def automorphism_to_document(a: TreeAutomorphism) -> Dict[str, Any]:
    return {
        "height": a.height,
        "child_perms": {format_node(v): list(perm) for v, perm in a.child_perms.items()},
    }


def matrix_from_document(document: Dict[str, Any]) -> StochasticMatrix:
    labels = document.get("labels")
    return StochasticMatrix(entries=_field(document, "matrix"), labels=tuple(labels) if labels else None)


def descriptor_from_document(document: Dict[str, Any]) -> SystemDescriptor:
    """A system descriptor; a bare matrix document is read as a markov system."""
    kind = document.get("kind", "markov" if "matrix" in document else None)
    if kind is None:
        raise InputFormatError("Document has neither a 'kind' nor a 'matrix' field")
    fields: Dict[str, Any] = {"kind": kind}
    if "matrix" in document:
        fields["matrix"] = matrix_from_document(document)
    for name in ("p", "group", "alphas"):
        if name in document:
            fields[name] = document[name]
    return SystemDescriptor(**fields)


def _parse_pair(key: str) -> Tuple[Node, Node]:
    if "|" not in key:
        raise InputFormatError(f"Coupling key {key!r} must look like 'v|u'")
    left, right = key.split("|", 1)
    return parse_node(left), parse_node(right)


def couplings_from_document(document: Dict[str, Any]) -> Tuple[ProbVector, Dict[Tuple[Node, Node], BlockCoupling]]:
    """{"p": [...], "couplings": {"|": [[...]], "1|2": [[...]]}} or a single root "coupling"."""
    p = ProbVector.of(_field(document, "p"))
    if "coupling" in document:
        return p, {((), ()): BlockCoupling(p=p, entries=document["coupling"])}
    couplings = {
        _parse_pair(key): BlockCoupling(p=p, entries=entries)
        for key, entries in _field(document, "couplings").items()
    }
    return p, couplings


def to_jsonable(value: Any) -> Any:
    """Plain JSON data from models, tuples, Fractions and node-keyed dicts."""
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, BaseModel):
        return to_jsonable(dict(value))
    if isinstance(value, Fraction):
        return format_fraction(value)
    if isinstance(value, dict):
        return {
            (format_node(k) if isinstance(k, tuple) else str(k)): to_jsonable(v)
            for k, v in value.items()
        }
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    return value


def canonical_json(value: Any) -> str:
    return json.dumps(to_jsonable(value), sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def digest(value: Any) -> str:
    return hashlib.sha256(canonical_json(value).encode("utf-8")).hexdigest()
