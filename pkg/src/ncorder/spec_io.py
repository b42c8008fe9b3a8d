"""Reading and writing the JSON documents used by the command line.

Cone spec::

    {"dims": [1, 2], "poset": {"relations": [[1, 2]]},
     "inner": [{"kind": "full"}, {"kind": "cap", "center": [0, 0, 1], "angle": 0.7}],
     "metadata": {"name": "..."}}

Element (or density matrix)::

    {"blocks": [[[0.0]], [[[1, 0], [0, 0.5]], [[0, -0.5], [2, 0]]]]}

Each entry is a real number or a ``[re, im]`` pair.  Generators files hold
``{"generators": [matrix, ...]}``.  Block and relation indices are 1-based.
"""

from __future__ import annotations

import hashlib
import json
import warnings
from pathlib import Path
from typing import Any

import numpy as np

from .algebra import BlockAlgebra, BlockElement
from .errors import InputError
from .isocone.bloch import BlochRegion
from .isocone.cones import ClassifiedIsocone, InnerCone
from .poset import Poset

ASYMMETRY_WARN = 1e-12


class SpecError(InputError):
    """A document failed to parse; ``where`` names the offending field."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


class AsymmetryWarning(UserWarning):
    pass


def read_json(path) -> Any:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise SpecError(str(path), f"cannot read file ({e.strerror})") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecError(f"{path}:{e.lineno}:{e.colno}", e.msg) from None


def canonical_json(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def spec_hash(I: ClassifiedIsocone) -> str:
    body = json.dumps(I.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(body.encode()).hexdigest()


# ---------------------------------------------------------------------------
# Cone specs
# ---------------------------------------------------------------------------


def _vector(v, where: str, size: int | None = None) -> np.ndarray:
    try:
        arr = np.asarray(v, dtype=float)
    except (TypeError, ValueError):
        raise SpecError(where, "expected a list of numbers") from None
    if arr.ndim != 1 or (size is not None and arr.size != size):
        raise SpecError(where, f"expected {size or 'a list of'} numbers")
    if not np.all(np.isfinite(arr)):
        raise SpecError(where, "non-finite entry")
    return arr


def _inner(d, where: str, n: int) -> InnerCone:
    if not isinstance(d, dict):
        raise SpecError(where, "expected an object")
    kind = d.get("kind")
    if kind == "full":
        return InnerCone.full(n)
    if kind not in ("cap", "polygon"):
        raise SpecError(f"{where}.kind", f"expected 'full', 'cap' or 'polygon', got {kind!r}")
    if n != 2:
        raise SpecError(f"{where}.kind", f"{kind!r} needs a block of size 2, block has size {n}")
    try:
        if kind == "cap":
            if "center" not in d or "angle" not in d:
                raise SpecError(where, "cap needs 'center' and 'angle'")
            c = _vector(d["center"], f"{where}.center", 3)
            if not isinstance(d["angle"], (int, float)) or isinstance(d["angle"], bool):
                raise SpecError(f"{where}.angle", "expected a number (radians)")
            return InnerCone.m2(BlochRegion.cap(c, float(d["angle"])))
        normals = d.get("normals")
        if not isinstance(normals, list):
            raise SpecError(f"{where}.normals", "expected a list of 3-vectors")
        rows = [_vector(r, f"{where}.normals[{i}]", 3) for i, r in enumerate(normals)]
        return InnerCone.m2(BlochRegion.polygon(np.array(rows).reshape(-1, 3)))
    except SpecError:
        raise
    except InputError as e:
        raise SpecError(where, str(e)) from None


def parse_cone_spec(doc) -> tuple[ClassifiedIsocone, dict]:
    """Cone spec document to ``(isocone, metadata)``."""
    if not isinstance(doc, dict):
        raise SpecError("$", "expected an object")
    dims = doc.get("dims")
    if not isinstance(dims, list) or not dims:
        raise SpecError("dims", "expected a nonempty list of block sizes")
    for i, n in enumerate(dims):
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise SpecError(f"dims[{i}]", f"expected a positive integer, got {n!r}")
    A = BlockAlgebra(tuple(dims))

    poset = doc.get("poset", {})
    if not isinstance(poset, dict):
        raise SpecError("poset", "expected an object")
    rels = poset.get("relations", [])
    if not isinstance(rels, list):
        raise SpecError("poset.relations", "expected a list of [x, y] pairs")
    pairs = []
    for i, r in enumerate(rels):
        ok = isinstance(r, list) and len(r) == 2 and all(isinstance(v, int) and not isinstance(v, bool) for v in r)
        if not ok:
            raise SpecError(f"poset.relations[{i}]", f"expected [x, y] with integer blocks, got {r!r}")
        x, y = r
        for v in (x, y):
            if not 1 <= v <= A.k:
                raise SpecError(f"poset.relations[{i}]", f"block {v} out of range 1..{A.k}")
        pairs.append((x - 1, y - 1))
    try:
        P = Poset.from_relations(A.k, pairs)
    except InputError as e:
        raise SpecError("poset.relations", str(e)) from None

    inner_doc = doc.get("inner")
    if inner_doc is None:
        inner_doc = [{"kind": "full"}] * A.k
    if not isinstance(inner_doc, list) or len(inner_doc) != A.k:
        raise SpecError("inner", f"expected a list of {A.k} inner cones")
    inner = tuple(_inner(d, f"inner[{i}]", n) for i, (d, n) in enumerate(zip(inner_doc, A.dims)))

    meta = doc.get("metadata", {})
    if not isinstance(meta, dict):
        raise SpecError("metadata", "expected an object")
    return ClassifiedIsocone(A, P, inner), meta


def load_cone_spec(path) -> tuple[ClassifiedIsocone, dict]:
    return parse_cone_spec(read_json(path))


def dump_cone_spec(I: ClassifiedIsocone, metadata: dict | None = None) -> str:
    doc = I.to_dict()
    if metadata:
        doc["metadata"] = metadata
    return canonical_json(doc)


# ---------------------------------------------------------------------------
# Matrices and elements
# ---------------------------------------------------------------------------


def _entry(v, where: str) -> complex:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if isinstance(v, list) and len(v) == 2 and all(isinstance(t, (int, float)) for t in v):
        return complex(v[0], v[1])
    raise SpecError(where, f"expected a number or [re, im], got {v!r}")


def parse_matrix(m, where: str) -> np.ndarray:
    """Square hermitian matrix from nested lists; small asymmetry is symmetrized with a warning."""
    if not isinstance(m, list) or not m or not all(isinstance(r, list) for r in m):
        raise SpecError(where, "expected a nonempty list of rows")
    n = len(m)
    out = np.empty((n, n), dtype=complex)
    for i, row in enumerate(m):
        if len(row) != n:
            raise SpecError(f"{where}[{i}]", f"row has {len(row)} entries, matrix needs {n}")
        for j, v in enumerate(row):
            out[i, j] = _entry(v, f"{where}[{i}][{j}]")
    if not np.all(np.isfinite(out)):
        raise SpecError(where, "non-finite entry")
    asym = float(np.max(np.abs(out - out.conj().T)))
    if asym > ASYMMETRY_WARN:
        warnings.warn(f"{where}: asymmetry {asym:.3g} removed by symmetrization", AsymmetryWarning, stacklevel=2)
    return (out + out.conj().T) / 2


def parse_element(doc, algebra: BlockAlgebra | None = None, where: str = "blocks") -> BlockElement:
    blocks_doc = doc.get("blocks") if isinstance(doc, dict) else doc
    if not isinstance(blocks_doc, list) or not blocks_doc:
        raise SpecError(where, "expected a nonempty list of blocks")
    blocks = [parse_matrix(b, f"{where}[{i}]") for i, b in enumerate(blocks_doc)]
    dims = tuple(b.shape[0] for b in blocks)
    if algebra is not None and dims != algebra.dims:
        raise SpecError(where, f"block sizes {list(dims)} do not match the cone's dims {list(algebra.dims)}")
    return BlockElement(algebra or BlockAlgebra(dims), blocks, _checked=True)


def load_element(path, algebra: BlockAlgebra | None = None) -> BlockElement:
    return parse_element(read_json(path), algebra)


def dump_element(a: BlockElement) -> str:
    return canonical_json({"blocks": a.to_lists()})


def load_generators(path) -> list[np.ndarray]:
    doc = read_json(path)
    gens = doc.get("generators") if isinstance(doc, dict) else None
    if not isinstance(gens, list) or not gens:
        raise SpecError("generators", "expected a nonempty list of matrices")
    mats = [parse_matrix(g, f"generators[{i}]") for i, g in enumerate(gens)]
    N = mats[0].shape[0]
    for i, g in enumerate(mats):
        if g.shape[0] != N:
            raise SpecError(f"generators[{i}]", f"size {g.shape[0]} differs from the first generator's {N}")
    return mats


def matrix_to_lists(m: np.ndarray) -> list:
    return [[[float(v.real), float(v.imag)] for v in row] for row in np.asarray(m, dtype=complex)]


def dump_generators(gens) -> str:
    return canonical_json({"generators": [matrix_to_lists(g) for g in gens]})
