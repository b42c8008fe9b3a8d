"""Finite posets stored as boolean relation matrices.

Elements are ``0..k-1``.  Constructors take the transitive closure, then
check reflexivity and antisymmetry, so every :class:`Poset` in circulation
is valid.  Sum constructors label their elements with ``(block, inner)``
pairs in block order.
"""

from __future__ import annotations

from collections import deque
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError, ResourceError

__all__ = [
    "Poset",
    "UpSetFamily",
    "cardinal_sum",
    "ordinal_sum",
    "lexicographic_sum",
    "hasse",
    "is_hasse_connected",
    "up_sets",
    "all_posets",
    "random_poset",
]

UP_SET_LIMIT = 20


def _closure(rel: np.ndarray) -> np.ndarray:
    r = rel.copy()
    k = r.shape[0]
    for m in range(k):
        r |= np.outer(r[:, m], r[m, :])
    return r


class Poset:
    """A finite partial order.

    Parameters
    ----------
    leq : (k, k) bool array
        ``leq[x, y]`` means ``x ⪯ y``.  The transitive and reflexive closure
        is taken; the result must be antisymmetric.
    labels : optional sequence of hashable labels, one per element.
    """

    __slots__ = ("_leq", "labels")

    def __init__(self, leq, labels: Sequence | None = None):
        rel = np.array(leq, dtype=bool)
        if rel.ndim != 2 or rel.shape[0] != rel.shape[1]:
            raise InputError("relation must be a square boolean matrix")
        k = rel.shape[0]
        rel |= np.eye(k, dtype=bool)
        rel = _closure(rel)
        both = rel & rel.T & ~np.eye(k, dtype=bool)
        if both.any():
            x, y = map(int, np.argwhere(both)[0])
            raise InputError(f"relation is not antisymmetric: {x} ⪯ {y} ⪯ {x}")
        rel.setflags(write=False)
        self._leq = rel
        if labels is not None and len(labels) != k:
            raise InputError("one label per element required")
        self.labels = tuple(labels) if labels is not None else tuple(range(k))

    # construction -----------------------------------------------------
    @classmethod
    def from_relations(cls, size: int, relations: Iterable[tuple[int, int]], labels=None) -> "Poset":
        rel = np.zeros((size, size), dtype=bool)
        for x, y in relations:
            if not (0 <= x < size and 0 <= y < size):
                raise InputError(f"relation ({x}, {y}) out of range for size {size}")
            rel[x, y] = True
        return cls(rel, labels)

    @classmethod
    def chain(cls, k: int) -> "Poset":
        return cls(np.triu(np.ones((k, k), dtype=bool)))

    @classmethod
    def antichain(cls, k: int) -> "Poset":
        return cls(np.eye(k, dtype=bool))

    # queries ----------------------------------------------------------
    @property
    def size(self) -> int:
        return self._leq.shape[0]

    def __len__(self) -> int:
        return self.size

    @property
    def leq(self) -> np.ndarray:
        return self._leq

    def le(self, x: int, y: int) -> bool:
        return bool(self._leq[x, y])

    def lt(self, x: int, y: int) -> bool:
        return x != y and bool(self._leq[x, y])

    def comparable(self, x: int, y: int) -> bool:
        return bool(self._leq[x, y] or self._leq[y, x])

    def strict_pairs(self) -> list[tuple[int, int]]:
        return [(int(x), int(y)) for x, y in np.argwhere(self._leq) if x != y]

    def upper(self, x: int) -> np.ndarray:
        """Elements strictly above ``x``."""
        m = self._leq[x].copy()
        m[x] = False
        return np.flatnonzero(m)

    def lower(self, x: int) -> np.ndarray:
        m = self._leq[:, x].copy()
        m[x] = False
        return np.flatnonzero(m)

    def linear_extension(self) -> list[int]:
        """Elements sorted so that ``x ≺ y`` implies ``x`` comes first."""
        below = self._leq.sum(axis=0)
        return [int(i) for i in np.lexsort((np.arange(self.size), below))]

    def is_up_set(self, subset: Iterable[int]) -> bool:
        s = np.zeros(self.size, dtype=bool)
        s[list(subset)] = True
        return not np.any(self._leq[s] & ~s)

    def restrict(self, elements: Sequence[int]) -> "Poset":
        idx = list(elements)
        return Poset(self._leq[np.ix_(idx, idx)], [self.labels[i] for i in idx])

    def is_suborder_of(self, other: "Poset") -> bool:
        """True iff every relation of ``self`` also holds in ``other`` (``self`` is coarser or equal)."""
        return not np.any(self._leq & ~other.leq)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poset):
            return NotImplemented
        return self._leq.shape == other._leq.shape and bool(np.all(self._leq == other._leq))

    def __hash__(self) -> int:
        return hash((self.size, self._leq.tobytes()))

    def __repr__(self) -> str:
        return f"Poset(size={self.size}, covers={hasse(self)})"

    def to_dot(self, name: str = "poset", node_labels: Sequence[str] | None = None) -> str:
        labels = node_labels or [str(lab) for lab in self.labels]
        lines = [f"digraph {name} {{", "  rankdir=BT;"]
        for i, lab in enumerate(labels):
            lines.append(f'  n{i} [label="{lab}"];')
        for x, y in hasse(self):
            lines.append(f"  n{x} -> n{y};")
        lines.append("}")
        return "\n".join(lines) + "\n"


class UpSetFamily:
    """All up-sets of a poset, each as a sorted tuple of elements."""

    def __init__(self, poset: Poset, sets: Sequence[tuple[int, ...]]):
        self.poset = poset
        self.sets = list(sets)

    def __len__(self) -> int:
        return len(self.sets)

    def __iter__(self):
        return iter(self.sets)

    def __contains__(self, item) -> bool:
        return tuple(sorted(item)) in set(self.sets)

    def indicators(self) -> np.ndarray:
        out = np.zeros((len(self.sets), self.poset.size))
        for i, s in enumerate(self.sets):
            out[i, list(s)] = 1.0
        return out


# ---------------------------------------------------------------------------
# Sums
# ---------------------------------------------------------------------------


def _block_sum(parts: Sequence[Poset], base: Poset) -> Poset:
    sizes = [p.size for p in parts]
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    total = int(offsets[-1])
    rel = np.zeros((total, total), dtype=bool)
    labels = []
    for x, p in enumerate(parts):
        sl = slice(offsets[x], offsets[x + 1])
        rel[sl, sl] = p.leq
        labels.extend((x, i) for i in range(p.size))
    for x, y in base.strict_pairs():
        rel[offsets[x]:offsets[x + 1], offsets[y]:offsets[y + 1]] = True
    return Poset(rel, labels)


def cardinal_sum(M: Poset, N: Poset) -> Poset:
    """Disjoint union with no relations across (``M + N``)."""
    return _block_sum([M, N], Poset.antichain(2))


def ordinal_sum(M: Poset, N: Poset) -> Poset:
    """Disjoint union with all of ``M`` strictly below all of ``N``."""
    return _block_sum([M, N], Poset.chain(2))


def lexicographic_sum(P: Poset, family: Sequence[Poset]) -> Poset:
    """Replace each point ``x`` of ``P`` by ``family[x]``."""
    if len(family) != P.size:
        raise InputError(f"need {P.size} posets, got {len(family)}")
    return _block_sum(list(family), P)


# ---------------------------------------------------------------------------
# Hasse diagram and up-sets
# ---------------------------------------------------------------------------


def hasse(P: Poset) -> list[tuple[int, int]]:
    """Covering pairs ``(x, y)``: ``x ≺ y`` with nothing strictly between."""
    lt = P.leq & ~np.eye(P.size, dtype=bool)
    two_step = (lt.astype(int) @ lt.astype(int)) > 0
    cov = lt & ~two_step
    return [(int(x), int(y)) for x, y in np.argwhere(cov)]


def is_hasse_connected(P: Poset) -> bool:
    if P.size <= 1:
        return True
    adj = [[] for _ in range(P.size)]
    for x, y in hasse(P):
        adj[x].append(y)
        adj[y].append(x)
    seen = {0}
    todo = deque([0])
    while todo:
        u = todo.popleft()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                todo.append(v)
    return len(seen) == P.size


def up_sets(P: Poset, limit: int = UP_SET_LIMIT) -> UpSetFamily:
    """Every up-set, including the empty set and the whole set."""
    if P.size > limit:
        raise ResourceError(f"up-set enumeration limited to {limit} elements, got {P.size}")
    order = P.linear_extension()[::-1]  # top elements first
    upper = [set(P.upper(x).tolist()) for x in range(P.size)]
    out: list[tuple[int, ...]] = []

    def rec(i: int, chosen: set, excluded: set):
        if i == len(order):
            out.append(tuple(sorted(chosen)))
            return
        x = order[i]
        if not (upper[x] & excluded):
            chosen.add(x)
            rec(i + 1, chosen, excluded)
            chosen.discard(x)
        excluded.add(x)
        rec(i + 1, chosen, excluded)
        excluded.discard(x)

    rec(0, set(), set())
    out.sort(key=lambda s: (len(s), s))
    return UpSetFamily(P, out)


def all_posets(k: int) -> list[Poset]:
    """Every labeled poset on ``k`` points (brute force, ``k <= 4``)."""
    if k > 4:
        raise ResourceError("labeled poset enumeration limited to 4 points")
    pairs = [(x, y) for x in range(k) for y in range(k) if x != y]
    found = {}
    for bits in product([False, True], repeat=len(pairs)):
        rel = np.eye(k, dtype=bool)
        for (x, y), b in zip(pairs, bits):
            rel[x, y] = b
        if not np.array_equal(_closure(rel), rel):
            continue
        if np.any(rel & rel.T & ~np.eye(k, dtype=bool)):
            continue
        P = Poset(rel)
        found[hash(P)] = P
    return list(found.values())


def random_poset(rng: np.random.Generator, k: int, density: float | None = None) -> Poset:
    """Random poset: random DAG on a shuffled order, then transitive closure."""
    if density is None:
        density = rng.uniform(0.1, 0.7)
    perm = rng.permutation(k)
    rel = np.zeros((k, k), dtype=bool)
    for i in range(k):
        for j in range(i + 1, k):
            if rng.random() < density:
                rel[perm[i], perm[j]] = True
    return Poset(rel)
