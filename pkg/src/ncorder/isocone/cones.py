"""Classified isocones: a poset of blocks with an inner cone per block.

An element ``a = (a_x)`` belongs to the cone iff every block lies in its inner
cone and ``max σ(a_x) ≤ min σ(a_y)`` whenever ``x ≺ y``.  Decisions are
three-valued: numerics cannot settle points on the boundary of a closed set.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Protocol, Sequence

import numpy as np

from ..algebra import BlockAlgebra, BlockElement
from ..errors import InputError
from ..herm import DEFAULT_TOL, eig_hermitian, random_unitary
from ..poset import Poset, hasse
from .bloch import BlochRegion, bloch_vector, from_bloch

__all__ = [
    "Membership",
    "MembershipOracle",
    "InnerCone",
    "ClassifiedIsocone",
    "LayerCake",
    "membership",
    "m2_membership",
    "lexicographic_sum_isocone",
    "layer_cake",
    "verdict",
]


class Membership(str, Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"
    BOUNDARY = "boundary"

    @property
    def accepted(self) -> bool:
        """Not provably outside."""
        return self is not Membership.OUTSIDE

    @property
    def exit_code(self) -> int:
        return {"inside": 0, "outside": 1, "boundary": 2}[self.value]


def verdict(margin: float, tol: float) -> Membership:
    if margin > tol:
        return Membership.INSIDE
    if margin < -tol:
        return Membership.OUTSIDE
    return Membership.BOUNDARY


class MembershipOracle(Protocol):
    def decide(self, a: BlockElement, tol: float = DEFAULT_TOL.atol) -> Membership: ...


@dataclass(frozen=True)
class InnerCone:
    kind: str
    dim: int
    region: BlochRegion | None = None

    def __post_init__(self):
        if self.kind not in ("full", "m2region"):
            raise InputError(f"unknown inner cone kind {self.kind!r}")
        if self.dim < 1:
            raise InputError("inner cone dimension must be positive")
        if self.kind == "m2region":
            if self.dim != 2:
                raise InputError("a Bloch-region cone needs a 2x2 block")
            if self.region is None or self.region.is_full:
                raise InputError("use InnerCone.full for the whole of Herm(2)")

    @classmethod
    def full(cls, n: int) -> "InnerCone":
        return cls("full", int(n))

    @classmethod
    def m2(cls, region: BlochRegion) -> "InnerCone":
        if region.is_full:
            return cls.full(2)
        return cls("m2region", 2, region)

    @property
    def is_full(self) -> bool:
        return self.kind == "full"

    def margin(self, block: np.ndarray, scalar_tol: float = 0.0) -> float:
        if self.kind == "full":
            return np.inf
        _, v = bloch_vector(block)
        if np.linalg.norm(v) <= scalar_tol:
            return np.inf
        return self.region.margin(v)

    def conjugated(self, u) -> "InnerCone":
        if u is None or self.kind == "full":
            return self
        return InnerCone.m2(self.region.conjugated(u))

    def sample_block(self, rng: np.random.Generator, lo: float, hi: float) -> np.ndarray:
        """Random block with spectrum in ``[lo, hi]`` strictly inside this cone."""
        if self.kind == "m2region":
            r = (hi - lo) / 2
            return from_bloch(lo + r, r * self.region.sample(rng))
        w = rng.uniform(lo, hi, self.dim)
        w[0], w[-1] = lo, hi
        if self.dim == 1:
            w[0] = rng.uniform(lo, hi)
        U = random_unitary(rng, self.dim)
        return (U * w) @ U.conj().T

    def to_dict(self) -> dict:
        return {"kind": "full"} if self.kind == "full" else self.region.to_dict()

    @classmethod
    def from_dict(cls, d: dict, dim: int) -> "InnerCone":
        kind = d.get("kind")
        if kind == "full":
            return cls.full(dim)
        if dim != 2:
            raise InputError(f"inner cone {kind!r} requires a 2x2 block, block has size {dim}")
        if kind == "cap":
            return cls.m2(BlochRegion.cap(d["center"], d["angle"]))
        if kind == "polygon":
            return cls.m2(BlochRegion.polygon(d["normals"]))
        raise InputError(f"unknown inner cone kind {kind!r}")


def m2_membership(K: BlochRegion, a, tol: float = DEFAULT_TOL.atol) -> Membership:
    """Decide ``a ∈ R₊K + R·1`` for a 2×2 hermitian ``a``."""
    a = np.asarray(a, dtype=complex)
    if a.shape != (2, 2):
        raise InputError(f"expected a 2x2 matrix, got shape {a.shape}")
    c, v = bloch_vector(a)
    r = float(np.linalg.norm(v))
    t = tol * max(1.0, abs(c) + r)
    if r <= t:
        return Membership.INSIDE
    return verdict(K.margin(v), t)


@dataclass(frozen=True)
class ClassifiedIsocone:
    """Lexicographic sum of inner cones over a poset of blocks."""

    algebra: BlockAlgebra
    poset: Poset
    inner: tuple[InnerCone, ...]

    def __post_init__(self):
        object.__setattr__(self, "inner", tuple(self.inner))
        if self.poset.size != self.algebra.k:
            raise InputError(f"poset has {self.poset.size} points, algebra has {self.algebra.k} blocks")
        if len(self.inner) != self.algebra.k:
            raise InputError("one inner cone per block required")
        for x, (c, n) in enumerate(zip(self.inner, self.algebra.dims)):
            if c.dim != n:
                raise InputError(f"inner cone {x + 1} has dimension {c.dim}, block has {n}")

    @classmethod
    def trivial(cls, algebra: BlockAlgebra) -> "ClassifiedIsocone":
        return cls(algebra, Poset.antichain(algebra.k), tuple(InnerCone.full(n) for n in algebra.dims))

    @property
    def dims(self) -> tuple[int, ...]:
        return self.algebra.dims

    def margin(self, a: BlockElement, scalar_tol: float = 0.0) -> float:
        """Smallest signed slack over all defining inequalities."""
        if a.algebra != self.algebra:
            raise InputError("element does not belong to this cone's algebra")
        m = np.inf
        for cone, block in zip(self.inner, a.blocks):
            if not cone.is_full:
                m = min(m, cone.margin(block, scalar_tol))
        if self.poset.size > 1:
            bounds = a.block_bounds()
            for x, y in self.poset.strict_pairs():
                m = min(m, bounds[y][0] - bounds[x][1])
        return float(m)

    def decide(self, a: BlockElement, tol: float = DEFAULT_TOL.atol) -> Membership:
        t = tol * max(1.0, a.norm())
        return verdict(self.margin(a, t), t)

    def sample(self, rng: np.random.Generator, spread: float = 2.0) -> BlockElement:
        """Random element strictly inside the cone."""
        hi_of = {}
        blocks: list = [None] * self.algebra.k
        for x in self.poset.linear_extension():
            below = [hi_of[p] for p in self.poset.lower(x)]
            lo = max(below) + rng.uniform(0.05, 1.0) if below else rng.normal(scale=spread)
            hi = lo + rng.uniform(0.05, spread)
            blocks[x] = self.inner[x].sample_block(rng, lo, hi)
            hi_of[int(x)] = hi
        return BlockElement(self.algebra, blocks, _checked=True)

    def to_dict(self) -> dict:
        return {
            "dims": list(self.algebra.dims),
            "poset": {"relations": [[x + 1, y + 1] for x, y in sorted(hasse(self.poset))]},
            "inner": [c.to_dict() for c in self.inner],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ClassifiedIsocone":
        """Parse a cone-spec document (1-based block indices in relations)."""
        try:
            A = BlockAlgebra(tuple(d["dims"]))
            rels = d.get("poset", {}).get("relations", [])
            inner_spec = d.get("inner") or [{"kind": "full"}] * A.k
        except (KeyError, TypeError, AttributeError) as e:
            raise InputError(f"malformed cone spec: {e}") from None
        pairs = []
        for r in rels:
            if len(r) != 2:
                raise InputError(f"relation {r} must be a pair")
            x, y = int(r[0]) - 1, int(r[1]) - 1
            pairs.append((x, y))
        P = Poset.from_relations(A.k, pairs)
        if len(inner_spec) != A.k:
            raise InputError(f"need {A.k} inner cones, got {len(inner_spec)}")
        inner = tuple(InnerCone.from_dict(s, n) for s, n in zip(inner_spec, A.dims))
        return cls(A, P, inner)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ClassifiedIsocone):
            return NotImplemented
        return self.algebra == other.algebra and self.poset == other.poset and self.inner == other.inner

    __hash__ = None


def membership(I: ClassifiedIsocone, a: BlockElement, tol: float = DEFAULT_TOL.atol) -> Membership:
    return I.decide(a, tol)


def lexicographic_sum_isocone(P: Poset, parts: Sequence) -> ClassifiedIsocone:
    """Lexicographic sum of single-block cones (or bare inner cones) over ``P``."""
    if len(parts) != P.size:
        raise InputError(f"need {P.size} parts, got {len(parts)}")
    inner = []
    for i, part in enumerate(parts):
        if isinstance(part, InnerCone):
            inner.append(part)
        elif isinstance(part, ClassifiedIsocone):
            if part.algebra.k != 1:
                raise InputError(f"part {i + 1} has {part.algebra.k} blocks; single-block cones only")
            inner.append(part.inner[0])
        else:
            raise InputError(f"part {i + 1} is not a cone")
    return ClassifiedIsocone(BlockAlgebra(tuple(c.dim for c in inner)), P, tuple(inner))


class LayerCake(NamedTuple):
    projections: list
    weights: list[float]
    shift: float

    def reconstruct(self, like=None):
        """``Σ λ_i p_i + λ·1``; pass the original element when there are no projections."""
        ref = self.projections[0] if self.projections else like
        if isinstance(ref, BlockElement):
            out = ref.algebra.scalar(self.shift)
        else:
            out = self.shift * np.eye(np.shape(ref)[0], dtype=complex)
        for w, p in zip(self.weights, self.projections):
            out = out + p * w
        return out


def layer_cake(a, gap_tol: float = DEFAULT_TOL.gap_tol) -> LayerCake:
    """Write ``a = Σ λ_i p_i + λ·1`` with a decreasing chain of spectral projections.

    Accepts a hermitian matrix or a :class:`BlockElement`; projections come
    back in the same form.  Eigenvalues closer than ``gap_tol`` (scaled by the
    norm) are merged.
    """
    if isinstance(a, BlockElement):
        decs = [eig_hermitian(b) for b in a.blocks]
    else:
        decs = [eig_hermitian(a)]
    allw = np.sort(np.concatenate([d.eigenvalues for d in decs]))
    scale = max(1.0, float(np.max(np.abs(allw))))
    # cluster the joint spectrum
    levels = [[allw[0]]]
    for w in allw[1:]:
        if w - levels[-1][-1] > gap_tol * scale:
            levels.append([w])
        else:
            levels[-1].append(w)
    mu = [float(np.mean(l)) for l in levels]
    cuts = [l[0] for l in levels]
    projections = []
    for i in range(1, len(levels)):
        blocks = []
        for d in decs:
            U = d.eigenvectors[:, d.eigenvalues >= cuts[i]]
            blocks.append(U @ U.conj().T)
        if isinstance(a, BlockElement):
            projections.append(BlockElement(a.algebra, blocks, _checked=True))
        else:
            projections.append(blocks[0])
    weights = [mu[i] - mu[i - 1] for i in range(1, len(mu))]
    return LayerCake(projections, weights, mu[0])
