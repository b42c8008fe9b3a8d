"""Finite-dimensional C*-algebras ``⊕_x M_{n_x}(C)`` and their self-adjoint part.

Block indices are 0-based in the Python API (the JSON file formats use
1-based indices, see :mod:`ncorder.spec_io`).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import InputError, UnsupportedMorphismError
from .herm import (
    apply_function,
    as_hermitian,
    eigvals_hermitian,
    hermitian_to_real,
    random_hermitian,
    real_to_hermitian,
)

__all__ = [
    "BlockAlgebra",
    "BlockElement",
    "BlockMorphism",
    "embed",
    "block_unit",
    "pushforward_isocone",
    "pullback_isocone",
]


@dataclass(frozen=True)
class BlockAlgebra:
    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(n) for n in self.dims)
        if len(dims) == 0 or any(n < 1 for n in dims):
            raise InputError(f"block dimensions must be positive and non-empty, got {self.dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def k(self) -> int:
        return len(self.dims)

    @property
    def N(self) -> int:
        return sum(self.dims)

    @property
    def real_dim(self) -> int:
        return sum(n * n for n in self.dims)

    @property
    def offsets(self) -> list[int]:
        return [0, *np.cumsum(self.dims).tolist()]

    def element(self, blocks: Sequence) -> "BlockElement":
        return BlockElement(self, tuple(blocks))

    def zero(self) -> "BlockElement":
        return self.scalar(0.0)

    def identity(self) -> "BlockElement":
        return self.scalar(1.0)

    def scalar(self, c: float) -> "BlockElement":
        return self.from_scalars([c] * self.k)

    def from_scalars(self, values: Sequence[float]) -> "BlockElement":
        if len(values) != self.k:
            raise InputError(f"need {self.k} block scalars, got {len(values)}")
        return BlockElement(self, tuple(v * np.eye(n, dtype=complex) for v, n in zip(values, self.dims)),
                            _checked=True)

    def random_element(self, rng: np.random.Generator, scale: float = 1.0) -> "BlockElement":
        return BlockElement(self, tuple(random_hermitian(rng, n, scale) for n in self.dims), _checked=True)

    def split(self, m: np.ndarray, tol: float = 1e-9) -> "BlockElement":
        """Inverse of :func:`embed`; rejects matrices with off-block mass."""
        m = as_hermitian(m, tol)
        if m.shape[0] != self.N:
            raise InputError(f"matrix of size {m.shape[0]} does not fit dims {self.dims}")
        off = self.offsets
        mask = np.ones_like(m, dtype=bool)
        for x in range(self.k):
            mask[off[x]:off[x + 1], off[x]:off[x + 1]] = False
        if np.any(np.abs(m[mask]) > tol * max(1.0, float(np.max(np.abs(m))))):
            raise InputError("matrix is not block diagonal for this algebra")
        return BlockElement(self, tuple(m[off[x]:off[x + 1], off[x]:off[x + 1]] for x in range(self.k)),
                            _checked=True)

    def from_real(self, v: Sequence[float]) -> "BlockElement":
        v = np.asarray(v, dtype=float)
        blocks, i = [], 0
        for n in self.dims:
            blocks.append(real_to_hermitian(v[i:i + n * n], n))
            i += n * n
        return BlockElement(self, tuple(blocks), _checked=True)


class BlockElement:
    """Self-adjoint element ``(a_x)`` of a :class:`BlockAlgebra`."""

    __slots__ = ("algebra", "blocks", "_bounds")

    def __init__(self, algebra: BlockAlgebra, blocks: Sequence, _checked: bool = False):
        if len(blocks) != algebra.k:
            raise InputError(f"expected {algebra.k} blocks, got {len(blocks)}")
        if not _checked:
            checked = []
            for x, (b, n) in enumerate(zip(blocks, algebra.dims)):
                b = as_hermitian(np.atleast_2d(b), name=f"block {x + 1}")
                if b.shape[0] != n:
                    raise InputError(f"block {x + 1} has size {b.shape[0]}, expected {n}")
                checked.append(b)
            blocks = checked
        self.algebra = algebra
        self.blocks = tuple(np.asarray(b, dtype=complex) for b in blocks)
        self._bounds = None

    def _new(self, blocks) -> "BlockElement":
        return BlockElement(self.algebra, blocks, _checked=True)

    def __add__(self, other: "BlockElement") -> "BlockElement":
        self._same(other)
        return self._new([a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other: "BlockElement") -> "BlockElement":
        self._same(other)
        return self._new([a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self) -> "BlockElement":
        return self._new([-a for a in self.blocks])

    def __mul__(self, c: float) -> "BlockElement":
        return self._new([float(c) * a for a in self.blocks])

    __rmul__ = __mul__

    def shift(self, c: float) -> "BlockElement":
        return self._new([a + c * np.eye(a.shape[0]) for a in self.blocks])

    def _same(self, other):
        if not isinstance(other, BlockElement) or other.algebra != self.algebra:
            raise InputError("elements belong to different algebras")

    def embed(self) -> np.ndarray:
        return embed(self)

    def block_bounds(self) -> list[tuple[float, float]]:
        """``(min σ(a_x), max σ(a_x))`` for every block (cached)."""
        if self._bounds is None:
            out = []
            for b in self.blocks:
                w = eigvals_hermitian(b)
                out.append((float(w[0]), float(w[-1])))
            self._bounds = out
        return self._bounds

    def spectrum(self) -> np.ndarray:
        return np.sort(np.concatenate([eigvals_hermitian(b) for b in self.blocks]))

    def norm(self) -> float:
        return max(max(abs(lo), abs(hi)) for lo, hi in self.block_bounds())

    def apply(self, f: Callable) -> "BlockElement":
        """Functional calculus, block by block."""
        return self._new([apply_function(f, b) for b in self.blocks])

    def to_real(self) -> np.ndarray:
        return np.concatenate([hermitian_to_real(b) for b in self.blocks])

    def allclose(self, other: "BlockElement", atol: float = 1e-9) -> bool:
        self._same(other)
        return all(np.allclose(a, b, atol=atol, rtol=0) for a, b in zip(self.blocks, other.blocks))

    def commutes_with(self, other: "BlockElement", tol: float = 1e-9) -> bool:
        return all(np.linalg.norm(a @ b - b @ a) <= tol for a, b in zip(self.blocks, other.blocks))

    def to_lists(self) -> list:
        """Nested ``[re, im]`` pairs, the element-file encoding."""
        return [[[[float(z.real), float(z.imag)] for z in row] for row in b] for b in self.blocks]

    def __repr__(self) -> str:
        return f"BlockElement(dims={self.algebra.dims})"


def embed(a: BlockElement) -> np.ndarray:
    """Block-diagonal ``N×N`` matrix of ``a``."""
    A = a.algebra
    out = np.zeros((A.N, A.N), dtype=complex)
    off = A.offsets
    for x, b in enumerate(a.blocks):
        out[off[x]:off[x + 1], off[x]:off[x + 1]] = b
    return out


def block_unit(A: BlockAlgebra, x: int) -> BlockElement:
    """``ι_x``: identity on block ``x``, zero elsewhere."""
    if not 0 <= x < A.k:
        raise InputError(f"block index {x} out of range for {A.k} blocks")
    vals = [0.0] * A.k
    vals[x] = 1.0
    return A.from_scalars(vals)


@dataclass(frozen=True)
class BlockMorphism:
    """Coordinate projection, optionally followed by unitary conjugation per block.

    Target block ``j`` receives ``U_j a_{assignment[j]} U_j*``.
    """

    source: BlockAlgebra
    target: BlockAlgebra
    assignment: tuple[int, ...]
    unitaries: tuple | None = None

    def __post_init__(self):
        asg = tuple(int(i) for i in self.assignment)
        object.__setattr__(self, "assignment", asg)
        if len(asg) != self.target.k:
            raise InputError("one source block per target block required")
        for j, i in enumerate(asg):
            if not 0 <= i < self.source.k:
                raise InputError(f"assignment index {i} out of range")
            if self.source.dims[i] != self.target.dims[j]:
                raise InputError(f"block size mismatch for target block {j}")
        if self.unitaries is not None:
            us = tuple(None if u is None else np.asarray(u, dtype=complex) for u in self.unitaries)
            if len(us) != self.target.k:
                raise InputError("one unitary (or None) per target block required")
            for j, u in enumerate(us):
                if u is None:
                    continue
                n = self.target.dims[j]
                if u.shape != (n, n) or not np.allclose(u.conj().T @ u, np.eye(n), atol=1e-9):
                    raise InputError(f"unitary for target block {j} is invalid")
            object.__setattr__(self, "unitaries", us)

    @classmethod
    def projection(cls, source: BlockAlgebra, blocks: Sequence[int], unitaries=None) -> "BlockMorphism":
        blocks = list(blocks)
        target = BlockAlgebra(tuple(source.dims[i] for i in blocks))
        return cls(source, target, tuple(blocks), unitaries)

    @property
    def is_surjective(self) -> bool:
        return len(set(self.assignment)) == len(self.assignment)

    def unitary(self, j: int):
        if self.unitaries is None:
            return None
        return self.unitaries[j]

    def __call__(self, a: BlockElement) -> BlockElement:
        if a.algebra != self.source:
            raise InputError("element is not in the source algebra")
        blocks = []
        for j, i in enumerate(self.assignment):
            b = a.blocks[i]
            u = self.unitary(j)
            blocks.append(b if u is None else u @ b @ u.conj().T)
        return BlockElement(self.target, blocks, _checked=True)


def pushforward_isocone(m: BlockMorphism, I):
    """Image ``π(I)`` of a classified isocone under a surjective coordinate projection.

    The poset is restricted to the retained blocks; inner cones are carried
    along (rotated when the morphism conjugates a block).
    """
    from .isocone.cones import ClassifiedIsocone

    if I.algebra != m.source:
        raise InputError("isocone does not live on the morphism's source")
    if not m.is_surjective:
        raise UnsupportedMorphismError("pushforward needs a surjective coordinate projection")
    inner = [I.inner[i].conjugated(m.unitary(j)) for j, i in enumerate(m.assignment)]
    return ClassifiedIsocone(m.target, I.poset.restrict(m.assignment), tuple(inner))


def pullback_isocone(m: BlockMorphism, J):
    """``{a : m(a) ∈ J}`` in classified form.

    Blocks hit by the projection inherit ``J``'s relations and inner cones;
    the remaining blocks are isolated points with the full hermitian cone.
    """
    from .isocone.cones import ClassifiedIsocone, InnerCone
    from .poset import Poset

    if J.algebra != m.target:
        raise InputError("isocone does not live on the morphism's target")
    if not m.is_surjective:
        raise UnsupportedMorphismError("pullback is implemented for coordinate projections only")
    k = m.source.k
    rel = np.eye(k, dtype=bool)
    for j1, j2 in J.poset.strict_pairs():
        rel[m.assignment[j1], m.assignment[j2]] = True
    inner = [InnerCone.full(n) for n in m.source.dims]
    for j, i in enumerate(m.assignment):
        u = m.unitary(j)
        inner[i] = J.inner[j].conjugated(None if u is None else u.conj().T)
    return ClassifiedIsocone(m.source, Poset(rel), tuple(inner))
