"""Two projections in general position.

For subspaces ``L`` and ``N`` the ambient space splits orthogonally into
``L∩N``, ``L∩N⊥``, ``L⊥∩N``, ``L⊥∩N⊥`` and a generic part
``L₀ ⊕ L₀'`` (``L₀ = L ⊖ (L∩N + L∩N⊥)``, ``L₀' = L⊥ ⊖ (L⊥∩N + L⊥∩N⊥)``).
On the generic part, with ``L₀'`` identified with ``L₀`` through a unitary
``R``, the two projections read

    p_L = [[1, 0], [0, 0]],    p_N = [[1 - H, W], [W, H]],    W = (H - H²)^{1/2},

with ``0 < H < 1``.  Everything below is built from that normal form.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import DegenerateLatticeError, InputError
from .herm import (
    Projection,
    apply_function,
    eig_hermitian,
    orthogonal_complement,
    range_basis,
    subspace_intersection,
    subspace_sum,
)
from .poset import Poset

__all__ = [
    "HalmosData",
    "SpectralGroup",
    "ComboSpectrum",
    "Lattice16",
    "halmos_decompose",
    "convex_combo_spectrum",
    "generated_lattice16",
    "cororder_bound",
]


def _proj(B: np.ndarray) -> np.ndarray:
    return B @ B.conj().T


def _as_proj(p, tol: float) -> Projection:
    return p if isinstance(p, Projection) else Projection.from_matrix(p, tol)


def _remove(B: np.ndarray, *parts: np.ndarray) -> np.ndarray:
    """Orthonormal basis of ``range(B) ⊖ (parts)``; parts are orthogonal to each other."""
    n = B.shape[0]
    M = np.eye(n, dtype=complex)
    for P in parts:
        M -= _proj(P)
    return range_basis(M @ B, 0.5)


@dataclass(frozen=True, eq=False)
class HalmosData:
    """Canonical decomposition of a pair of projections (bases are columns)."""

    LN: np.ndarray
    LNp: np.ndarray
    LpN: np.ndarray
    LpNp: np.ndarray
    L0: np.ndarray
    L0p: np.ndarray
    N0: np.ndarray
    N0p: np.ndarray
    H: np.ndarray
    W: np.ndarray
    R: np.ndarray

    @property
    def dim(self) -> int:
        return self.LN.shape[0]

    @property
    def d0(self) -> int:
        return self.L0.shape[1]

    @property
    def generic(self) -> np.ndarray:
        """Orthonormal basis of ``L₀ ⊕ L₀'``."""
        return np.hstack([self.L0, self.L0p])

    @property
    def in_general_position(self) -> bool:
        return self.d0 > 0

    def cos2_angles(self) -> np.ndarray:
        """Squared cosines of the principal angles between ``L₀`` and ``N``."""
        if self.d0 == 0:
            return np.zeros(0)
        return np.sort(1 - eig_hermitian(self.H).eigenvalues)

    def generic_blocks(self, t: float | None = None) -> np.ndarray:
        """``p_N`` (or ``t·p_L + (1-t)·p_N``) on the generic part, in the basis ``[L₀, L₀']``."""
        d = self.d0
        I = np.eye(d)
        WR = self.W @ self.R
        pn = np.block([[I - self.H, WR], [WR.conj().T, self.R.conj().T @ self.H @ self.R]])
        if t is None:
            return pn
        pl = np.block([[I, np.zeros((d, d))], [np.zeros((d, d)), np.zeros((d, d))]])
        return t * pl + (1 - t) * pn

    def reconstruct(self) -> tuple[np.ndarray, np.ndarray]:
        pL = _proj(self.LN) + _proj(self.LNp) + _proj(self.L0)
        pN = _proj(self.LN) + _proj(self.LpN)
        if self.d0:
            G = self.generic
            pN = pN + G @ self.generic_blocks() @ G.conj().T
        return pL, pN


def halmos_decompose(p_L, p_N, tol: float = 1e-8) -> HalmosData:
    """Split the space for the pair ``(p_L, p_N)`` and compute ``H``, ``W``, ``R``."""
    P, Q = _as_proj(p_L, tol), _as_proj(p_N, tol)
    if P.dim != Q.dim:
        raise InputError(f"projections act on spaces of dimension {P.dim} and {Q.dim}")
    n = P.dim
    L, N = P.basis, Q.basis
    Lp, Np = orthogonal_complement(L, n), orthogonal_complement(N, n)
    LN = subspace_intersection(L, N, tol)
    LNp = subspace_intersection(L, Np, tol)
    LpN = subspace_intersection(Lp, N, tol)
    LpNp = subspace_intersection(Lp, Np, tol)
    L0 = _remove(L, LN, LNp)
    L0p = _remove(Lp, LpN, LpNp)
    N0 = _remove(N, LN, LpN)
    N0p = _remove(Np, LNp, LpNp)
    if L0.shape[1] != L0p.shape[1]:
        raise InputError("generic parts have different dimensions; tolerance too coarse for this pair")
    d = L0.shape[1]
    if d == 0:
        z = np.zeros((0, 0), dtype=complex)
        return HalmosData(LN, LNp, LpN, LpNp, L0, L0p, N0, N0p, z, z, z)
    pn = Q.matrix
    H = np.eye(d) - L0.conj().T @ pn @ L0
    H = (H + H.conj().T) / 2
    dec = eig_hermitian(H)
    W = apply_function(lambda h: np.sqrt(np.clip(h - h * h, 0, None)), dec)
    C = L0.conj().T @ pn @ L0p
    # polar part of C = W R; W is invertible because 0 < H < 1
    Winv = apply_function(lambda h: 1 / np.sqrt(np.clip(h - h * h, 1e-300, None)), dec)
    R = Winv @ C
    u, _, vh = np.linalg.svd(R)
    R = u @ vh
    return HalmosData(LN, LNp, LpN, LpNp, L0, L0p, N0, N0p, H, W, R)


@dataclass(frozen=True, eq=False)
class SpectralGroup:
    label: str
    values: np.ndarray
    basis: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


@dataclass(frozen=True, eq=False)
class ComboSpectrum:
    """Labeled spectral decomposition of ``t·p_L + (1-t)·p_N``, ascending."""

    t: float
    groups: tuple[SpectralGroup, ...]

    def group(self, label: str) -> SpectralGroup | None:
        for g in self.groups:
            if g.label == label:
                return g
        return None

    @property
    def labels(self) -> list[str]:
        return [g.label for g in self.groups]

    def eigenvalues(self) -> np.ndarray:
        return np.sort(np.concatenate([g.values for g in self.groups]))

    def reconstruct(self) -> np.ndarray:
        n = self.groups[0].basis.shape[0]
        out = np.zeros((n, n), dtype=complex)
        for g in self.groups:
            out += (g.basis * g.values) @ g.basis.conj().T
        return out


def convex_combo_spectrum(p_L, p_N, t: float, tol: float = 1e-8) -> ComboSpectrum:
    """Eigenvalues of ``t·p_L + (1-t)·p_N`` grouped by the summand they come from.

    Labels: ``"0"``, ``"S-"``, ``"t"``, ``"1-t"``, ``"S+"``, ``"1"`` (at
    ``t = 1/2`` the middle two merge into ``"1/2"``).  The ``S±`` groups
    hold one value per eigenvalue ``h`` of ``H``:
    ``1/2 ± (1/4 - t(1-t)h)^{1/2}``.
    """
    t = float(t)
    if not 0 < t < 1:
        raise InputError(f"t must lie strictly between 0 and 1, got {t}")
    D = halmos_decompose(p_L, p_N, tol)
    n = D.dim
    groups: list[SpectralGroup] = []

    def add(label, value, B):
        if B.shape[1]:
            groups.append(SpectralGroup(label, np.full(B.shape[1], value), B))

    add("0", 0.0, D.LpNp)
    if D.d0:
        G = D.generic
        dec = eig_hermitian(D.generic_blocks(t))
        w, U = dec.eigenvalues, G @ dec.eigenvectors
        lo, hi = w < 0.5, w > 0.5
        groups.append(SpectralGroup("S-", w[lo], U[:, lo]))
        pending = [SpectralGroup("S+", w[hi], U[:, hi])]
    else:
        pending = []
    if abs(t - 0.5) <= tol:
        add("1/2", 0.5, np.hstack([D.LNp, D.LpN]))
    elif t < 0.5:
        add("t", t, D.LNp)
        add("1-t", 1 - t, D.LpN)
    else:
        add("1-t", 1 - t, D.LpN)
        add("t", t, D.LNp)
    groups.extend(pending)
    add("1", 1.0, D.LN)
    if sum(g.dim for g in groups) != n:
        raise InputError("spectral groups do not fill the space; tolerance too coarse for this pair")
    return ComboSpectrum(t, tuple(groups))


@dataclass(frozen=True, eq=False)
class Lattice16:
    """The subspaces ``O + Σ_{i∈S} A_i`` for all ``S ⊆ {1,2,3,4}``."""

    elements: dict
    distinct: bool
    identities: dict

    def __getitem__(self, subset) -> Projection:
        return self.elements[tuple(sorted(subset))]

    def __len__(self) -> int:
        return len(self.elements)

    def subsets(self) -> list[tuple[int, ...]]:
        return list(self.elements)

    def find(self, p: Projection, tol: float = 1e-7) -> tuple[int, ...] | None:
        for s, q in self.elements.items():
            if q.close_to(p, tol):
                return s
        return None


def generated_lattice16(p_L, p_N, tol: float = 1e-8) -> Lattice16:
    """The distributive lattice generated by ``O + A_i`` for a non-commuting pair.

    ``O = L∩N``, ``A₁ = L∩N⊥``, ``A₂ = L⊥∩N``, ``A₃ = L₀``, ``A₄ = N₀``.
    """
    D = halmos_decompose(p_L, p_N, tol)
    if not D.in_general_position:
        raise DegenerateLatticeError("the projections commute; their lattice is Boolean")
    A = {1: D.LNp, 2: D.LpN, 3: D.L0, 4: D.N0}
    elements = {}
    for r in range(5):
        for S in combinations((1, 2, 3, 4), r):
            B = np.hstack([D.LN] + [A[i] for i in S])
            elements[S] = Projection.onto(B, tol) if B.shape[1] else Projection.zero(D.dim)
    mats = list(elements.values())
    distinct = all(
        not mats[i].close_to(mats[j], 1e-7) for i in range(len(mats)) for j in range(i + 1, len(mats))
    )
    G = D.generic
    d = D.d0

    def same(B1, B2):
        return B1.shape[1] == B2.shape[1] and np.allclose(_proj(B1), _proj(B2), atol=1e-7)

    identities = {
        "L0+N0=W": same(subspace_sum(D.L0, D.N0, tol), G) and subspace_sum(D.L0, D.N0, tol).shape[1] == 2 * d,
        "N0∩L0'=0": subspace_intersection(D.N0, D.L0p, tol).shape[1] == 0,
        "N0'+L0=W": same(subspace_sum(D.N0p, D.L0, tol), G),
    }
    return Lattice16(elements, distinct, identities)


def cororder_bound(t: float) -> Poset:
    """Coarsest-possible-refinement bound for the order on ``σ(t·p_L + (1-t)·p_N)``.

    Elements are labeled and listed by ascending value: for ``t < 1/2``
    ``0, S-, t, 1-t, S+, 1``; for ``t > 1/2`` the middle pair swaps; at
    ``t = 1/2`` it merges into ``1/2``.  Covers: ``0 ≺ S-, t, 1-t``;
    ``S- ≺ S+``; ``t, 1-t, S+ ≺ 1``.
    """
    t = float(t)
    if not 0 < t < 1:
        raise InputError(f"t must lie strictly between 0 and 1, got {t}")
    if t == 0.5:
        labels = ["0", "S-", "1/2", "S+", "1"]
        covers = [("0", "S-"), ("0", "1/2"), ("S-", "S+"), ("S+", "1"), ("1/2", "1")]
    else:
        mid = ["t", "1-t"] if t < 0.5 else ["1-t", "t"]
        labels = ["0", "S-", *mid, "S+", "1"]
        covers = [("0", "S-"), ("0", "t"), ("0", "1-t"), ("S-", "S+"), ("S+", "1"), ("t", "1"), ("1-t", "1")]
    idx = {lab: i for i, lab in enumerate(labels)}
    return Poset.from_relations(len(labels), [(idx[a], idx[b]) for a, b in covers], labels)
