"""Orders induced by an isocone.

* the inner ordering on the eigenvalue indices of a non-derogatory element,
  recovered from which spectral indicator projections the cone accepts;
* the order on states, ``ρ ⪯ ρ'`` iff ``tr((ρ' - ρ) a) ≥ 0`` for every ``a``
  in the cone, decided exactly for classified cones.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from itertools import product

import numpy as np

from .algebra import BlockAlgebra, BlockElement
from .errors import InconsistencyError, InputError, ResourceError
from .herm import DEFAULT_TOL, as_hermitian, eig_hermitian, eigvals_hermitian
from .isocone.bloch import BlochRegion, bloch_vector
from .isocone.cones import ClassifiedIsocone, Membership, MembershipOracle
from .poset import Poset, up_sets

__all__ = [
    "Comparison",
    "SpectralFrame",
    "PureState",
    "DensityMatrix",
    "StabilityReport",
    "inner_order",
    "inner_order_stability",
    "m2_dual_cone_test",
    "pure_state_compare",
    "state_compare",
]

INNER_ORDER_LIMIT = 20


class Comparison(str, Enum):
    LESS = "less"
    GREATER = "greater"
    EQUIVALENT = "equivalent"
    INCOMPARABLE = "incomparable"

    def flipped(self) -> "Comparison":
        return {
            Comparison.LESS: Comparison.GREATER,
            Comparison.GREATER: Comparison.LESS,
        }.get(self, self)

    @classmethod
    def from_flags(cls, le: bool, ge: bool) -> "Comparison":
        if le and ge:
            return cls.EQUIVALENT
        if le:
            return cls.LESS
        if ge:
            return cls.GREATER
        return cls.INCOMPARABLE


# ---------------------------------------------------------------------------
# Inner ordering
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SpectralFrame:
    """A non-derogatory element with its eigenbasis.

    Eigen-indices ``0..N-1`` follow the ascending joint spectrum; ``owner[i]``
    is the block of index ``i`` and ``vectors[i]`` its eigenvector inside that
    block.
    """

    element: BlockElement
    eigenvalues: np.ndarray
    owner: tuple[int, ...]
    vectors: tuple[np.ndarray, ...]

    @classmethod
    def of(cls, a, gap_tol: float = DEFAULT_TOL.gap_tol) -> "SpectralFrame":
        if not isinstance(a, BlockElement):
            m = as_hermitian(a)
            a = BlockElement(BlockAlgebra((m.shape[0],)), [m], _checked=True)
        vals, owner, vecs = [], [], []
        for x, b in enumerate(a.blocks):
            dec = eig_hermitian(b)
            for i, w in enumerate(dec.eigenvalues):
                vals.append(w)
                owner.append(x)
                vecs.append(dec.eigenvectors[:, i])
        order = np.argsort(vals, kind="stable")
        vals = np.asarray(vals)[order]
        scale = max(1.0, float(np.max(np.abs(vals))))
        if len(vals) > 1 and np.min(np.diff(vals)) <= gap_tol * scale:
            raise InputError("element is derogatory (repeated eigenvalue); the inner ordering needs simple spectrum")
        return cls(a, vals, tuple(owner[i] for i in order), tuple(vecs[i] for i in order))

    @property
    def N(self) -> int:
        return len(self.eigenvalues)

    def indicator(self, subset) -> BlockElement:
        """Spectral projection onto the eigenvectors with indices in ``subset``."""
        A = self.element.algebra
        blocks = [np.zeros((n, n), dtype=complex) for n in A.dims]
        for i in subset:
            v = self.vectors[i]
            blocks[self.owner[i]] += np.outer(v, v.conj())
        return BlockElement(A, blocks, _checked=True)


def _relation_from_accepted(N: int, accepted: list[tuple[int, ...]]) -> np.ndarray:
    masks = np.zeros((len(accepted), N), dtype=bool)
    for r, S in enumerate(accepted):
        masks[r, list(S)] = True
    rel = np.ones((N, N), dtype=bool)
    for i in range(N):
        rows = masks[masks[:, i]]
        rel[i] = rows.all(axis=0) if len(rows) else True
    return rel


def inner_order(oracle: MembershipOracle, frame: SpectralFrame | np.ndarray | BlockElement,
                tol: float = DEFAULT_TOL.atol) -> Poset:
    """Order on eigen-indices: ``i ≤ j`` iff every accepted indicator containing ``i`` contains ``j``.

    Queries all ``2^N`` spectral indicator projections.  Labels are the
    1-based indices.
    """
    if not isinstance(frame, SpectralFrame):
        frame = SpectralFrame.of(frame)
    N = frame.N
    if not oracle.decide(frame.element, tol).accepted:
        raise InputError("the frame's element is outside the cone")
    if N > INNER_ORDER_LIMIT:
        raise ResourceError(f"indicator enumeration limited to N <= {INNER_ORDER_LIMIT}, got {N}")
    accepted = []
    for bits in product((0, 1), repeat=N):
        S = tuple(i for i in range(N) if bits[i])
        if oracle.decide(frame.indicator(S), tol).accepted:
            accepted.append(S)
    rel = _relation_from_accepted(N, accepted)
    both = rel & rel.T & ~np.eye(N, dtype=bool)
    if both.any():
        i, j = map(int, np.argwhere(both)[0])
        raise InconsistencyError(f"accepted indicators never separate indices {i + 1} and {j + 1}")
    return Poset(rel, labels=list(range(1, N + 1)))


@dataclass
class StabilityReport:
    """Inner orders at random inside points near a base element, compared with the base order.

    ``finer`` counts neighbours whose order strictly contains the base order,
    ``coarser`` those strictly contained in it.
    """

    base: Poset
    trials: int
    agree: int = 0
    finer: int = 0
    coarser: int = 0
    other: int = 0
    skipped: int = 0
    witnesses: list = field(default_factory=list)

    @property
    def conclusive(self) -> bool:
        return self.agree + self.finer + self.coarser + self.other > 0

    @property
    def stable(self) -> bool | None:
        if not self.conclusive:
            return None
        return self.finer == 0 and self.coarser == 0 and self.other == 0

    @property
    def base_is_coarsening(self) -> bool:
        """True if every neighbouring order contains the base order (the base can only have lost relations)."""
        return self.coarser == 0 and self.other == 0

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "agree": self.agree,
            "finer": self.finer,
            "coarser": self.coarser,
            "other": self.other,
            "skipped": self.skipped,
            "stable": self.stable,
        }


def inner_order_stability(oracle: MembershipOracle, frame, radius: float, trials: int = 50,
                          seed: int = 0, tol: float = DEFAULT_TOL.atol) -> StabilityReport:
    """Recompute the inner ordering at random points within ``radius`` of the frame's element.

    Perturbations that leave the interior, or land on a derogatory element,
    are skipped.
    """
    if not isinstance(frame, SpectralFrame):
        frame = SpectralFrame.of(frame)
    base = inner_order(oracle, frame, tol)
    report = StabilityReport(base, trials)
    a = frame.element
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        e = a.algebra.random_element(rng)
        e = e * (radius * rng.uniform(0, 1) / max(np.linalg.norm(e.to_real()), 1e-300))
        b = a + e
        if oracle.decide(b, tol) is not Membership.INSIDE:
            report.skipped += 1
            continue
        try:
            order = inner_order(oracle, SpectralFrame.of(b), tol)
        except (InputError, InconsistencyError):
            report.skipped += 1
            continue
        if order == base:
            report.agree += 1
        elif base.is_suborder_of(order):
            report.finer += 1
        elif order.is_suborder_of(base):
            report.coarser += 1
            report.witnesses.append(b)
        else:
            report.other += 1
            report.witnesses.append(b)
    return report


# ---------------------------------------------------------------------------
# States
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PureState:
    """Vector state on block ``block``; the first nonzero amplitude is made real positive."""

    block: int
    vector: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vector, dtype=complex).reshape(-1)
        n = np.linalg.norm(v)
        if n == 0 or not np.all(np.isfinite(v)):
            raise InputError("a pure state needs a nonzero finite vector")
        v = v / n
        k = int(np.flatnonzero(np.abs(v) > 1e-12)[0])
        v = v * (abs(v[k]) / v[k])
        object.__setattr__(self, "vector", v)

    def density(self, algebra: BlockAlgebra) -> "DensityMatrix":
        if not 0 <= self.block < algebra.k or algebra.dims[self.block] != len(self.vector):
            raise InputError("pure state does not fit the algebra")
        blocks = [np.zeros((n, n), dtype=complex) for n in algebra.dims]
        blocks[self.block] = np.outer(self.vector, self.vector.conj())
        return DensityMatrix(BlockElement(algebra, blocks, _checked=True))

    def bloch(self) -> np.ndarray:
        return bloch_vector(np.outer(self.vector, self.vector.conj()))[1] * 2


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    rho: BlockElement
    tol: float = 1e-9

    def __post_init__(self):
        tr = sum(np.trace(b).real for b in self.rho.blocks)
        if abs(tr - 1) > self.tol * 10:
            raise InputError(f"density matrix has trace {tr}, expected 1")
        lo = min(eigvals_hermitian(b)[0] for b in self.rho.blocks)
        if lo < -self.tol * 10:
            raise InputError(f"density matrix has negative eigenvalue {lo}")

    @property
    def algebra(self) -> BlockAlgebra:
        return self.rho.algebra


def m2_dual_cone_test(K: BlochRegion, d, tol: float = DEFAULT_TOL.atol) -> bool:
    """True iff ``d·n ≥ -tol`` for every ``n`` in ``K`` (exact minimum)."""
    return K.min_dot(np.asarray(d, dtype=float)) >= -tol


def pure_state_compare(I: ClassifiedIsocone, phi: PureState, psi: PureState,
                       tol: float = DEFAULT_TOL.atol) -> Comparison:
    for s in (phi, psi):
        if not 0 <= s.block < I.algebra.k or len(s.vector) != I.algebra.dims[s.block]:
            raise InputError("pure state does not fit the cone's algebra")
    x, y = phi.block, psi.block
    if x != y:
        if I.poset.lt(x, y):
            return Comparison.LESS
        if I.poset.lt(y, x):
            return Comparison.GREATER
        return Comparison.INCOMPARABLE
    cone = I.inner[x]
    if cone.is_full:
        same = abs(abs(np.vdot(phi.vector, psi.vector)) - 1) <= tol
        return Comparison.EQUIVALENT if same else Comparison.INCOMPARABLE
    d = psi.bloch() - phi.bloch()
    return Comparison.from_flags(m2_dual_cone_test(cone.region, d, tol), m2_dual_cone_test(cone.region, -d, tol))


def _min_over_projections(I: ClassifiedIsocone, omega: BlockElement) -> float:
    """``min tr(ω p)`` over the projections ``p`` of the cone."""
    traces = [float(np.trace(b).real) for b in omega.blocks]
    partial = []
    for cone, b in zip(I.inner, omega.blocks):
        n = b.shape[0]
        if n == 1:
            partial.append(np.inf)
        elif cone.is_full:
            w = eigvals_hermitian(b)
            partial.append(float(np.min(np.cumsum(w)[:-1])))
        else:
            c, v = bloch_vector(b)
            partial.append(c + cone.region.min_dot(v))
    P = I.poset
    best = 0.0
    for S in up_sets(P):
        if not S:
            continue
        Sset = set(S)
        total = 0.0
        for x in S:
            minimal = not any(P.lt(z, x) for z in Sset)
            total += min(traces[x], partial[x]) if minimal else traces[x]
        best = min(best, total)
    return best


def state_compare(I: ClassifiedIsocone, rho: DensityMatrix, rho2: DensityMatrix,
                  tol: float = DEFAULT_TOL.atol) -> Comparison:
    """Compare two states under the cone's state order.

    Every cone element is a nonnegative combination of cone projections plus
    a constant, so it suffices to minimise ``tr((ρ' - ρ) p)`` over the
    projections ``p`` of the cone; those are enumerated up-set by up-set.
    """
    if rho.algebra != I.algebra or rho2.algebra != I.algebra:
        raise InputError("states do not live on the cone's algebra")
    omega = rho2.rho - rho.rho
    le = _min_over_projections(I, omega) >= -tol
    ge = _min_over_projections(I, -omega) >= -tol
    return Comparison.from_flags(le, ge)
