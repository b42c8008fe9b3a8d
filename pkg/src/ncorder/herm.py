"""Dense hermitian linear algebra.

Spectra via cyclic Jacobi rotations, continuous functional calculus, the
functional-calculus meet and join, and range arithmetic for orthogonal
projections.  Matrices are plain ``numpy`` arrays; nothing here mutates its
arguments.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np
import scipy.linalg

from .errors import DomainError, InputError

__all__ = [
    "ToleranceConfig",
    "DEFAULT_TOL",
    "SpectralDecomposition",
    "IsotoneFunction",
    "Projection",
    "as_hermitian",
    "jacobi_eigh",
    "eig_hermitian",
    "eigvals_hermitian",
    "apply_function",
    "abs_op",
    "meet",
    "join",
    "is_nonderogatory",
    "proj_meet",
    "proj_join",
    "range_basis",
    "subspace_intersection",
    "subspace_sum",
    "orthogonal_complement",
    "commutator_norm",
    "operator_norm",
    "random_hermitian",
    "random_unitary",
    "hermitian_to_real",
    "real_to_hermitian",
]


@dataclass(frozen=True)
class ToleranceConfig:
    """Single tolerance policy threaded through every module.

    ``atol`` is an absolute threshold that gets scaled by ``max(1, norm)`` of
    the operand (see :meth:`scaled`).
    """

    atol: float = 1e-9
    gap_tol: float = 1e-9
    angle_tol: float = 1e-8
    jacobi_tol: float = 1e-12
    feasibility_tol: float = 1e-7

    def scaled(self, norm: float, base: float | None = None) -> float:
        return (self.atol if base is None else base) * max(1.0, float(norm))

    def to_dict(self) -> dict:
        return {
            "atol": self.atol,
            "gap_tol": self.gap_tol,
            "angle_tol": self.angle_tol,
            "jacobi_tol": self.jacobi_tol,
            "feasibility_tol": self.feasibility_tol,
        }


DEFAULT_TOL = ToleranceConfig()


def as_hermitian(a, tol: float = 1e-9, name: str = "matrix") -> np.ndarray:
    """Return ``a`` as a complex array, symmetrized.

    Raises :class:`InputError` if ``a`` is not square or if its asymmetry
    exceeds ``tol * max(1, |a|)``.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise InputError(f"{name} must be a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InputError(f"{name} has non-finite entries")
    asym = np.max(np.abs(a - a.conj().T))
    scale = max(1.0, float(np.max(np.abs(a))))
    if asym > tol * scale:
        raise InputError(f"{name} is not hermitian (asymmetry {asym:.3g})")
    return (a + a.conj().T) / 2


def operator_norm(a: np.ndarray) -> float:
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def commutator_norm(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(a @ b - b @ a))


# ---------------------------------------------------------------------------
# Eigensolver
# ---------------------------------------------------------------------------


def jacobi_eigh(a: np.ndarray, tol: float = 1e-12, max_sweeps: int = 60):
    """Cyclic complex Jacobi iteration.

    Returns ``(w, U)`` with ``a = U diag(w) U*``; eigenvalues are unsorted.
    Iterates until the off-diagonal Frobenius mass is at most
    ``tol * |a|_F``.  The rotation loop runs on Python scalars: at the
    sizes used here that is several times faster than numpy slicing.
    """
    n = a.shape[0]
    A = [[complex(x) for x in row] for row in np.asarray(a).tolist()]
    U = [[1.0 + 0j if i == j else 0j for j in range(n)] for i in range(n)]
    if n == 1:
        return np.array([A[0][0].real]), np.array(U)
    fro2 = sum(abs(x) ** 2 for row in A for x in row)
    if fro2 == 0.0:
        return np.zeros(n), np.array(U)
    target2 = tol * tol * fro2
    skip = 1e-3 * np.sqrt(target2) / n
    for _ in range(max_sweeps):
        off2 = 0.0
        for p in range(n):
            Ap = A[p]
            for q in range(n):
                if q != p:
                    off2 += Ap[q].real ** 2 + Ap[q].imag ** 2
        if off2 <= target2:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                g = A[p][q]
                ag = abs(g)
                if ag <= skip or ag <= 1e-300:
                    continue
                # phase first so the (p, q) entry becomes real, then a real rotation
                ph = g / ag
                phc = ph.conjugate()
                theta = (A[q][q].real - A[p][p].real) / (2.0 * ag)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + (theta * theta + 1.0) ** 0.5)
                c = 1.0 / (t * t + 1.0) ** 0.5
                s = t * c
                v10, v11 = -s * phc, c * phc
                # columns: A <- A V
                for row in A:
                    x, y = row[p], row[q]
                    row[p] = c * x + v10 * y
                    row[q] = s * x + v11 * y
                for row in U:
                    x, y = row[p], row[q]
                    row[p] = c * x + v10 * y
                    row[q] = s * x + v11 * y
                # rows: A <- V* A
                Ap, Aq = A[p], A[q]
                w10, w11 = -s * ph, c * ph
                for j in range(n):
                    x, y = Ap[j], Aq[j]
                    Ap[j] = c * x + w10 * y
                    Aq[j] = s * x + w11 * y
                Ap[q] = Aq[p] = 0j
    return np.array([A[i][i].real for i in range(n)]), np.array(U)


class SpectralDecomposition(NamedTuple):
    """Ascending eigenvalues with unitary eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    def reconstruct(self) -> np.ndarray:
        U = self.eigenvectors
        return (U * self.eigenvalues) @ U.conj().T

    def clusters(self, gap_tol: float) -> list[np.ndarray]:
        """Index groups of eigenvalues separated by gaps larger than ``gap_tol``."""
        w = self.eigenvalues
        groups, start = [], 0
        for i in range(1, len(w)):
            if w[i] - w[i - 1] > gap_tol:
                groups.append(np.arange(start, i))
                start = i
        groups.append(np.arange(start, len(w)))
        return groups

    def spectral_projections(self, gap_tol: float) -> list[tuple[float, np.ndarray]]:
        """``(mean eigenvalue, projector)`` for each cluster, ascending.

        These do not depend on the basis chosen inside a degenerate eigenspace.
        """
        U = self.eigenvectors
        out = []
        for g in self.clusters(gap_tol):
            Q = U[:, g]
            out.append((float(np.mean(self.eigenvalues[g])), Q @ Q.conj().T))
        return out


def _fix_phase(v: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(v)))
    if abs(v[k]) == 0:
        return v
    return v * (abs(v[k]) / v[k])


def _canonical_basis(Q: np.ndarray) -> np.ndarray:
    # basis of range(Q) that depends only on the projector Q Q*
    P = Q @ Q.conj().T
    m = Q.shape[1]
    B, _, _ = scipy.linalg.qr(P, pivoting=True)
    return B[:, :m]


def eig_hermitian(a, tol: ToleranceConfig | float | None = None) -> SpectralDecomposition:
    """Spectral decomposition of a hermitian matrix.

    Eigenvalues ascend.  Each eigenvector has its first largest-magnitude
    component made real and positive; inside numerically degenerate
    eigenvalue clusters the basis is derived from the cluster projector by
    pivoted QR, so it is independent of the order in which Jacobi found it.
    """
    cfg = tol if isinstance(tol, ToleranceConfig) else DEFAULT_TOL
    jtol = tol if isinstance(tol, float) else cfg.jacobi_tol
    a = as_hermitian(a, tol=max(cfg.atol, 1e-12))
    w, U = jacobi_eigh(a, jtol)
    order = np.lexsort((np.arange(len(w)), w))
    w, U = w[order], U[:, order]
    n = len(w)
    degen = 10 * jtol * max(1.0, float(np.max(np.abs(w))) if n else 1.0)
    out = np.empty_like(U)
    i = 0
    while i < n:
        j = i + 1
        while j < n and w[j] - w[j - 1] <= degen:
            j += 1
        if j - i > 1:
            B = _canonical_basis(U[:, i:j])
            for c in range(j - i):
                out[:, i + c] = _fix_phase(B[:, c])
        else:
            out[:, i] = _fix_phase(U[:, i])
        i = j
    return SpectralDecomposition(w, out)


def eigvals_hermitian(a: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Ascending eigenvalues without validation or eigenvector work.

    Hot path for membership tests; callers pass already-hermitian input.
    """
    n = a.shape[0]
    if n == 1:
        return np.array([a[0, 0].real])
    if n == 2:
        # a single Jacobi rotation, written out
        m = (a[0, 0].real + a[1, 1].real) / 2
        h = (a[0, 0].real - a[1, 1].real) / 2
        r = (h * h + abs(a[0, 1]) ** 2) ** 0.5
        return np.array([m - r, m + r])
    return np.sort(jacobi_eigh(a, tol)[0])


def is_nonderogatory(a, gap_tol: float = 1e-9) -> bool:
    """True iff every consecutive eigenvalue gap exceeds ``gap_tol``."""
    w = eig_hermitian(a).eigenvalues
    return bool(np.all(np.diff(w) > gap_tol))


# ---------------------------------------------------------------------------
# Functional calculus
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IsotoneFunction:
    """Continuous nondecreasing piecewise-linear function on the real line.

    Between knots the function interpolates linearly.  Outside the knot range
    it is either constant or continues with the first/last slope
    (``extension="linear"``; a single knot then means slope zero).
    """

    knots: np.ndarray
    values: np.ndarray
    extension: str = "constant"

    def __post_init__(self):
        k = np.asarray(self.knots, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if k.ndim != 1 or k.shape != v.shape or len(k) == 0:
            raise InputError("knots and values must be equal-length 1-d arrays")
        if np.any(np.diff(k) <= 0):
            raise InputError("knots must be strictly increasing")
        if np.any(np.diff(v) < 0):
            raise InputError("values must be nondecreasing")
        if self.extension not in ("constant", "linear"):
            raise InputError(f"unknown extension {self.extension!r}")
        object.__setattr__(self, "knots", k)
        object.__setattr__(self, "values", v)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        y = np.interp(x, self.knots, self.values)
        if self.extension == "linear" and len(self.knots) > 1:
            k, v = self.knots, self.values
            lo_slope = (v[1] - v[0]) / (k[1] - k[0])
            hi_slope = (v[-1] - v[-2]) / (k[-1] - k[-2])
            y = np.where(x < k[0], v[0] + lo_slope * (x - k[0]), y)
            y = np.where(x > k[-1], v[-1] + hi_slope * (x - k[-1]), y)
        return y

    @classmethod
    def random(cls, rng: np.random.Generator, lo: float, hi: float,
               n_knots: int | None = None, scale: float | None = None) -> "IsotoneFunction":
        """Random dictionary element: 2-6 knots in ``[lo, hi]``, sorted uniform values."""
        if n_knots is None:
            n_knots = int(rng.integers(2, 7))
        if hi - lo < 1e-12:
            lo, hi = lo - 0.5, hi + 0.5
        knots = np.sort(rng.uniform(lo, hi, n_knots))
        knots[0], knots[-1] = lo, hi
        knots = np.unique(knots)
        if len(knots) < 2:
            knots = np.array([lo, hi])
        scale = (hi - lo) if scale is None else scale
        values = np.sort(rng.uniform(-scale, scale, len(knots)))
        return cls(knots, values)


def apply_function(f: Callable, a) -> np.ndarray:
    """``U diag(f(w)) U*`` for the spectral decomposition of ``a``.

    ``f`` is called on the eigenvalue array; any non-finite result (or an
    exception from ``f``) is reported as :class:`DomainError`.
    """
    if isinstance(a, SpectralDecomposition):
        d = a
    else:
        # f(a) depends only on the spectral projections, so the eigenvector
        # phase and cluster canonicalization of eig_hermitian is not needed
        w, U = jacobi_eigh(as_hermitian(a), DEFAULT_TOL.jacobi_tol)
        order = np.argsort(w)
        d = SpectralDecomposition(w[order], U[:, order])
    try:
        with np.errstate(all="ignore"):
            fw = np.asarray(f(d.eigenvalues), dtype=float)
    except (ValueError, ArithmeticError) as exc:
        raise DomainError(f"function undefined on the spectrum: {exc}") from exc
    if fw.shape != d.eigenvalues.shape:
        fw = np.broadcast_to(fw, d.eigenvalues.shape)
    if not np.all(np.isfinite(fw)):
        bad = d.eigenvalues[~np.isfinite(fw)]
        raise DomainError(f"function undefined at spectral points {bad}")
    U = d.eigenvectors
    out = (U * fw) @ U.conj().T
    return (out + out.conj().T) / 2


def abs_op(a) -> np.ndarray:
    return apply_function(np.abs, a)


def _pair(a, b):
    a = as_hermitian(a)
    b = as_hermitian(b)
    if a.shape != b.shape:
        raise InputError(f"dimension mismatch {a.shape} vs {b.shape}")
    return a, b


def join(a, b) -> np.ndarray:
    """``(a + b + |a - b|) / 2``."""
    a, b = _pair(a, b)
    return (a + b + abs_op(a - b)) / 2


def meet(a, b) -> np.ndarray:
    """``(a + b - |a - b|) / 2``."""
    a, b = _pair(a, b)
    return (a + b - abs_op(a - b)) / 2


# ---------------------------------------------------------------------------
# Subspaces and projections
# ---------------------------------------------------------------------------


def range_basis(m: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Orthonormal basis of the column space (singular values above ``tol``)."""
    m = np.asarray(m, dtype=complex)
    if m.size == 0 or m.shape[1] == 0:
        return np.zeros((m.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    return u[:, s > tol]


def orthogonal_complement(basis: np.ndarray, n: int | None = None, tol: float = 1e-8) -> np.ndarray:
    n = basis.shape[0] if n is None else n
    P = basis @ basis.conj().T if basis.shape[1] else np.zeros((n, n), dtype=complex)
    return range_basis(np.eye(n) - P, tol)


def subspace_sum(A: np.ndarray, B: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    return range_basis(np.hstack([A, B]), tol)


def subspace_intersection(A: np.ndarray, B: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Basis of ``range(A) ∩ range(B)`` for orthonormal ``A`` and ``B``.

    Directions whose principal angle has sine at most ``tol`` count as shared.
    """
    n = A.shape[0]
    if A.shape[1] == 0 or B.shape[1] == 0:
        return np.zeros((n, 0), dtype=complex)
    # component of A-vectors orthogonal to range(B)
    R = A - B @ (B.conj().T @ A)
    _, s, vh = np.linalg.svd(R, full_matrices=True)
    s_full = np.zeros(A.shape[1])
    s_full[: len(s)] = s
    null = vh.conj().T[:, s_full <= tol]
    if null.shape[1] == 0:
        return np.zeros((n, 0), dtype=complex)
    return range_basis(A @ null, 0.5)


@dataclass(frozen=True, eq=False)
class Projection:
    """Orthogonal projection, stored with an orthonormal basis of its range."""

    matrix: np.ndarray
    rank: int
    basis: np.ndarray = field(repr=False)

    @classmethod
    def onto(cls, vectors, tol: float = 1e-8) -> "Projection":
        V = np.asarray(vectors, dtype=complex)
        if V.ndim == 1:
            V = V[:, None]
        B = range_basis(V, tol)
        return cls(B @ B.conj().T, B.shape[1], B)

    @classmethod
    def from_matrix(cls, m, tol: float = 1e-8) -> "Projection":
        m = as_hermitian(m, tol=tol, name="projection")
        err = np.linalg.norm(m @ m - m)
        if err > tol * max(1.0, m.shape[0]):
            raise InputError(f"not a projection: |p^2 - p| = {err:.3g}")
        B = range_basis(m, 0.5)
        if abs(np.trace(m).real - B.shape[1]) > 1e-6:
            raise InputError("trace of projection is not its rank")
        return cls(B @ B.conj().T, B.shape[1], B)

    @classmethod
    def zero(cls, n: int) -> "Projection":
        return cls(np.zeros((n, n), dtype=complex), 0, np.zeros((n, 0), dtype=complex))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def complement(self) -> "Projection":
        return Projection.onto(orthogonal_complement(self.basis, self.dim), 0.5) if self.rank < self.dim \
            else Projection.zero(self.dim)

    def close_to(self, other: "Projection", tol: float = 1e-7) -> bool:
        return self.rank == other.rank and np.linalg.norm(self.matrix - other.matrix) <= tol

    def commutes_with(self, other: "Projection", tol: float = 1e-9) -> bool:
        return commutator_norm(self.matrix, other.matrix) <= tol


def _as_projection(p) -> Projection:
    return p if isinstance(p, Projection) else Projection.from_matrix(p)


def proj_meet(p, q, tol: float = 1e-8) -> Projection:
    """Projection onto ``range(p) ∩ range(q)``."""
    p, q = _as_projection(p), _as_projection(q)
    if p.dim != q.dim:
        raise InputError("projections of different dimension")
    B = subspace_intersection(p.basis, q.basis, tol)
    return Projection(B @ B.conj().T, B.shape[1], B)


def proj_join(p, q, tol: float = 1e-8) -> Projection:
    """Projection onto ``range(p) + range(q)``."""
    p, q = _as_projection(p), _as_projection(q)
    if p.dim != q.dim:
        raise InputError("projections of different dimension")
    B = subspace_sum(p.basis, q.basis, tol)
    return Projection(B @ B.conj().T, B.shape[1], B)


# ---------------------------------------------------------------------------
# Random matrices and real coordinates
# ---------------------------------------------------------------------------


def random_hermitian(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (z + z.conj().T) / (2 * np.sqrt(max(n, 1)))


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def hermitian_to_real(a: np.ndarray) -> np.ndarray:
    """Coordinates of ``a`` in an orthonormal real basis of Herm(n) (Frobenius)."""
    n = a.shape[0]
    iu = np.triu_indices(n, 1)
    off = a[iu]
    return np.concatenate([a.diagonal().real, np.sqrt(2) * off.real, np.sqrt(2) * off.imag])


def real_to_hermitian(v: Sequence[float], n: int) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    a = np.zeros((n, n), dtype=complex)
    a[np.diag_indices(n)] = v[:n]
    iu = np.triu_indices(n, 1)
    m = len(iu[0])
    vals = (v[n:n + m] + 1j * v[n + m:n + 2 * m]) / np.sqrt(2)
    a[iu] = vals
    a[(iu[1], iu[0])] = vals.conj()
    return a
