"""Regions of the Bloch sphere and the cones they generate in Herm(2).

A 2×2 hermitian matrix is written ``c·1 + v·σ`` with ``c = tr(a)/2`` and
``v ∈ R³``; rank-one projectors are ``(1 + d·σ)/2`` for unit ``d``.  A region
``K`` of unit vectors generates the cone ``{c·1 + r·d·σ : r ≥ 0, d ∈ K}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import cKDTree

from ..errors import InputError

__all__ = [
    "PAULI",
    "BlochRegion",
    "bloch_vector",
    "from_bloch",
    "projector",
    "rotation_from_unitary",
    "fibonacci_sphere",
    "grid_resolution",
    "angle_between",
]

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)

MAX_NORMALS = 32


def bloch_vector(a: np.ndarray) -> tuple[float, np.ndarray]:
    """Return ``(c, v)`` with ``a = c·1 + v·σ``."""
    a = np.asarray(a)
    if a.shape != (2, 2):
        raise InputError(f"expected a 2x2 matrix, got shape {a.shape}")
    c = float(np.real(a[0, 0] + a[1, 1])) / 2
    v = np.array([np.real(a[0, 1] + a[1, 0]) / 2,
                  np.real(1j * (a[0, 1] - a[1, 0])) / 2,
                  np.real(a[0, 0] - a[1, 1]) / 2])
    return c, v


def from_bloch(c: float, v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return c * np.eye(2, dtype=complex) + np.tensordot(v, PAULI, axes=1)


def projector(d) -> np.ndarray:
    d = _unit(d)
    return from_bloch(0.5, 0.5 * d)


def rotation_from_unitary(u: np.ndarray) -> np.ndarray:
    """``R ∈ SO(3)`` with ``u (d·σ) u* = (R d)·σ``."""
    u = np.asarray(u, dtype=complex)
    R = np.empty((3, 3))
    for j in range(3):
        _, R[:, j] = bloch_vector(u @ PAULI[j] @ u.conj().T)
    return R


def _cross(a, b) -> np.ndarray:
    # np.cross carries heavy per-call overhead for single 3-vectors
    return np.array([a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]])


def angle_between(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    # atan2 form stays accurate near 0 and π
    return float(np.arctan2(np.linalg.norm(_cross(a, b)), np.dot(a, b)))


def fibonacci_sphere(m: int) -> np.ndarray:
    """``m`` nearly uniform unit vectors (golden-angle spiral)."""
    i = np.arange(m) + 0.5
    z = 1 - 2 * i / m
    r = np.sqrt(np.clip(1 - z * z, 0, None))
    phi = np.pi * (1 + 5 ** 0.5) * i
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def grid_resolution(points: np.ndarray) -> float:
    """Largest nearest-neighbour angle of a point set on the sphere."""
    if len(points) < 2:
        return float(np.pi)
    dist, _ = cKDTree(points).query(points, k=2)
    chord = float(dist[:, 1].max())
    return 2 * float(np.arcsin(min(1.0, chord / 2)))


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.shape != (3,) or not np.all(np.isfinite(v)):
        raise InputError("expected a finite 3-vector")
    n = np.linalg.norm(v)
    if n == 0:
        raise InputError("zero vector has no direction")
    # leave already-unit input untouched so serialization round trips exactly
    return v if abs(n - 1) <= 4 * np.finfo(float).eps else v / n


@dataclass(frozen=True, eq=False)
class BlochRegion:
    """Geodesically convex region of the unit sphere.

    ``kind`` is ``"cap"`` (center and half-angle), ``"polygon"`` (intersection
    of closed hemispheres ``{d : n_i·d ≥ 0}``) or ``"sphere"``.  Use the
    class-method constructors; they normalize inputs and reject empty
    interiors.  A cap wider than a hemisphere generates all of Herm(2) and
    becomes ``"sphere"``.
    """

    kind: str
    center: np.ndarray | None = None
    angle: float | None = None
    normals: np.ndarray | None = None

    @classmethod
    def cap(cls, center, angle: float) -> "BlochRegion":
        angle = float(angle)
        if not (0 < angle <= np.pi):
            raise InputError(f"cap angle must lie in (0, π], got {angle}")
        if angle > np.pi / 2:
            return cls.sphere()
        return cls("cap", center=_unit(center), angle=angle)

    @classmethod
    def polygon(cls, normals) -> "BlochRegion":
        ns = np.asarray(normals, dtype=float)
        if ns.size == 0:
            return cls.sphere()
        ns = ns.reshape(-1, 3)
        if len(ns) > MAX_NORMALS:
            raise InputError(f"at most {MAX_NORMALS} hemispheres, got {len(ns)}")
        ns = np.array([_unit(n) for n in ns])
        region = cls("polygon", normals=ns)
        if region._chebyshev()[1] <= 1e-9:
            raise InputError("polygon has empty interior")
        return region

    @classmethod
    def sphere(cls) -> "BlochRegion":
        return cls("sphere")

    # geometry -----------------------------------------------------------
    def _chebyshev(self) -> tuple[np.ndarray, float]:
        return self._chebyshev_cached

    @cached_property
    def _chebyshev_cached(self) -> tuple[np.ndarray, float]:
        # max s  s.t.  n_i·v ≥ s,  -1 ≤ v ≤ 1
        m = len(self.normals)
        A = np.hstack([-self.normals, np.ones((m, 1))])
        res = linprog([0, 0, 0, -1], A_ub=A, b_ub=np.zeros(m),
                      bounds=[(-1, 1)] * 3 + [(None, 1)], method="highs")
        if res.status != 0:
            return np.zeros(3), 0.0
        v = res.x[:3]
        nv = np.linalg.norm(v)
        if nv < 1e-12:
            return np.zeros(3), 0.0
        d = v / nv
        return d, float(np.min(self.normals @ d))

    @property
    def is_full(self) -> bool:
        return self.kind == "sphere"

    @property
    def antipodal(self) -> bool:
        """True if the region contains some pair ``d, -d``."""
        if self.kind == "sphere":
            return True
        if self.kind == "cap":
            return self.angle >= np.pi / 2
        return np.linalg.matrix_rank(self.normals, tol=1e-10) < 3

    def interior_point(self) -> np.ndarray:
        if self.kind == "sphere":
            return np.array([0.0, 0.0, 1.0])
        if self.kind == "cap":
            return self.center.copy()
        return self._chebyshev()[0]

    def margin(self, v) -> float:
        """Signed margin of the Bloch vector ``v`` w.r.t. the generated cone.

        Positive inside, negative outside; the magnitude is the Euclidean
        distance to the boundary of ``R₊K`` (cap) or the smallest hemisphere
        slack (polygon).
        """
        v = np.asarray(v, dtype=float)
        if self.kind == "sphere":
            return np.inf
        if self.kind == "polygon":
            return float(np.min(self.normals @ v))
        r = float(np.linalg.norm(v))
        if r == 0:
            return 0.0
        theta = angle_between(v, self.center)
        if theta - self.angle >= np.pi / 2:
            return -r
        return r * float(np.sin(self.angle - theta))

    def contains(self, d, tol: float = 1e-9) -> bool:
        return self.margin(_unit(d)) >= -tol

    def min_dot(self, w) -> float:
        """``min {w·d : d ∈ K}``, computed exactly."""
        w = np.asarray(w, dtype=float)
        nw = float(np.linalg.norm(w))
        if self.kind == "sphere":
            return -nw
        if nw == 0:
            return 0.0
        if self.kind == "cap":
            theta = angle_between(w, self.center)
            return nw * float(np.cos(min(theta + self.angle, np.pi)))
        return min(w @ d for d in self._critical_points(w))

    def _critical_points(self, w: np.ndarray) -> list[np.ndarray]:
        # Minimisers of a linear function on the region: free critical point,
        # one per active great circle, and the vertices.
        ns = self.normals
        inside = lambda d: bool(np.all(ns @ d >= -1e-12))
        cands = []
        d = -w / np.linalg.norm(w)
        if inside(d):
            cands.append(d)
        for i, n in enumerate(ns):
            t = w - (w @ n) * n
            nt = np.linalg.norm(t)
            if nt > 1e-14:
                d = -t / nt
                if inside(d):
                    cands.append(d)
            else:
                # w ∥ n: w·d vanishes on the whole circle
                for d in _circle(n, 360):
                    if inside(d):
                        cands.append(d)
                        break
        for i in range(len(ns)):
            for j in range(i + 1, len(ns)):
                c = _cross(ns[i], ns[j])
                nc = np.linalg.norm(c)
                if nc < 1e-14:
                    continue
                for d in (c / nc, -c / nc):
                    if inside(d):
                        cands.append(d)
        if not cands:
            cands.append(self.interior_point())
        return cands

    def sample(self, rng: np.random.Generator, shrink: float = 0.95) -> np.ndarray:
        """Random unit vector strictly inside the region."""
        if self.kind == "sphere":
            d = rng.normal(size=3)
            return d / np.linalg.norm(d)
        if self.kind == "cap":
            a = shrink * self.angle
            z = rng.uniform(np.cos(a), 1.0)
            phi = rng.uniform(0, 2 * np.pi)
            s = np.sqrt(max(0.0, 1 - z * z))
            e1, e2 = _frame(self.center)
            return z * self.center + s * (np.cos(phi) * e1 + np.sin(phi) * e2)
        p, slack = self._chebyshev()
        floor = (1 - shrink) * slack
        for _ in range(200):
            d = rng.normal(size=3)
            d /= np.linalg.norm(d)
            if np.min(self.normals @ d) > floor:
                return d
        for _ in range(200):
            d = p + rng.uniform(0, 1) * rng.normal(size=3)
            d /= np.linalg.norm(d)
            if np.min(self.normals @ d) > floor:
                return d
        return p

    def rotated(self, R: np.ndarray) -> "BlochRegion":
        if self.kind == "sphere":
            return self
        if self.kind == "cap":
            return BlochRegion("cap", center=R @ self.center, angle=self.angle)
        return BlochRegion("polygon", normals=self.normals @ R.T)

    def conjugated(self, u: np.ndarray | None) -> "BlochRegion":
        """Region for the cone ``u I_K u*``."""
        return self if u is None else self.rotated(rotation_from_unitary(u))

    def to_dict(self) -> dict:
        if self.kind == "sphere":
            return {"kind": "full"}
        if self.kind == "cap":
            return {"kind": "cap", "center": self.center.tolist(), "angle": self.angle}
        return {"kind": "polygon", "normals": self.normals.tolist()}

    def __eq__(self, other) -> bool:
        if not isinstance(other, BlochRegion) or other.kind != self.kind:
            return False
        if self.kind == "cap":
            return np.allclose(self.center, other.center) and np.isclose(self.angle, other.angle)
        if self.kind == "polygon":
            return self.normals.shape == other.normals.shape and np.allclose(self.normals, other.normals)
        return True

    __hash__ = None

    def __repr__(self) -> str:
        if self.kind == "cap":
            return f"BlochRegion.cap({self.center.round(6).tolist()}, {self.angle:.6g})"
        if self.kind == "polygon":
            return f"BlochRegion.polygon({len(self.normals)} hemispheres)"
        return "BlochRegion.sphere()"


def _frame(c: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    t = np.array([1.0, 0, 0]) if abs(c[0]) < 0.9 else np.array([0, 1.0, 0])
    e1 = _cross(c, t)
    e1 /= np.linalg.norm(e1)
    return e1, _cross(c, e1)


def _circle(n: np.ndarray, m: int) -> np.ndarray:
    e1, e2 = _frame(n)
    t = np.linspace(0, 2 * np.pi, m, endpoint=False)
    return np.outer(np.cos(t), e1) + np.outer(np.sin(t), e2)
