import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from ncorder.algebra import BlockAlgebra
from ncorder.herm import random_unitary
from ncorder.isocone.bloch import BlochRegion
from ncorder.isocone.cones import ClassifiedIsocone, InnerCone
from ncorder.poset import random_poset

settings.register_profile(
    "ncorder", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("ncorder")


def unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def random_region(rng, polygons=True):
    if polygons and rng.random() < 0.3:
        c = unit(rng.normal(size=3))
        normals = [unit(c + rng.normal(scale=0.6, size=3)) for _ in range(int(rng.integers(3, 6)))]
        try:
            return BlochRegion.polygon(normals)
        except Exception:
            pass
    return BlochRegion.cap(rng.normal(size=3), float(rng.uniform(0.2, 1.4)))


def random_isocone(rng, k_max=4, dims=(1, 2, 3), polygons=True):
    k = int(rng.integers(1, k_max + 1))
    P = random_poset(rng, k)
    ds = tuple(int(rng.choice(dims)) for _ in range(k))
    inner = tuple(
        InnerCone.m2(random_region(rng, polygons)) if n == 2 and rng.random() < 0.8 else InnerCone.full(n)
        for n in ds
    )
    return ClassifiedIsocone(BlockAlgebra(ds), P, inner)


def random_projection(rng, n, r):
    U = random_unitary(rng, n)
    B = U[:, :r]
    return B @ B.conj().T


def generic_pair(rng, n):
    """Two projections with no nontrivial intersections (rank n/2 each)."""
    r = n // 2
    return random_projection(rng, n, r), random_projection(rng, n, r)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def lattice_pair(rng, angle=None):
    """Dimension-4 pair with L∩N⊥, L⊥∩N, L₀, N₀ all one-dimensional and L∩N = 0."""
    U = random_unitary(rng, 4)
    e = [U[:, i] for i in range(4)]
    a = float(rng.uniform(0.2, 1.3)) if angle is None else angle
    L = np.stack([e[0], e[2]], axis=1)
    N = np.stack([e[1], np.cos(a) * e[2] + np.sin(a) * e[3]], axis=1)
    return L @ L.conj().T, N @ N.conj().T
