"""Recover the classified form (block poset and inner cones) from a membership oracle."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Callable

import numpy as np

from .algebra import BlockAlgebra, BlockElement
from .errors import AmbiguityError, InconsistencyError, ResourceError
from .herm import DEFAULT_TOL
from .isocone.bloch import BlochRegion, fibonacci_sphere, from_bloch, grid_resolution
from .isocone.cones import ClassifiedIsocone, InnerCone, Membership, MembershipOracle
from .poset import Poset

__all__ = [
    "ClassifyConfig",
    "CapFit",
    "ClassificationResult",
    "VerificationReport",
    "recover_poset",
    "recover_inner",
    "classify",
    "verify_classification",
    "smallest_enclosing_cap",
]

PATTERN_LIMIT = 20


@dataclass(frozen=True)
class ClassifyConfig:
    trials: int = 200
    seed: int = 0
    grid: int = 2562
    tol: float = DEFAULT_TOL.atol
    exhaustive_limit: int = 12
    max_witnesses: int = 10


def _sampler(oracle, cfg_sampler):
    if cfg_sampler is not None:
        return cfg_sampler
    return getattr(oracle, "sample", None)


def _patterns(A: BlockAlgebra):
    for bits in product((0.0, 1.0), repeat=A.k):
        yield bits, A.from_scalars(bits)


def recover_poset(oracle: MembershipOracle, A: BlockAlgebra, cfg: ClassifyConfig | None = None,
                  sampler: Callable | None = None) -> Poset:
    """Block order: ``x ≤ y`` iff every accepted 0/1 block pattern containing ``x`` contains ``y``.

    Accepted patterns are exactly the up-set indicators of the order.  When an
    interior sampler is available (argument or ``oracle.sample``), each
    sampled element must respect ``max σ(a_x) ≤ min σ(a_y)`` on every
    recovered pair; contradictions raise :class:`AmbiguityError`.
    """
    cfg = cfg or ClassifyConfig()
    k = A.k
    if k > PATTERN_LIMIT:
        raise ResourceError(f"pattern enumeration limited to {PATTERN_LIMIT} blocks, got {k}")
    accepted = [bits for bits, a in _patterns(A) if oracle.decide(a, cfg.tol).accepted]
    masks = np.array(accepted, dtype=bool).reshape(-1, k)
    rel = np.ones((k, k), dtype=bool)
    for x in range(k):
        rows = masks[masks[:, x]]
        if len(rows):
            rel[x] = rows.all(axis=0)
    both = rel & rel.T & ~np.eye(k, dtype=bool)
    if both.any():
        pairs = [(int(x) + 1, int(y) + 1) for x, y in np.argwhere(both) if x < y]
        raise AmbiguityError(f"no accepted pattern separates blocks {pairs}", witnesses=pairs)
    P = Poset(rel)

    draw = _sampler(oracle, sampler)
    if draw is not None:
        rng = np.random.default_rng(cfg.seed)
        bad = []
        for _ in range(cfg.trials):
            a = draw(rng)
            b = a.block_bounds()
            t = cfg.tol * max(1.0, a.norm())
            for x, y in P.strict_pairs():
                if b[x][1] > b[y][0] + t:
                    bad.append((x + 1, y + 1, a))
        if bad:
            raise AmbiguityError(
                f"{len(bad)} sampled elements violate recovered relations, first on blocks {bad[0][:2]}",
                witnesses=bad[: cfg.max_witnesses],
            )
    return P


# ---------------------------------------------------------------------------
# Inner cones
# ---------------------------------------------------------------------------


def _cap_from_basis(pts: np.ndarray) -> np.ndarray | None:
    # minimum-norm v with p·v = 1 for the given points
    G = pts @ pts.T
    try:
        y = np.linalg.solve(G, np.ones(len(pts)))
    except np.linalg.LinAlgError:
        return None
    if not np.all(np.isfinite(y)):
        return None
    return pts.T @ y


def smallest_enclosing_cap(points, rng: np.random.Generator | None = None,
                           eps: float = 1e-12) -> tuple[np.ndarray, float] | None:
    """Smallest spherical cap containing unit vectors ``points``.

    Returns ``(center, angle)``, or ``None`` when the points do not lie in
    an open hemisphere (no cap narrower than π/2 contains them).  Solves
    ``min |v|`` subject to ``p·v ≥ 1`` by the randomized incremental
    (move-to-front) method; the cap is ``center = v/|v|``,
    ``cos(angle) = 1/|v|``.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    if len(pts) == 0:
        return None
    rng = rng or np.random.default_rng(0)
    pts = pts[rng.permutation(len(pts))]

    def bad(p, v):
        return v is None or p @ v < 1 - eps

    v = pts[0].copy()
    for i in range(1, len(pts)):
        if not bad(pts[i], v):
            continue
        v = pts[i].copy()
        for j in range(i):
            if not bad(pts[j], v):
                continue
            v = _cap_from_basis(pts[[i, j]])
            for m in range(j):
                if bad(pts[m], v):
                    v = _cap_from_basis(pts[[i, j, m]])
            # the level invariant only fails when no open hemisphere holds the points
            if v is None or np.min(pts[: j + 1] @ v) < 1 - 1e-9 or pts[i] @ v < 1 - 1e-9:
                return None
    if v is None or np.min(pts @ v) < 1 - 1e-9:
        return None
    nv = float(np.linalg.norm(v))
    return v / nv, float(np.arccos(min(1.0, 1 / nv)))


@dataclass
class CapFit:
    accepted: np.ndarray
    grid_size: int
    resolution: float
    center: np.ndarray | None
    angle: float | None

    @property
    def fraction(self) -> float:
        return len(self.accepted) / self.grid_size


def _probe_padding(P: Poset, x: int) -> list[float]:
    pad = []
    for z in range(P.size):
        if P.lt(x, z):
            pad.append(1.0)
        elif P.lt(z, x):
            pad.append(-1.0)
        else:
            pad.append(0.0)
    return pad


def _direction_probe(A: BlockAlgebra, pad: list[float], x: int, d: np.ndarray) -> BlockElement:
    blocks = [c * np.eye(n, dtype=complex) for c, n in zip(pad, A.dims)]
    blocks[x] = from_bloch(0.0, d)
    return BlockElement(A, blocks, _checked=True)


def recover_inner(oracle: MembershipOracle, A: BlockAlgebra, x: int, cfg: ClassifyConfig | None = None,
                  poset: Poset | None = None) -> tuple[InnerCone, CapFit | None]:
    """Inner cone of block ``x``: full unless ``n_x = 2``, else a cap fitted to accepted Bloch directions."""
    cfg = cfg or ClassifyConfig()
    n = A.dims[x]
    if n != 2:
        return InnerCone.full(n), None
    P = poset if poset is not None else recover_poset(oracle, A, cfg)
    pad = _probe_padding(P, x)
    grid = fibonacci_sphere(cfg.grid)
    ok = np.array([oracle.decide(_direction_probe(A, pad, x, d), cfg.tol).accepted for d in grid])
    acc = grid[ok]
    res = grid_resolution(grid)
    if len(acc) == 0:
        raise InconsistencyError(f"no Bloch direction accepted on block {x + 1}")
    if ok.all():
        return InnerCone.full(2), CapFit(acc, len(grid), res, None, None)
    cap = smallest_enclosing_cap(acc, np.random.default_rng(cfg.seed))
    if cap is None:
        return InnerCone.full(2), CapFit(acc, len(grid), res, None, None)
    c, alpha = cap
    return InnerCone.m2(BlochRegion.cap(c, alpha)), CapFit(acc, len(grid), res, c, alpha)


@dataclass
class ClassificationResult:
    algebra: BlockAlgebra
    poset: Poset
    inner: list[InnerCone]
    fits: dict[int, CapFit] = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def isocone(self) -> ClassifiedIsocone:
        return ClassifiedIsocone(self.algebra, self.poset, tuple(self.inner))


def classify(oracle: MembershipOracle, A: BlockAlgebra, cfg: ClassifyConfig | None = None,
             sampler: Callable | None = None) -> ClassificationResult:
    cfg = cfg or ClassifyConfig()
    P = recover_poset(oracle, A, cfg, sampler)
    inner, fits = [], {}
    for x in range(A.k):
        cone, fit = recover_inner(oracle, A, x, cfg, P)
        inner.append(cone)
        if fit is not None:
            fits[x] = fit
    diag = {
        "patterns": 2 ** A.k,
        "grid": cfg.grid,
        "resolution": fits[next(iter(fits))].resolution if fits else None,
        "accepted_fraction": {x + 1: f.fraction for x, f in fits.items()},
    }
    return ClassificationResult(A, P, inner, fits, diag)


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------


@dataclass
class VerificationReport:
    compared: int = 0
    agreed: int = 0
    undecided: int = 0
    witnesses: list = field(default_factory=list)
    disagreements: int = 0

    @property
    def agreement(self) -> float:
        return self.agreed / self.compared if self.compared else 1.0

    @property
    def ok(self) -> bool:
        return self.disagreements == 0

    def to_dict(self) -> dict:
        return {
            "compared": self.compared,
            "agreed": self.agreed,
            "undecided": self.undecided,
            "disagreements": self.disagreements,
            "agreement": self.agreement,
            "witnesses": [
                {"source": s, "oracle": o.value, "candidate": c.value, "element": a.to_lists()}
                for s, a, o, c in self.witnesses
            ],
        }


def verify_classification(oracle: MembershipOracle, candidate: ClassifiedIsocone,
                          cfg: ClassifyConfig | None = None) -> VerificationReport:
    """Compare oracle and candidate on interior, generic, boundary-probing and 0/1 elements.

    A disagreement is one side saying inside while the other says outside;
    pairs involving a boundary verdict are counted as undecided.
    """
    cfg = cfg or ClassifyConfig()
    A = candidate.algebra
    rng = np.random.default_rng(cfg.seed)
    report = VerificationReport()

    def compare(source: str, a: BlockElement):
        o = oracle.decide(a, cfg.tol)
        c = candidate.decide(a, cfg.tol)
        report.compared += 1
        if Membership.BOUNDARY in (o, c) and o is not c:
            report.undecided += 1
        elif o is c:
            report.agreed += 1
        else:
            report.disagreements += 1
            if len(report.witnesses) < cfg.max_witnesses:
                report.witnesses.append((source, a, o, c))

    for _ in range(cfg.trials):
        compare("candidate-interior", candidate.sample(rng))
    draw = getattr(oracle, "sample", None)
    if draw is not None:
        for _ in range(cfg.trials):
            compare("oracle-interior", draw(rng))
    for _ in range(cfg.trials):
        compare("generic", A.random_element(rng, scale=float(rng.uniform(0.1, 3))))
    grid = fibonacci_sphere(min(cfg.grid, 642))
    for x, n in enumerate(A.dims):
        if n != 2:
            continue
        pad = _probe_padding(candidate.poset, x)
        for d in grid:
            compare(f"direction-probe block {x + 1}", _direction_probe(A, pad, x, d))
    if A.k <= cfg.exhaustive_limit:
        for _, a in _patterns(A):
            compare("0/1 pattern", a)
    return report
