"""Grow a finite generator set under the isocone closure operations.

The cone generated by a pool ``G`` is ``{Σ λ_i g_i + c·1 : λ ≥ 0}``.  Each
round enlarges the pool with sums, nonnegative combinations, isotone
functional calculus, spectral projections and projection lattice operations,
then asks (by nonnegative least squares) whether the negatives of the
original generators are already reachable.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import nnls

from ..errors import InputError
from ..herm import (
    IsotoneFunction,
    apply_function,
    as_hermitian,
    commutator_norm,
    eig_hermitian,
    hermitian_to_real,
    proj_join,
    proj_meet,
    real_to_hermitian,
)
from .cones import Membership, layer_cake, verdict

__all__ = ["SaturationConfig", "RoundRecord", "SaturationReport", "ConeOracle", "saturate", "conic_residual"]


@dataclass(frozen=True)
class SaturationConfig:
    max_rounds: int = 12
    seed: int = 0
    pool_cap: int = 300
    combos_per_round: int = 40
    functions_per_round: int = 40
    projection_pairs: int = 30
    perturbations: int = 40
    feasibility_tol: float = 1e-7
    dedup_tol: float = 1e-6
    time_budget: float | None = None


@dataclass
class RoundRecord:
    round: int
    pool_size: int
    span_dim: int
    negatives_feasible: list[bool]
    basis_feasible: bool
    max_residual: float

    def to_dict(self) -> dict:
        return {
            "round": self.round,
            "pool_size": self.pool_size,
            "span_dim": self.span_dim,
            "negatives_feasible": self.negatives_feasible,
            "basis_feasible": self.basis_feasible,
            "max_residual": self.max_residual,
        }


@dataclass
class SaturationReport:
    N: int
    real_dim: int
    rounds: list[RoundRecord] = field(default_factory=list)
    trivial: bool = False
    elapsed: float = 0.0
    pool: list[np.ndarray] = field(default_factory=list, repr=False)

    @property
    def span_dim(self) -> int:
        return self.rounds[-1].span_dim if self.rounds else 0

    @property
    def status(self) -> str:
        return "triviality witnessed" if self.trivial else "not saturated within budget"

    def oracle(self, tol: float = 1e-7) -> "ConeOracle":
        return ConeOracle(self.pool, self.N, tol)

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "real_dim": self.real_dim,
            "span_dim": self.span_dim,
            "trivial": self.trivial,
            "status": self.status,
            "elapsed": round(self.elapsed, 3),
            "rounds": [r.to_dict() for r in self.rounds],
        }


def conic_residual(columns: np.ndarray, target: np.ndarray) -> float:
    """Relative residual of ``min ‖Mλ - t‖`` over ``λ ≥ 0``."""
    _, res = nnls(columns, target, maxiter=50 * columns.shape[1] + 100)
    return float(res) / max(1.0, float(np.linalg.norm(target)))


class ConeOracle:
    """Membership in the cone generated by a pool plus the constants (Herm(N) only)."""

    def __init__(self, pool: list[np.ndarray], N: int, tol: float = 1e-7):
        self.N = N
        self.tol = tol
        ident = hermitian_to_real(np.eye(N, dtype=complex))
        cols = [hermitian_to_real(g) for g in pool] + [ident, -ident]
        self.columns = np.array(cols).T

    def residual(self, a: np.ndarray) -> float:
        return conic_residual(self.columns, hermitian_to_real(np.asarray(a, dtype=complex)))

    def decide(self, a, tol: float | None = None) -> Membership:
        m = a.embed() if hasattr(a, "embed") else a
        # least-squares residuals cannot certify below the feasibility tolerance
        t = max(tol or 0.0, self.tol)
        r = self.residual(m)
        return Membership.INSIDE if r <= t else verdict(-r, t)


def _normalize(a: np.ndarray) -> np.ndarray | None:
    # traceless part scaled to unit Frobenius norm; None for scalars
    n = a.shape[0]
    t = a - (np.trace(a).real / n) * np.eye(n)
    nrm = np.linalg.norm(t)
    if nrm < 1e-10:
        return None
    return t / nrm


def _is_projection(a: np.ndarray, tol: float = 1e-8) -> bool:
    return np.linalg.norm(a @ a - a) <= tol


class _Pool:
    def __init__(self, N: int, cap: int, dedup_tol: float, rng: np.random.Generator):
        self.N = N
        self.cap = cap
        self.tol = dedup_tol
        self.rng = rng
        self.items: list[np.ndarray] = []
        self.vecs: list[np.ndarray] = []
        self.is_proj: list[bool] = []
        self.n_fixed = 0
        self.scores = np.zeros(0)

    def add(self, a: np.ndarray, projection: bool = False) -> bool:
        g = _normalize(a)
        if g is None:
            return False
        v = hermitian_to_real(g)
        if self.vecs:
            d = np.linalg.norm(np.array(self.vecs) - v, axis=1)
            if d.min() < self.tol:
                return False
        self.items.append(g)
        self.vecs.append(v)
        self.is_proj.append(projection or _is_projection(a))
        return True

    def projections(self) -> list[np.ndarray]:
        # stored items are normalized; rebuild the projection from its top eigenspace
        return [layer_cake(g).projections[-1] for g, p in zip(self.items, self.is_proj) if p]

    def rescore(self, directions: list[np.ndarray]):
        if directions:
            self.scores = np.max(np.array(self.vecs) @ np.array(directions).T, axis=1)
        else:
            self.scores = np.zeros(len(self.items))

    def pick(self, rng: np.random.Generator, among: list[int] | None = None) -> int:
        idx = np.arange(len(self.items)) if among is None else np.asarray(among)
        if len(self.scores) == len(self.items) and rng.random() < 0.5:
            top = idx[np.argsort(-self.scores[idx])[: max(1, len(idx) // 5)]]
            return int(rng.choice(top))
        return int(rng.choice(idx))

    def trim(self):
        if len(self.items) <= self.cap:
            return
        fixed = list(range(self.n_fixed))
        rest = np.arange(self.n_fixed, len(self.items))
        room = self.cap - self.n_fixed
        order = rest[np.argsort(-self.scores[rest])]
        best = order[: room // 2].tolist()
        others = order[room // 2:]
        lucky = self.rng.choice(others, room - len(best), replace=False).tolist()
        keep = fixed + sorted(best + lucky)
        self.items = [self.items[i] for i in keep]
        self.vecs = [self.vecs[i] for i in keep]
        self.is_proj = [self.is_proj[i] for i in keep]
        self.scores = self.scores[keep]

    def columns(self) -> np.ndarray:
        ident = hermitian_to_real(np.eye(self.N, dtype=complex))
        return np.array(self.vecs + [ident, -ident]).T

    def span_dim(self) -> int:
        ident = hermitian_to_real(np.eye(self.N, dtype=complex))
        return int(np.linalg.matrix_rank(np.array(self.vecs + [ident]), tol=1e-8))


def _residual(cols: np.ndarray, target: np.ndarray) -> tuple[float, np.ndarray]:
    lam, _ = nnls(cols, target, maxiter=50 * cols.shape[1] + 100)
    r = target - cols @ lam
    return float(np.linalg.norm(r)) / max(1.0, float(np.linalg.norm(target))), r


def _combo(rng: np.random.Generator, pool: "_Pool") -> np.ndarray:
    n = len(pool.items)
    k = int(rng.integers(2, min(5, n) + 1)) if n > 1 else 1
    idx = {pool.pick(rng) for _ in range(k)}
    return sum(rng.exponential() * pool.items[i] for i in idx)


def _lattice_ops(p: np.ndarray, q: np.ndarray, rng: np.random.Generator) -> list[np.ndarray]:
    if commutator_norm(p, q) <= 1e-9:
        return [proj_meet(p, q).matrix, proj_join(p, q).matrix]
    out = []
    for t in (0.5, float(rng.uniform(0.05, 0.95))):
        out.extend(layer_cake(t * p + (1 - t) * q).projections)
    return out


def saturate(generators, cfg: SaturationConfig | None = None) -> SaturationReport:
    """Saturate ``generators`` (hermitian ``N×N`` matrices) and report progress per round.

    Triviality is witnessed when the pool spans Herm(N), every ``-g`` is
    conically feasible, and so is ``±e`` for every element ``e`` of the
    standard real basis of Herm(N).

    Candidates are generated at random; when the pool is trimmed, elements
    pointing along the current infeasibility residuals are kept first, so
    growth is steered toward the targets that are still out of reach.
    """
    cfg = cfg or SaturationConfig()
    gens = [as_hermitian(g, name="generator") for g in generators]
    if not gens:
        raise InputError("at least one generator required")
    N = gens[0].shape[0]
    if N < 2 or any(g.shape != (N, N) for g in gens):
        raise InputError("generators must share one size N >= 2")
    rng = np.random.default_rng(cfg.seed)
    pool = _Pool(N, cfg.pool_cap, cfg.dedup_tol, rng)
    for g in gens:
        pool.add(g)
    pool.n_fixed = len(pool.items)
    report = SaturationReport(N=N, real_dim=N * N)
    basis = [real_to_hermitian(e, N) for e in np.eye(N * N)]
    targets = [hermitian_to_real(-g) for g in gens]
    start = time.perf_counter()

    def check():
        cols = pool.columns()
        out = [_residual(cols, t) for t in targets]
        return [r for r, _ in out], [v / np.linalg.norm(v) for r, v in out if r > cfg.feasibility_tol]

    if not pool.items:
        # only scalars: nothing to grow
        report.rounds.append(RoundRecord(1, 0, 1, [True] * len(gens), N == 1, 0.0))
        report.elapsed = time.perf_counter() - start
        return report

    _, directions = check()
    pool.rescore(directions)
    for rnd in range(1, cfg.max_rounds + 1):
        fresh: list[np.ndarray] = []
        combos = [_combo(rng, pool) for _ in range(cfg.combos_per_round)]
        for _ in range(cfg.combos_per_round // 2):
            fresh.append(pool.items[pool.pick(rng)] + pool.items[pool.pick(rng)])
        fresh.extend(combos)
        for _ in range(cfg.functions_per_round):
            c = combos[int(rng.integers(len(combos)))] if rng.random() < 0.7 else pool.items[pool.pick(rng)]
            dec = eig_hermitian(c)
            w = dec.eigenvalues
            f = IsotoneFunction.random(rng, float(w[0]), float(w[-1]))
            fresh.append(apply_function(f, dec))
        new_proj: list[np.ndarray] = []
        for c in combos:
            new_proj.extend(layer_cake(c).projections)
        proj_idx = [i for i, p in enumerate(pool.is_proj) if p]
        projs = {i: layer_cake(pool.items[i]).projections[-1] for i in proj_idx}
        if len(proj_idx) >= 2:
            for _ in range(cfg.projection_pairs):
                i, j = pool.pick(rng, proj_idx), pool.pick(rng, proj_idx)
                if i != j:
                    new_proj.extend(_lattice_ops(projs[i], projs[j], rng))
        if proj_idx:
            # a projection nudged by a cone element splits its eigenspaces
            # along the compression of that element
            for _ in range(cfg.perturbations):
                P = projs[pool.pick(rng, proj_idx)]
                g = pool.items[pool.pick(rng)]
                eps = 10.0 ** rng.uniform(-3, -1)
                new_proj.extend(layer_cake(P + eps * g).projections)
        for p in new_proj:
            pool.add(p, projection=True)
        for a in fresh:
            pool.add(a)
        pool.rescore(directions)
        pool.trim()

        res, directions = check()
        neg_ok = [r <= cfg.feasibility_tol for r in res]
        span = pool.span_dim()
        basis_ok = False
        if span == N * N and all(neg_ok):
            cols = pool.columns()
            out = [_residual(cols, hermitian_to_real(s * b)) for b in basis for s in (1, -1)]
            bres = [r for r, _ in out]
            basis_ok = max(bres) <= cfg.feasibility_tol
            directions = [v / np.linalg.norm(v) for r, v in out if r > cfg.feasibility_tol]
            res += bres
        pool.rescore(directions)
        report.rounds.append(RoundRecord(rnd, len(pool.items), span, neg_ok, basis_ok, float(max(res))))
        if basis_ok:
            report.trivial = True
            break
        if cfg.time_budget is not None and time.perf_counter() - start > cfg.time_budget:
            break

    report.elapsed = time.perf_counter() - start
    report.pool = list(pool.items)
    return report
