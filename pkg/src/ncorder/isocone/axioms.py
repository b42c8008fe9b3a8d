"""Randomized checks of the isocone axioms against a membership oracle.

Each trial draws from ``np.random.default_rng([seed, axiom, trial])`` so a
failure can be replayed from the numbers stored in its counterexample.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..algebra import BlockElement
from ..errors import InputError
from ..herm import DEFAULT_TOL, IsotoneFunction, join, meet
from .cones import Membership, MembershipOracle

__all__ = ["AxiomConfig", "AxiomResult", "AxiomReport", "Counterexample", "check_axioms", "AXIOMS"]

AXIOMS = ("constants", "sums", "isotone", "closed", "span", "commuting_lattice")

Sampler = Callable[[np.random.Generator], BlockElement]


@dataclass(frozen=True)
class AxiomConfig:
    trials: int = 200
    seed: int = 0
    tol: float = DEFAULT_TOL.atol
    rank_tol: float = 1e-8


@dataclass
class Counterexample:
    elements: list[BlockElement]
    rng_seed: tuple[int, int, int]
    verdict: str
    margin: float | None = None
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "elements": [e.to_lists() for e in self.elements],
            "rng_seed": list(self.rng_seed),
            "verdict": self.verdict,
            "margin": self.margin,
            "note": self.note,
        }


@dataclass
class AxiomResult:
    name: str
    status: str  # "pass", "fail" or "untestable"
    trials: int = 0
    counterexample: Counterexample | None = None
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "trials": self.trials,
            "detail": self.detail,
            "counterexample": None if self.counterexample is None else self.counterexample.to_dict(),
        }


@dataclass
class AxiomReport:
    results: dict[str, AxiomResult] = field(default_factory=dict)
    config: AxiomConfig = field(default_factory=AxiomConfig)

    @property
    def passed(self) -> bool:
        return all(r.status != "fail" for r in self.results.values())

    def failures(self) -> list[str]:
        return [n for n, r in self.results.items() if r.status == "fail"]

    def to_dict(self) -> dict:
        return {
            "seed": self.config.seed,
            "trials": self.config.trials,
            "tol": self.config.tol,
            "passed": self.passed,
            "axioms": {n: r.to_dict() for n, r in self.results.items()},
        }


def _margin(oracle, a):
    m = getattr(oracle, "margin", None)
    try:
        return float(m(a)) if m is not None else None
    except Exception:
        return None


def _spectral_range(elems: list[BlockElement]) -> tuple[float, float]:
    lo = min(b[0] for e in elems for b in e.block_bounds())
    hi = max(b[1] for e in elems for b in e.block_bounds())
    return lo, hi


def check_axioms(oracle: MembershipOracle, sampler: Sampler, cfg: AxiomConfig | None = None) -> AxiomReport:
    """Test the closure properties of the set described by ``oracle``.

    ``sampler(rng)`` must return elements the oracle accepts; elements it
    rejects are skipped.  Raises :class:`InputError` if none is accepted.
    """
    cfg = cfg or AxiomConfig()
    report = AxiomReport(config=cfg)

    def rng_for(axiom: int, trial: int) -> tuple[np.random.Generator, tuple[int, int, int]]:
        seed = (int(cfg.seed), axiom, trial)
        return np.random.default_rng(seed), seed

    def draw(rng, tries: int = 20) -> BlockElement | None:
        for _ in range(tries):
            a = sampler(rng)
            if oracle.decide(a, cfg.tol).accepted:
                return a
        return None

    def fail(name, trial, seed, elems, cand, note):
        v = oracle.decide(cand, cfg.tol)
        report.results[name] = AxiomResult(
            name, "fail", trial + 1,
            Counterexample(elems + [cand], seed, v.value, _margin(oracle, cand), note),
        )

    # probe that the sampler is usable, and learn the algebra
    rng, _ = rng_for(99, 0)
    first = draw(rng, 50)
    if first is None:
        raise InputError("sampler produced no element accepted by the oracle")
    A = first.algebra

    # 1. constants
    name = "constants"
    report.results[name] = AxiomResult(name, "pass", cfg.trials)
    for t in range(cfg.trials):
        rng, seed = rng_for(0, t)
        c = float(rng.normal(scale=10.0)) if t else 0.0
        a = A.scalar(c)
        if not oracle.decide(a, cfg.tol).accepted:
            fail(name, t, seed, [], a, f"constant {c}")
            break

    # 2. sums
    name = "sums"
    report.results[name] = AxiomResult(name, "pass", cfg.trials)
    for t in range(cfg.trials):
        rng, seed = rng_for(1, t)
        a, b = draw(rng), draw(rng)
        if a is None or b is None:
            continue
        if not oracle.decide(a + b, cfg.tol).accepted:
            fail(name, t, seed, [a, b], a + b, "a + b")
            break

    # 3. isotone functional calculus
    name = "isotone"
    report.results[name] = AxiomResult(name, "pass", cfg.trials)
    for t in range(cfg.trials):
        rng, seed = rng_for(2, t)
        a = draw(rng)
        if a is None:
            continue
        lo, hi = _spectral_range([a])
        f = IsotoneFunction.random(rng, lo, hi)
        fa = a.apply(f)
        if not oracle.decide(fa, cfg.tol).accepted:
            fail(name, t, seed, [a], fa, f"f knots={f.knots.tolist()} values={f.values.tolist()}")
            break

    report.results["closed"] = AxiomResult("closed", "untestable", 0,
                                           detail="closedness cannot be tested from finitely many samples")

    # 4. span of I - I
    name = "span"
    n = max(cfg.trials, 2 * A.real_dim + 2)
    vecs = []
    for t in range(n):
        rng, _ = rng_for(4, t)
        a = draw(rng)
        if a is not None:
            vecs.append(a.to_real())
    rank = int(np.linalg.matrix_rank(np.array(vecs), tol=cfg.rank_tol)) if vecs else 0
    status = "pass" if rank == A.real_dim else "fail"
    report.results[name] = AxiomResult(name, status, len(vecs), detail=f"rank {rank} of {A.real_dim}")

    # 5. meet and join of commuting elements f(a), g(a)
    name = "commuting_lattice"
    report.results[name] = AxiomResult(name, "pass", cfg.trials)
    for t in range(cfg.trials):
        rng, seed = rng_for(5, t)
        a = draw(rng)
        if a is None:
            continue
        lo, hi = _spectral_range([a])
        f = IsotoneFunction.random(rng, lo, hi)
        g = IsotoneFunction.random(rng, lo, hi)
        fa, ga = a.apply(f), a.apply(g)
        if not (oracle.decide(fa, cfg.tol).accepted and oracle.decide(ga, cfg.tol).accepted):
            # a failure of axiom 3, reported there
            continue
        for label, op in (("join", join), ("meet", meet)):
            c = BlockElement(A, [op(x, y) for x, y in zip(fa.blocks, ga.blocks)], _checked=True)
            if not oracle.decide(c, cfg.tol).accepted:
                fail(name, t, seed, [fa, ga], c, label)
                break
        if report.results[name].status == "fail":
            break

    return report


def accepted(oracle: MembershipOracle, a: BlockElement, tol: float = DEFAULT_TOL.atol) -> bool:
    return oracle.decide(a, tol) is not Membership.OUTSIDE
