"""Command-line front end.

Exit codes: 0 inside / success, 1 outside / check failed, 2 boundary,
64 unreadable or malformed input, 65 input the operation cannot use
(derogatory or outside element, sampler producing nothing).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .algebra import BlockAlgebra, BlockElement
from .classify import ClassifyConfig, _direction_probe, _probe_padding, classify
from .errors import InconsistencyError, InputError, NCOrderError, ResourceError
from .herm import DEFAULT_TOL
from .isocone.axioms import AxiomConfig, check_axioms
from .isocone.bloch import fibonacci_sphere, grid_resolution
from .isocone.saturation import SaturationConfig, saturate
from .order_maps import DensityMatrix, PureState, SpectralFrame, inner_order, pure_state_compare, state_compare
from .spec_io import (
    SpecError,
    dump_cone_spec,
    load_cone_spec,
    load_element,
    load_generators,
    parse_element,
    read_json,
    spec_hash,
)

EX_OK, EX_FAIL, EX_BOUNDARY = 0, 1, 2
EX_USAGE = 64
EX_DATAERR = 65


class _Parser(argparse.ArgumentParser):
    # argparse's own exit status 2 would collide with the boundary verdict
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def _meta(args, spec_path=None, I=None) -> dict:
    meta = {"seed": getattr(args, "seed", None), "tol": args.tol, "gap_tol": DEFAULT_TOL.gap_tol}
    if I is not None:
        meta["spec_sha256"] = spec_hash(I)
    if spec_path is not None:
        meta["spec_path"] = str(spec_path)
    return meta


def _emit(text: str, path: str | None):
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _write_json(doc, path: str | None):
    _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", path)


# ---------------------------------------------------------------------------
# verbs
# ---------------------------------------------------------------------------


def cmd_check(args) -> int:
    I, _ = load_cone_spec(args.spec)
    a = load_element(args.element, I.algebra)
    m = I.margin(a, args.tol * max(1.0, a.norm()))
    v = I.decide(a, args.tol)
    print(f"{v.value} margin={m:.6g}")
    return v.exit_code


def cmd_inner_order(args) -> int:
    I, _ = load_cone_spec(args.spec)
    a = load_element(args.element, I.algebra)
    try:
        frame = SpectralFrame.of(a)
    except InputError as e:
        vals = np.sort(a.spectrum())
        gaps = np.diff(vals)
        print(f"error: {e}", file=sys.stderr)
        print(f"eigenvalues: {vals.tolist()}", file=sys.stderr)
        print(f"smallest gap: {float(gaps.min()) if len(gaps) else float('nan'):.3g}", file=sys.stderr)
        return EX_DATAERR
    try:
        P = inner_order(I, frame, args.tol)
    except (InputError, InconsistencyError, ResourceError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EX_DATAERR
    labels = [f"{i + 1}: {w:.6g}" for i, w in enumerate(frame.eigenvalues)]
    _emit(P.to_dot("inner_order", labels), args.dot)
    return EX_OK


def _saturation_sampler(pool, N):
    A = BlockAlgebra((N,))

    def draw(rng):
        m = float(rng.normal()) * np.eye(N, dtype=complex)
        for i in rng.choice(len(pool), size=min(3, len(pool)), replace=False):
            m = m + rng.exponential() * pool[i]
        return BlockElement(A, [m])

    return draw


def cmd_axioms(args) -> int:
    cfg = AxiomConfig(trials=args.trials, seed=args.seed, tol=args.tol)
    if args.saturation:
        gens = load_generators(args.saturation)
        rep = saturate(gens, SaturationConfig(max_rounds=args.rounds, seed=args.seed))
        oracle = rep.oracle()
        sampler = _saturation_sampler(rep.pool or gens, rep.N)
        meta = _meta(args)
        meta["generators_path"] = args.saturation
    elif args.spec:
        oracle, _ = load_cone_spec(args.spec)
        sampler = oracle.sample
        meta = _meta(args, args.spec, oracle)
    else:
        print("error: give a cone spec or --saturation GENERATORS", file=sys.stderr)
        return EX_USAGE
    try:
        report = check_axioms(oracle, sampler, cfg)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EX_DATAERR
    for name, r in report.results.items():
        extra = f" ({r.detail})" if r.detail else ""
        print(f"{name:18s} {r.status}{extra}")
    if args.report:
        _write_json({**report.to_dict(), "meta": meta}, args.report)
    return EX_OK if report.passed else EX_FAIL


def cmd_saturate(args) -> int:
    gens = load_generators(args.generators)
    rep = saturate(gens, SaturationConfig(max_rounds=args.rounds, seed=args.seed))
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["round", "span_dim", "triviality_witnessed"])
            for r in rep.rounds:
                hit = r.span_dim == rep.real_dim and all(r.negatives_feasible) and r.basis_feasible
                w.writerow([r.round, r.span_dim, str(hit).lower()])
    doc = {**rep.to_dict(), "meta": _meta(args)}
    doc["meta"]["generators_path"] = args.generators
    _write_json(doc, args.report)
    return EX_OK


def cmd_classify(args) -> int:
    I, _ = load_cone_spec(args.spec)
    cfg = ClassifyConfig(trials=args.trials, seed=args.seed, tol=args.tol)
    res = classify(I, I.algebra, cfg)
    meta = _meta(args, args.spec, I)
    meta["grid"] = cfg.grid
    _emit(dump_cone_spec(res.isocone(), meta), args.output)
    return EX_OK


def _load_state(path, A: BlockAlgebra):
    doc = read_json(path)
    if isinstance(doc, dict) and "pure" in doc:
        p = doc["pure"]
        try:
            block = int(p["block"]) - 1
            vec = np.array([complex(*v) if isinstance(v, list) else complex(v) for v in p["vector"]])
        except (KeyError, TypeError, ValueError):
            raise SpecError("pure", "expected {block: int, vector: [...]}") from None
        return PureState(block, vec)
    return DensityMatrix(parse_element(doc, A))


def cmd_state_compare(args) -> int:
    I, _ = load_cone_spec(args.spec)
    s1, s2 = _load_state(args.rho1, I.algebra), _load_state(args.rho2, I.algebra)
    if isinstance(s1, PureState) and isinstance(s2, PureState):
        c = pure_state_compare(I, s1, s2, args.tol)
    else:
        d1 = s1.density(I.algebra) if isinstance(s1, PureState) else s1
        d2 = s2.density(I.algebra) if isinstance(s2, PureState) else s2
        c = state_compare(I, d1, d2, args.tol)
    print(c.value)
    return EX_OK


def cmd_bloch_export(args) -> int:
    I, _ = load_cone_spec(args.spec)
    blocks = [x for x, n in enumerate(I.dims) if n == 2]
    if args.block is not None:
        x = args.block - 1
        if x not in blocks:
            print(f"error: block {args.block} is not a 2x2 block", file=sys.stderr)
            return EX_DATAERR
    elif blocks:
        x = blocks[0]
    else:
        print("error: the cone has no 2x2 block", file=sys.stderr)
        return EX_DATAERR
    grid = fibonacci_sphere(args.samples)
    pad = _probe_padding(I.poset, x)
    rows = [(d, I.decide(_direction_probe(I.algebra, pad, x, d), args.tol).accepted) for d in grid]
    out = open(args.csv, "w", newline="") if args.csv else sys.stdout
    try:
        w = csv.writer(out)
        w.writerow(["x", "y", "z", "accepted"])
        for d, ok in rows:
            w.writerow([f"{d[0]:.12g}", f"{d[1]:.12g}", f"{d[2]:.12g}", int(ok)])
    finally:
        if args.csv:
            out.close()
    frac = sum(ok for _, ok in rows) / len(rows)
    print(f"block {x + 1}: accepted {frac:.4f} of {len(rows)} directions "
          f"(grid resolution {grid_resolution(grid):.4f} rad)", file=sys.stderr)
    return EX_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ncorder", description="Isocones in direct sums of matrix algebras.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def verb(name, fn, help_):
        s = sub.add_parser(name, help=help_)
        s.add_argument("--tol", type=float, default=DEFAULT_TOL.atol, help="relative membership tolerance")
        s.set_defaults(fn=fn)
        return s

    s = verb("check", cmd_check, "membership verdict for an element")
    s.add_argument("spec")
    s.add_argument("element")

    s = verb("inner-order", cmd_inner_order, "Hasse diagram (DOT) of the inner ordering")
    s.add_argument("spec")
    s.add_argument("element")
    s.add_argument("--dot", help="write DOT here instead of stdout")

    s = verb("axioms", cmd_axioms, "randomized axiom checks")
    s.add_argument("spec", nargs="?")
    s.add_argument("--saturation", metavar="GENERATORS", help="check the saturated cone of these generators")
    s.add_argument("--trials", type=int, default=200)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--rounds", type=int, default=12)
    s.add_argument("--report", help="write the JSON report here")

    s = verb("saturate", cmd_saturate, "grow generators under the cone operations")
    s.add_argument("generators")
    s.add_argument("--rounds", type=int, default=50)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--csv", help="per-round CSV of span dimension")
    s.add_argument("--report", help="write the JSON report here instead of stdout")

    s = verb("classify", cmd_classify, "recover the classified form from a cone spec used as oracle")
    s.add_argument("spec")
    s.add_argument("--trials", type=int, default=200)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("-o", "--output", help="write the recovered spec here instead of stdout")

    s = verb("state-compare", cmd_state_compare, "compare two states in the cone's state order")
    s.add_argument("spec")
    s.add_argument("rho1")
    s.add_argument("rho2")

    s = verb("bloch-export", cmd_bloch_export, "accepted Bloch directions of a 2x2 block as CSV")
    s.add_argument("spec")
    s.add_argument("--samples", type=int, default=2562)
    s.add_argument("--block", type=int, help="1-based block index (default: first 2x2 block)")
    s.add_argument("--csv", help="write CSV here instead of stdout")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            warnings.showwarning = lambda msg, cat, *a, **k: print(f"warning: {msg}", file=sys.stderr)
            return args.fn(args)
    except (SpecError, InputError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EX_USAGE
    except NCOrderError as e:
        print(f"error: {e}", file=sys.stderr)
        return EX_DATAERR


if __name__ == "__main__":
    sys.exit(main())
