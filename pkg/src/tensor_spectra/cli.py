"""Command-line front end for counting, solving, and approximating.

Usage sketch::

    tensor-spectra count 3 3 3                 # exact tuple count -> 37
    tensor-spectra count --partition 3 / 3     # block-symmetric count -> 7
    tensor-spectra count --pencil 3 3          # pencil eigenvector count -> 12
    tensor-spectra table --format csv         # regenerate the reference table
    tensor-spectra gen 2 2 2 --seed 7 --field complex -o T.json
    tensor-spectra solve T.json --seed 7       # enumerate singular tuples
    tensor-spectra solve-partial T.json --omega 2 1 --symmetrize
    tensor-spectra rank1 T.json --restarts 32
    tensor-spectra rank1-sym T.json --omega 3 --symmetrize
    tensor-spectra rankr T.json --r 2 2 2
    tensor-spectra pencil 3 3                  # cyclic-matrix pencil spectrum
    tensor-spectra verify-diagonal             # re-check the 3x3x3 table

Machine output is JSON on stdout (the seed is always echoed so runs can be
reproduced); text and CSV renderings are for humans.  Exit codes: 0 success
(including honestly-reported incomplete searches), 1 verification mismatch,
2 bad input, 3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from . import approx, counts, spectra
from . import tensor as tz

# ======================================================================
# shared plumbing
# ======================================================================


@dataclass
class RunConfig:
    """Knobs shared by the solver-style subcommands (defaults documented)."""

    seed: int = 0
    restarts: Optional[int] = None
    tol: float = 1e-10
    fmt: str = "json"
    cap: int = 100


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2))


def _load(path: str) -> tz.DenseTensor:
    try:
        return tz.load_tensor(path)
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ValueError(f"cannot read tensor file {path!r}: {exc}") from exc


def _partition_for(dims: Sequence[int], omega: Sequence[int]) -> counts.Partition:
    """Group dims into blocks of sizes omega; all dims in a block must agree."""
    omega = tuple(int(w) for w in omega)
    if any(w < 1 for w in omega) or sum(omega) != len(dims):
        raise ValueError(f"partition {omega} does not cover {len(dims)} modes")
    mprime = []
    pos = 0
    for w in omega:
        block = dims[pos:pos + w]
        if len(set(block)) != 1:
            raise ValueError(
                f"modes {pos}..{pos + w - 1} have dims {tuple(block)}; "
                f"a symmetry block needs equal dims"
            )
        mprime.append(block[0])
        pos += w
    return counts.Partition(omega, tuple(mprime))


def _solver_payload(path: str, T: tz.DenseTensor, cfg: RunConfig) -> dict:
    return {
        "input": path,
        "dims": list(T.dims),
        "seed": cfg.seed,
        "tol": cfg.tol,
    }


# ======================================================================
# subcommands
# ======================================================================


def cmd_count(args: argparse.Namespace) -> int:
    chosen = sum(1 for x in (args.dims, args.partition, args.pencil) if x)
    if chosen != 1:
        raise ValueError("give dims, or --partition, or --pencil (exactly one)")
    if args.dims:
        dims = tuple(int(x) for x in args.dims)
        n = counts.singular_tuple_count(dims)
        payload = {"dims": list(dims), "count": n}
    elif args.partition:
        toks = list(args.partition)
        if "/" not in toks:
            raise ValueError("--partition wants OMEGA tokens, a '/', then DIM tokens")
        cut = toks.index("/")
        try:
            omega = tuple(int(t) for t in toks[:cut])
            mprime = tuple(int(t) for t in toks[cut + 1:])
        except ValueError as exc:
            raise ValueError(f"non-integer token in --partition: {exc}") from exc
        part = counts.Partition(omega, mprime)
        n = counts.partial_symmetric_count(part)
        payload = {"omega": list(omega), "mprime": list(mprime), "count": n}
    else:
        m, d = (int(x) for x in args.pencil)
        n = counts.pencil_eigen_count(m, d)
        payload = {"m": m, "d": d, "count": n}
    if args.format == "json":
        _emit(payload)
    else:
        print(payload["count"])
    return 0


def cmd_table(args: argparse.Namespace) -> int:
    rows = [(dims, counts.singular_tuple_count(dims), expected)
            for dims, expected in counts.REFERENCE_COUNTS]
    bad = [(dims, got, expected) for dims, got, expected in rows if got != expected]
    if args.format == "csv":
        print("m1,m2,m3,count")
        for dims, got, _ in rows:
            print(f"{dims[0]},{dims[1]},{dims[2]},{got}")
    elif args.format == "json":
        _emit([{"dims": list(dims), "count": got} for dims, got, _ in rows])
    else:
        print(" m1 m2 m3   count")
        for dims, got, _ in rows:
            print(f" {dims[0]:2d} {dims[1]:2d} {dims[2]:2d} {got:7d}")
    if bad:
        for dims, got, expected in bad:
            print(f"MISMATCH at {dims}: computed {got}, expected {expected}",
                  file=sys.stderr)
        return 1
    return 0


def _run_cfg(args: argparse.Namespace) -> RunConfig:
    return RunConfig(seed=args.seed, restarts=args.restarts, tol=args.tol,
                     cap=getattr(args, "cap", 100))


def cmd_solve(args: argparse.Namespace) -> int:
    T = _load(args.tensor)
    cfg = _run_cfg(args)
    rep = spectra.solve_all(T, spectra.SolveConfig(
        seed=cfg.seed, restarts=cfg.restarts, tol=cfg.tol, cap=cfg.cap))
    payload = _solver_payload(args.tensor, T, cfg)
    payload.update(rep.to_json_dict())
    _emit(payload)
    return 0


def cmd_solve_partial(args: argparse.Namespace) -> int:
    T = _load(args.tensor)
    part = _partition_for(T.dims, args.omega)
    if args.symmetrize:
        T = tz.partial_symmetrize(T, part)
    cfg = _run_cfg(args)
    rep = spectra.solve_all_partial(T, part, spectra.SolveConfig(
        seed=cfg.seed, restarts=cfg.restarts, tol=cfg.tol, cap=cfg.cap))
    payload = _solver_payload(args.tensor, T, cfg)
    payload["omega"] = list(part.omega)
    payload.update(rep.to_json_dict())
    _emit(payload)
    return 0


def cmd_rank1(args: argparse.Namespace) -> int:
    T = _load(args.tensor)
    cfg = _run_cfg(args)
    res = approx.best_rank_one(T, seed=cfg.seed, restarts=cfg.restarts or 32,
                               tol=cfg.tol)
    payload = _solver_payload(args.tensor, T, cfg)
    payload.update(res.to_json_dict())
    _emit(payload)
    return 0


def cmd_rank1_sym(args: argparse.Namespace) -> int:
    T = _load(args.tensor)
    part = _partition_for(T.dims, args.omega)
    if args.symmetrize:
        T = tz.partial_symmetrize(T, part)
    cfg = _run_cfg(args)
    res = approx.best_rank_one_symmetric(T, part, seed=cfg.seed,
                                         restarts=cfg.restarts or 32,
                                         tol=cfg.tol)
    payload = _solver_payload(args.tensor, T, cfg)
    payload["omega"] = list(part.omega)
    payload.update(res.to_json_dict())
    _emit(payload)
    return 0


def cmd_rankr(args: argparse.Namespace) -> int:
    T = _load(args.tensor)
    res = approx.best_rank_r(T, args.r, seed=args.seed, tol=args.tol)
    payload = {"input": args.tensor, "dims": list(T.dims), "seed": args.seed,
               "r": [int(v) for v in args.r]}
    payload.update(res.to_json_dict())
    _emit(payload)
    return 0


def cmd_pencil(args: argparse.Namespace) -> int:
    m, d = args.m, args.d
    if args.matrix:
        B = _load(args.matrix)
        if B.order != 2 or B.dims != (m, m):
            raise ValueError(f"--matrix must hold a {m}x{m} matrix, got dims {B.dims}")
        Bmat = B.array
    else:
        Bmat = spectra.cyclic_permutation(m)
    pairs = spectra.pencil_eigs_almost_diagonal(np.eye(m), Bmat, d)
    payload = {
        "m": m,
        "d": d,
        "expected": counts.pencil_eigen_count(m, d),
        "found": len(pairs),
        "eigenpairs": [
            {
                "lambda": [float(lam.real), float(lam.imag)],
                "vector": [[float(c.real), float(c.imag)] for c in v],
            }
            for lam, v in pairs
        ],
    }
    _emit(payload)
    return 0 if payload["found"] == payload["expected"] else 1


def cmd_verify_diagonal(args: argparse.Namespace) -> int:
    worst = spectra.verify_diagonal_333()
    rows = spectra.enumerate_diagonal_333()
    payload = {
        "rows": len(rows),
        "max_residual_exact": worst,
        "max_residual_polished": max(r.residual for r in rows),
        "ok": len(rows) == 37,
    }
    _emit(payload)
    return 0 if payload["ok"] else 1


def cmd_gen(args: argparse.Namespace) -> int:
    T = tz.random(tuple(args.dims), seed=args.seed, field=args.field)
    if args.out:
        tz.save_tensor(T, args.out)
        _emit({"written": args.out, "dims": list(T.dims), "seed": args.seed,
               "field": args.field})
    else:
        _emit(tz.to_json_dict(T))
    return 0


# ======================================================================
# parser
# ======================================================================


def _add_solver_flags(p: argparse.ArgumentParser, with_cap: bool = False) -> None:
    p.add_argument("--seed", type=int, default=0, help="base RNG seed (default 0)")
    p.add_argument("--restarts", type=int, default=None,
                   help="restart budget (default: solver-specific)")
    p.add_argument("--tol", type=float, default=1e-10,
                   help="acceptance residual tolerance (default 1e-10)")
    if with_cap:
        p.add_argument("--cap", type=int, default=100,
                       help="refuse enumeration when the expected count exceeds this")


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    ap = argparse.ArgumentParser(
        prog="tensor-spectra",
        description="Singular-tuple counting, solving, and low-rank approximation.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", help="exact counts (plain, block-symmetric, pencil)")
    p.add_argument("dims", nargs="*", type=int, help="mode dimensions, e.g. 3 3 3")
    p.add_argument("--partition", nargs="+", metavar="TOK",
                   help="block sizes, then '/', then block dims: 2 1 / 2 3")
    p.add_argument("--pencil", nargs=2, metavar=("M", "D"), type=int,
                   help="matrix size and tensor order for the pencil count")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("table", help="regenerate the reference count table")
    p.add_argument("--format", choices=("text", "csv", "json"), default="text")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("solve", help="enumerate singular tuples of a tensor file")
    p.add_argument("tensor", help="tensor JSON file")
    _add_solver_flags(p, with_cap=True)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("solve-partial",
                       help="enumerate block-symmetric tuples of a tensor file")
    p.add_argument("tensor", help="tensor JSON file")
    p.add_argument("--omega", nargs="+", type=int, required=True,
                   help="block sizes, e.g. --omega 2 1")
    p.add_argument("--symmetrize", action="store_true",
                   help="project the input onto the symmetry class first")
    _add_solver_flags(p, with_cap=True)
    p.set_defaults(func=cmd_solve_partial)

    p = sub.add_parser("rank1", help="best rank-one approximation (real tensor)")
    p.add_argument("tensor", help="tensor JSON file")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_rank1)

    p = sub.add_parser("rank1-sym",
                       help="block-symmetric best rank-one approximation")
    p.add_argument("tensor", help="tensor JSON file")
    p.add_argument("--omega", nargs="+", type=int, required=True)
    p.add_argument("--symmetrize", action="store_true")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_rank1_sym)

    p = sub.add_parser("rankr", help="best rank-(r1..rd) approximation")
    p.add_argument("tensor", help="tensor JSON file")
    p.add_argument("--r", nargs="+", type=int, required=True,
                   help="target mode ranks, e.g. --r 2 2 2")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-12)
    p.set_defaults(func=cmd_rankr)

    p = sub.add_parser("pencil", help="pencil spectrum for the cyclic example")
    p.add_argument("m", type=int, help="matrix size")
    p.add_argument("d", type=int, help="tensor order")
    p.add_argument("--matrix", help="optional m x m matrix JSON (tensor format)")
    p.set_defaults(func=cmd_pencil)

    p = sub.add_parser("verify-diagonal", help="re-verify the 3x3x3 diagonal table")
    p.set_defaults(func=cmd_verify_diagonal)

    p = sub.add_parser("gen", help="emit a seeded random tensor file")
    p.add_argument("dims", nargs="+", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--field", choices=("real", "complex"), default="real")
    p.add_argument("-o", "--out", help="output path (default: stdout)")
    p.set_defaults(func=cmd_gen)

    return ap.parse_args(argv)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = parse_args(argv)
    try:
        return args.func(args)
    except spectra.CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (spectra.InvariantViolation, RuntimeError, AssertionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
