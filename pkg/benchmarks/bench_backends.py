"""Benchmark the compiled vs pure-numpy solver kernels on one enumeration.

Runs the full multi-start enumeration for a given shape once per backend in
a child process (the backend is frozen when the package is imported), then
reports wall times and the worst deviation between the two solution sets.

Usage:
    python3 benchmarks/bench_backends.py
    python3 benchmarks/bench_backends.py --dims 2 3 3 --seed 1 --repeats 5
"""

import argparse
import json
import os
import subprocess
import sys
import time

# ======================================================================
# child: one backend, one timed enumeration
# ======================================================================


def run_one(dims, seed, repeats, cap) -> dict:
    import tensor_spectra as ts
    from tensor_spectra import _kernels
    from tensor_spectra.spectra import SolveConfig

    T = ts.random(dims, seed=seed, field="complex")
    config = SolveConfig(seed=0, cap=cap)

    t0 = time.perf_counter()
    report = ts.solve_all(T, config)        # first call pays any JIT compile
    warmup = time.perf_counter() - t0

    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        report = ts.solve_all(T, config)
        times.append(time.perf_counter() - t0)

    return {
        "backend": _kernels.BACKEND,
        "warmup_s": warmup,
        "best_s": min(times),
        "mean_s": sum(times) / len(times),
        "found": report.found,
        "restarts_used": report.restarts_used,
        "tuples": [t.to_json_dict() for t in report.tuples],
    }


# ======================================================================
# parent: spawn children, compare
# ======================================================================


def spawn(backend: str, args) -> dict:
    env = dict(os.environ, TENSOR_SPECTRA_BACKEND=backend)
    cmd = [sys.executable, os.path.abspath(__file__), "--child",
           "--dims", *map(str, args.dims), "--seed", str(args.seed),
           "--repeats", str(args.repeats), "--cap", str(args.cap)]
    out = subprocess.run(cmd, env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def max_deviation(res_a: dict, res_b: dict) -> dict:
    import numpy as np

    from tensor_spectra.spectra import projective_distance

    def vectors(t):
        return [np.array([complex(re, im) for re, im in v]) for v in t["vectors"]]

    def lambdas(t):
        return [complex(re, im) for re, im in t["lambdas"]]

    worst_vec = worst_lam = 0.0
    for ta, tb in zip(res_a["tuples"], res_b["tuples"]):
        worst_vec = max(worst_vec, projective_distance(vectors(ta), vectors(tb)))
        worst_lam = max(worst_lam, max(
            abs(la - lb) for la, lb in zip(lambdas(ta), lambdas(tb))))
    return {"vectors": worst_vec, "lambdas": worst_lam}


def parse_args() -> argparse.Namespace:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dims", type=int, nargs="+", default=[3, 3, 3])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--cap", type=int, default=300)
    ap.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    return ap.parse_args()


def main() -> int:
    args = parse_args()
    dims = tuple(args.dims)
    if args.child:
        json.dump(run_one(dims, args.seed, args.repeats, args.cap), sys.stdout)
        return 0

    results = {}
    for backend in ("numpy", "numba"):
        try:
            results[backend] = spawn(backend, args)
        except subprocess.CalledProcessError as exc:
            print(f"{backend}: failed\n{exc.stderr}", file=sys.stderr)

    print(f"shape {'x'.join(map(str, dims))}, tensor seed {args.seed}, "
          f"best of {args.repeats} runs after warmup")
    for backend, res in results.items():
        print(f"  {res['backend']:>6}: warmup {res['warmup_s']:7.3f}s   "
              f"best {res['best_s']:7.3f}s   mean {res['mean_s']:7.3f}s   "
              f"found {res['found']} in {res['restarts_used']} restarts")

    if len(results) == 2:
        a, b = results["numpy"], results["numba"]
        if a["found"] != b["found"] or a["restarts_used"] != b["restarts_used"]:
            print("  backends disagree on found/restarts!", file=sys.stderr)
            return 1
        dev = max_deviation(a, b)
        print(f"  agreement: max projective distance {dev['vectors']:.2e}, "
              f"max lambda deviation {dev['lambdas']:.2e}")
        speedup = a["best_s"] / b["best_s"]
        print(f"  speedup (numpy best / numba best): {speedup:.2f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
