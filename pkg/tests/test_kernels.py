"""Low-level solver kernels against plain einsum/linalg references."""

import subprocess
import sys

import numpy as np
import pytest

from tensor_spectra import _kernels
from tensor_spectra.tensor import random


def _grouped(dims, mode_block):
    """Stack layout helpers: block sizes, offsets, representative modes."""
    p = max(mode_block) + 1
    msizes = np.zeros(p, dtype=np.int64)
    rep = np.zeros(p, dtype=np.int64)
    seen = set()
    for j, b in enumerate(mode_block):
        msizes[b] = dims[j]
        if b not in seen:
            rep[b] = j
            seen.add(b)
    zoff = np.zeros(p, dtype=np.int64)
    for k in range(1, p):
        zoff[k] = zoff[k - 1] + msizes[k - 1]
    return msizes, rep, zoff


def _rand_z(rng, msizes):
    n = int(msizes.sum())
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def _vectors(z, zoff, msizes, mode_block):
    return [z[zoff[b]:zoff[b] + msizes[b]] for b in mode_block]


def _ref_keep_one(arr, keep, xs):
    d = arr.ndim
    G = arr
    for j in range(d - 1, -1, -1):
        if j == keep:
            continue
        G = np.tensordot(G, xs[j], axes=([j], [0]))
    return G


@pytest.mark.parametrize("dims,mode_block", [
    ((2, 3, 4), [0, 1, 2]),
    ((3, 3, 3), [0, 0, 0]),
    ((2, 2, 3), [0, 0, 1]),
    ((2, 3, 2, 3), [0, 1, 0, 1]),
])
def test_contract_keep_one_matches_reference(dims, mode_block):
    rng = np.random.default_rng(1)
    T = random(dims, seed=5, field="complex")
    arr = T.array
    mode_block = np.asarray(mode_block, dtype=np.int64)
    msizes, _, zoff = _grouped(dims, mode_block)
    z = _rand_z(rng, msizes)
    xs = _vectors(z, zoff, msizes, mode_block)
    for keep in range(len(dims)):
        got = _kernels.contract_keep_one(T.values, np.asarray(dims, np.int64),
                                         keep, z, zoff, mode_block)
        ref = _ref_keep_one(arr, keep, xs)
        assert np.max(np.abs(got - ref)) < 1e-12 * max(1.0, np.max(np.abs(ref)))


@pytest.mark.parametrize("dims,mode_block", [
    ((2, 3, 4), [0, 1, 2]),
    ((3, 3, 3), [0, 0, 0]),
    ((2, 2, 3), [0, 0, 1]),
])
def test_contract_keep_two_matches_reference(dims, mode_block):
    rng = np.random.default_rng(2)
    T = random(dims, seed=6, field="complex")
    arr = T.array
    d = len(dims)
    mode_block = np.asarray(mode_block, dtype=np.int64)
    msizes, _, zoff = _grouped(dims, mode_block)
    z = _rand_z(rng, msizes)
    xs = _vectors(z, zoff, msizes, mode_block)
    for r in range(d):
        for c in range(d):
            if r == c:
                continue
            got = _kernels.contract_keep_two(T.values, np.asarray(dims, np.int64),
                                             r, c, z, zoff, mode_block)
            G = arr
            for j in range(d - 1, -1, -1):
                if j in (r, c):
                    continue
                G = np.tensordot(G, xs[j], axes=([j], [0]))
            ref = G if r < c else G.T
            assert np.max(np.abs(got - ref)) < 1e-12 * max(1.0, np.max(np.abs(ref)))


def test_solve_linear_matches_numpy():
    rng = np.random.default_rng(3)
    for n in (1, 2, 5, 9):
        A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        b = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        x, ok = _kernels.solve_linear(A.copy(), b.copy())
        assert ok
        assert np.max(np.abs(x - np.linalg.solve(A, b))) < 1e-10


def test_solve_linear_flags_singular_system():
    A = np.zeros((3, 3), dtype=np.complex128)
    b = np.ones(3, dtype=np.complex128)
    _, ok = _kernels.solve_linear(A, b)
    assert not ok


def test_newton_fj_jacobian_matches_finite_differences():
    dims = (2, 2, 3)
    mode_block = np.asarray([0, 0, 1], dtype=np.int64)
    msizes, rep, zoff = _grouped(dims, mode_block)
    T = random(dims, seed=9, field="complex")
    rng = np.random.default_rng(4)
    N = int(msizes.sum())
    p = len(msizes)
    z = _rand_z(rng, msizes)
    lam = rng.standard_normal(p) + 1j * rng.standard_normal(p)
    pins = np.asarray([0, 2], dtype=np.int64)
    n = N + p
    F = np.zeros(n, dtype=np.complex128)
    J = np.zeros((n, n), dtype=np.complex128)
    dims64 = np.asarray(dims, np.int64)
    _kernels.newton_fj(T.values, dims64, mode_block, rep, msizes, zoff, pins,
                       z, lam, F, J)

    def fvec(zz, ll):
        Ft = np.zeros(n, dtype=np.complex128)
        Jt = np.zeros((n, n), dtype=np.complex128)
        _kernels.newton_fj(T.values, dims64, mode_block, rep, msizes, zoff,
                           pins, zz, ll, Ft, Jt)
        return Ft.copy()

    h = 1e-7
    # the system is holomorphic, so complex-step-free forward differences
    # in the real direction approximate the complex derivative
    for col in range(n):
        dz = z.copy()
        dl = lam.copy()
        if col < N:
            dz[col] += h
        else:
            dl[col - N] += h
        num = (fvec(dz, dl) - F) / h
        assert np.max(np.abs(num - J[:, col])) < 1e-5


def test_newton_iterate_converges_from_near_solution():
    dims = (3, 3)
    mode_block = np.asarray([0, 1], dtype=np.int64)
    msizes, rep, zoff = _grouped(dims, mode_block)
    M = np.diag([3.0, 2.0, 1.0])
    vals = M.astype(np.complex128).reshape(-1)
    # singular pair (e1, e1) with lambda 3; perturb slightly, pin coord 0
    z0 = np.array([1.0, 0.01, -0.02, 1.0, 0.015, 0.01], dtype=np.complex128)
    lam0 = np.array([2.9, 3.05], dtype=np.complex128)
    pins = np.asarray([0, 0], dtype=np.int64)
    z, lam, ok, iters, fmax = _kernels.newton_iterate(
        vals, np.asarray(dims, np.int64), mode_block, rep, msizes, zoff, pins,
        z0, lam0, 40, 1e-13)
    assert ok
    assert fmax < 1e-13
    assert abs(lam[0] - 3.0) < 1e-12 and abs(lam[1] - 3.0) < 1e-12
    assert np.max(np.abs(z - np.array([1, 0, 0, 1, 0, 0]))) < 1e-12
    assert iters <= 10


_CROSS_SCRIPT = r"""
import json
import numpy as np
import tensor_spectra as ts
from tensor_spectra import _kernels
T = ts.random((3, 3, 3), seed=1, field="complex")
rep = ts.solve_all(T, ts.SolveConfig(seed=0))
print(json.dumps({"backend": _kernels.BACKEND, "report": rep.to_json_dict()}))
"""


def test_backends_agree_on_a_full_solve():
    numba = pytest.importorskip("numba")  # noqa: F841  (skip when unavailable)
    outs = {}
    for backend in ("numpy", "numba"):
        proc = subprocess.run(
            [sys.executable, "-c", _CROSS_SCRIPT],
            capture_output=True, text=True, timeout=600,
            env={"TENSOR_SPECTRA_BACKEND": backend, "PATH": "/usr/bin:/bin",
                 "HOME": "/root"},
        )
        assert proc.returncode == 0, proc.stderr
        outs[backend] = proc.stdout
    import json
    a = json.loads(outs["numpy"])
    b = json.loads(outs["numba"])
    assert a["backend"] == "numpy" and b["backend"] == "numba"
    ra, rb = a["report"], b["report"]
    assert ra["found"] == rb["found"] == 37
    assert ra["restarts_used"] == rb["restarts_used"]
    # same tuples in the same order, to float rounding
    for ta, tb in zip(ra["tuples"], rb["tuples"]):
        va = np.asarray(ta["vectors"][0]); vb = np.asarray(tb["vectors"][0])
        assert np.max(np.abs(va - vb)) < 1e-9
