"""Hot numeric kernels with an optional numba backend.

Every function here is written as a plain scalar-loop function over
contiguous numpy arrays — exactly the shape numba's @njit digests.  At
import time the module decides a backend:

    TENSOR_SPECTRA_BACKEND=numba   require numba (error if missing)
    TENSOR_SPECTRA_BACKEND=numpy   force the pure-Python/numpy fallback
    unset or "auto"                numba if importable, fallback otherwise

Both backends execute the *same* function bodies (the fallback is simply
the un-jitted function object), so numerics agree to float rounding and
the public behavior is identical.  No fastmath: operation order is fixed.

Tensors arrive as flat row-major complex128 buffers plus an int64 dims
array; block structure (for symmetry-grouped systems) is described by
``mode_block`` (block index per mode), per-block offsets into a stacked
vector ``z``, and per-block sizes.  Modulus comparisons use squared
magnitudes to stay inside plain float arithmetic.
"""

from __future__ import annotations

import os

import numpy as np

_ENV = "TENSOR_SPECTRA_BACKEND"


def _pick_backend() -> str:
    choice = os.environ.get(_ENV, "auto").strip().lower() or "auto"
    if choice not in ("auto", "numba", "numpy"):
        raise ValueError(f"{_ENV} must be auto, numba or numpy, got {choice!r}")
    if choice == "numpy":
        return "numpy"
    try:
        import numba  # noqa: F401
    except ImportError:
        if choice == "numba":
            raise RuntimeError(f"{_ENV}=numba but numba is not installed")
        return "numpy"
    return "numba"


BACKEND = _pick_backend()

if BACKEND == "numba":
    from numba import njit

    def _jit(fn):
        return njit(cache=True, nogil=True)(fn)
else:
    def _jit(fn):
        return fn


def _sqmod(c) -> float:
    return c.real * c.real + c.imag * c.imag


_sqmod = _jit(_sqmod)


# ======================================================================
# contractions on flat buffers
# ======================================================================

def contract_keep_one(vals, dims, keep, z, zoff, mode_block):
    """Contract every mode except ``keep`` with its block vector.

    Mode j is paired with z[zoff[b] : zoff[b]+dims[j]] where b =
    mode_block[j].  Returns the length-dims[keep] result vector.
    """
    d = dims.shape[0]
    out = np.zeros(dims[keep], np.complex128)
    n = vals.shape[0]
    for flat in range(n):
        v = vals[flat]
        if v == 0:
            continue
        rem = flat
        ikeep = 0
        prod = v
        for j in range(d - 1, -1, -1):
            idx = rem % dims[j]
            rem //= dims[j]
            if j == keep:
                ikeep = idx
            else:
                prod = prod * z[zoff[mode_block[j]] + idx]
        out[ikeep] += prod
    return out


def contract_keep_two(vals, dims, keep_r, keep_c, z, zoff, mode_block):
    """Contract every mode except ``keep_r`` and ``keep_c`` (distinct).

    Returns the dims[keep_r] x dims[keep_c] matrix of the bilinear form.
    """
    d = dims.shape[0]
    out = np.zeros((dims[keep_r], dims[keep_c]), np.complex128)
    n = vals.shape[0]
    for flat in range(n):
        v = vals[flat]
        if v == 0:
            continue
        rem = flat
        ir = 0
        ic = 0
        prod = v
        for j in range(d - 1, -1, -1):
            idx = rem % dims[j]
            rem //= dims[j]
            if j == keep_r:
                ir = idx
            elif j == keep_c:
                ic = idx
            else:
                prod = prod * z[zoff[mode_block[j]] + idx]
        out[ir, ic] += prod
    return out


contract_keep_one = _jit(contract_keep_one)
contract_keep_two = _jit(contract_keep_two)


# ======================================================================
# dense linear solve (partial-pivot Gaussian elimination)
# ======================================================================

def solve_linear(A, b):
    """Solve A x = b in place-on-copies; returns (x, ok).

    ok is False when a pivot vanishes (singular to working precision).
    """
    n = A.shape[0]
    M = A.copy()
    x = b.copy()
    for k in range(n):
        p = k
        best = _sqmod(M[k, k])
        for r in range(k + 1, n):
            t = _sqmod(M[r, k])
            if t > best:
                best = t
                p = r
        if best < 1e-280:
            return x, False
        if p != k:
            for c in range(k, n):
                tmp = M[k, c]
                M[k, c] = M[p, c]
                M[p, c] = tmp
            tmp = x[k]
            x[k] = x[p]
            x[p] = tmp
        piv = M[k, k]
        for r in range(k + 1, n):
            f = M[r, k] / piv
            if f != 0:
                for c in range(k + 1, n):
                    M[r, c] -= f * M[k, c]
                x[r] -= f * x[k]
            M[r, k] = 0
    for k in range(n - 1, -1, -1):
        s = x[k]
        for c in range(k + 1, n):
            s -= M[k, c] * x[c]
        x[k] = s / M[k, k]
    return x, True


solve_linear = _jit(solve_linear)


# ======================================================================
# Newton iteration for the chart-pinned singular-tuple system
# ======================================================================

def newton_fj(vals, dims, mode_block, rep_mode, msizes, zoff, pins, z, lam, F, J):
    """Fill residual F and Jacobian J of the square system in place.

    Unknowns: stacked block vectors z (N entries) then one lambda per
    block (p entries).  Equations: per block k the contraction at its
    representative mode minus lam_k z_k, then one pin row per block
    fixing coordinate pins[k] of z_k at 1.
    """
    d = dims.shape[0]
    p = msizes.shape[0]
    N = z.shape[0]
    for k in range(p):
        c = contract_keep_one(vals, dims, rep_mode[k], z, zoff, mode_block)
        base = zoff[k]
        for t in range(msizes[k]):
            F[base + t] = c[t] - lam[k] * z[base + t]
    for k in range(p):
        F[N + k] = z[zoff[k] + pins[k]] - 1.0
    for r in range(N + p):
        for c2 in range(N + p):
            J[r, c2] = 0
    for k in range(p):
        r0 = zoff[k]
        mu = rep_mode[k]
        for j in range(d):
            if j == mu:
                continue
            M = contract_keep_two(vals, dims, mu, j, z, zoff, mode_block)
            c0 = zoff[mode_block[j]]
            for a in range(msizes[k]):
                for b in range(dims[j]):
                    J[r0 + a, c0 + b] += M[a, b]
        for a in range(msizes[k]):
            J[r0 + a, r0 + a] -= lam[k]
            J[r0 + a, N + k] = -z[r0 + a]
        J[N + k, r0 + pins[k]] = 1.0


def newton_iterate(vals, dims, mode_block, rep_mode, msizes, zoff, pins,
                   z0, lam0, max_iter, ftol):
    """Plain Newton on the pinned system from (z0, lam0).

    Returns (z, lam, status, iters, fmax) with status 1 on convergence
    (max-norm of the residual below ftol), 0 on breakdown/divergence/
    iteration cap.
    """
    p = msizes.shape[0]
    N = z0.shape[0]
    z = z0.copy()
    lam = lam0.copy()
    F = np.zeros(N + p, np.complex128)
    J = np.zeros((N + p, N + p), np.complex128)
    fmax2 = 0.0
    tol2 = ftol * ftol
    for it in range(max_iter):
        newton_fj(vals, dims, mode_block, rep_mode, msizes, zoff, pins, z, lam, F, J)
        fmax2 = 0.0
        for t in range(N + p):
            s = _sqmod(F[t])
            if s > fmax2:
                fmax2 = s
        if fmax2 < tol2:
            return z, lam, 1, it, np.sqrt(fmax2)
        for t in range(N + p):
            F[t] = -F[t]
        delta, ok = solve_linear(J, F)
        if not ok:
            return z, lam, 0, it, np.sqrt(fmax2)
        big = 0.0
        for t in range(N):
            z[t] += delta[t]
            s = _sqmod(z[t])
            if s > big:
                big = s
        for k in range(p):
            lam[k] += delta[N + k]
        if big > 1e16:  # diverging trajectory: abandon this start
            return z, lam, 0, it, np.sqrt(fmax2)
    newton_fj(vals, dims, mode_block, rep_mode, msizes, zoff, pins, z, lam, F, J)
    fmax2 = 0.0
    for t in range(N + p):
        s = _sqmod(F[t])
        if s > fmax2:
            fmax2 = s
    status = 1 if fmax2 < tol2 else 0
    return z, lam, status, max_iter, np.sqrt(fmax2)


newton_fj = _jit(newton_fj)
newton_iterate = _jit(newton_iterate)


def warmup() -> None:
    """Trigger jit compilation on tiny inputs (no-op on the numpy backend)."""
    vals = np.ones(4, np.complex128)
    dims = np.array([2, 2], np.int64)
    mode_block = np.array([0, 1], np.int64)
    rep = np.array([0, 1], np.int64)
    msizes = np.array([2, 2], np.int64)
    zoff = np.array([0, 2], np.int64)
    pins = np.array([0, 0], np.int64)
    z = np.ones(4, np.complex128)
    lam = np.ones(2, np.complex128)
    newton_iterate(vals, dims, mode_block, rep, msizes, zoff, pins, z, lam, 2, 1e-30)
    contract_keep_one(vals, dims, 0, z, zoff, mode_block)
    contract_keep_two(vals, dims, 0, 1, z, zoff, mode_block)
