"""Best rank-one and best multilinear-rank approximation of real tensors.

Rank-one: multi-start alternating maximization of the multilinear form
f(x_1..x_d) = <T, outer(x_1..x_d)> over unit vectors, polished to a
critical point by Newton; the fit sigma is the incumbent maximum (global
optimality is NP-hard for d > 2 and is not claimed).  The returned
factors always satisfy the critical-point equations with common lambda =
sigma, and the Pythagorean split error^2 + sigma^2 = |T|^2 holds because
the approximant is an orthogonal projection onto the factor line.

Rank-(r_1..r_d): alternating subspace refinement (each basis replaced by
the leading left singular vectors of the tensor projected onto the other
bases), initialized from truncated mode-wise SVDs; error is non-increasing
sweep over sweep.

svd_oracle is an independently written one-sided Jacobi SVD used as the
matrix-case ground truth; it deliberately avoids np.linalg.svd so the
d = 2 checks compare two genuinely different routes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .counts import Partition
from .spectra import (SingularTuple, newton_polish, projective_distance)
from .tensor import (DenseTensor, contract_all_but, contract_full, hs_norm,
                     partial_symmetrize, rank_feasible, unfold)


# ======================================================================
# result types
# ======================================================================

@dataclass
class RankOneResult:
    """Best rank-one fit: unit factors, fit value sigma, residual error."""

    factors: Tuple[np.ndarray, ...]
    sigma: float
    error: float
    iterations: int
    converged: bool
    restarts: int

    def to_json_dict(self) -> dict:
        return {
            "factors": [[float(x) for x in v] for v in self.factors],
            "sigma": float(self.sigma),
            "error": float(self.error),
            "iterations": int(self.iterations),
            "converged": bool(self.converged),
            "restarts": int(self.restarts),
        }


@dataclass
class RankRResult:
    """Best rank-(r_1..r_d) fit: orthonormal bases, core, error trace."""

    bases: Tuple[np.ndarray, ...]
    core: DenseTensor
    error: float
    trace: List[float]
    stationary: bool

    def to_json_dict(self) -> dict:
        return {
            "bases": [[[float(x) for x in row] for row in U] for U in self.bases],
            "core_dims": list(self.core.dims),
            "core_values": [float(v) for v in self.core.values.real],
            "error": float(self.error),
            "trace": [float(e) for e in self.trace],
            "stationary": bool(self.stationary),
        }


# ======================================================================
# rank-one machinery
# ======================================================================

def _rank_one_array(factors: Sequence[np.ndarray]) -> np.ndarray:
    out = np.asarray(factors[0], dtype=np.float64)
    for v in factors[1:]:
        out = np.multiply.outer(out, np.asarray(v, dtype=np.float64))
    return out


def _real_factors(t: SingularTuple) -> List[np.ndarray]:
    return [v.real.copy() for v in t.vectors]


def _signed_for_nonneg(T: DenseTensor, factors: List[np.ndarray]) -> Tuple[List[np.ndarray], float]:
    f = complex(contract_full(T, factors)).real
    if f < 0:
        factors = [-factors[0]] + factors[1:]
        f = -f
    return factors, f


def _alternating_sweeps(T: DenseTensor, xs: List[np.ndarray], max_sweeps: int = 300,
                        rtol: float = 1e-9) -> Tuple[List[np.ndarray], int]:
    """Gauss-Seidel normalization sweeps until |f| stalls; returns (xs, sweeps)."""
    d = T.order
    f_prev = None
    it = 0
    for it in range(1, max_sweeps + 1):
        for i in range(d):
            rest = [xs[j] for j in range(d) if j != i]
            c = contract_all_but(T, i, rest).real
            nrm = float(np.linalg.norm(c))
            if nrm > 0.0:
                xs[i] = c / nrm
        f = abs(float(np.dot(xs[0], contract_all_but(T, 0, xs[1:]).real)))
        if f_prev is not None and abs(f - f_prev) <= rtol * max(1.0, f):
            break
        f_prev = f
    return xs, it


def _critical_sweep(T: DenseTensor, seed: int, restarts: int, tol: float):
    """Multi-start search for real critical points of the multilinear form.

    Returns a list of (sigma, factors, iterations, residual) with sigma >= 0,
    projectively deduplicated, sorted by descending sigma (ties by factor
    coordinates, so selection is deterministic).
    """
    if not T.is_real():
        raise ValueError("rank-one approximation expects a real tensor")
    if hs_norm(T) == 0.0:
        raise ValueError("the zero tensor has no meaningful rank-one fit")
    scale = max(1.0, hs_norm(T))
    found: List[Tuple[float, List[np.ndarray], int, float]] = []
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        xs = [rng.standard_normal(m) for m in T.dims]
        xs = [x / np.linalg.norm(x) for x in xs]
        xs, sweeps = _alternating_sweeps(T, [x.astype(np.complex128) for x in xs])
        try:
            t = newton_polish(T, xs)
        except ValueError:
            continue
        if not t.converged or t.residual > tol * scale:
            continue
        factors, sigma = _signed_for_nonneg(T, _real_factors(t))
        dup = False
        for s0, f0, _, _ in found:
            if projective_distance(factors, f0) <= 1e-6:
                dup = True
                break
        if not dup:
            found.append((sigma, factors, sweeps, t.residual))
    found.sort(key=lambda rec: (-rec[0],
                                tuple(float(x) for v in rec[1] for x in v)))
    return found


def rank_one_critical_values(T: DenseTensor, seed: int = 0, restarts: int = 64,
                             tol: float = 1e-10) -> List[float]:
    """Descending list of distinct critical values found by the multi-start."""
    return [rec[0] for rec in _critical_sweep(T, seed, restarts, tol)]


def best_rank_one(T: DenseTensor, seed: int = 0, restarts: int = 32,
                  tol: float = 1e-10) -> RankOneResult:
    """Best (incumbent) rank-one approximation of a real tensor.

    The error is computed directly from the reconstructed rank-one tensor,
    so the Pythagorean identity is a genuine check rather than a tautology.
    """
    found = _critical_sweep(T, seed, restarts, tol)
    if not found:
        # nothing polished below tol: return the raw alternating incumbent
        rng = np.random.default_rng([seed, 0])
        xs = [rng.standard_normal(m) for m in T.dims]
        xs = [(x / np.linalg.norm(x)).astype(np.complex128) for x in xs]
        xs, sweeps = _alternating_sweeps(T, xs)
        factors, sigma = _signed_for_nonneg(T, [x.real.copy() for x in xs])
        err = float(np.linalg.norm(T.values.real - sigma * _rank_one_array(factors).reshape(-1)))
        return RankOneResult(tuple(factors), sigma, err, sweeps, False, restarts)
    sigma, factors, iters, _res = found[0]
    err = float(np.linalg.norm(T.values.real - sigma * _rank_one_array(factors).reshape(-1)))
    return RankOneResult(tuple(factors), sigma, err, iters, True, restarts)


# ----------------------------------------------------------------------
# symmetry-constrained rank-one
# ----------------------------------------------------------------------

def _check_block_symmetric(T: DenseTensor, part: Partition) -> None:
    sym = partial_symmetrize(T, part)
    dev = float(np.max(np.abs(sym.values - T.values), initial=0.0))
    if dev > 1e-12 * max(1.0, hs_norm(T)):
        raise ValueError(
            f"tensor is not symmetric under partition {part.omega} "
            f"(deviation {dev:.2e}); symmetrize it first"
        )


def _expand_blocks(part: Partition, zs: Sequence[np.ndarray]) -> List[np.ndarray]:
    out: List[np.ndarray] = []
    for k, w in enumerate(part.omega):
        out.extend([zs[k]] * w)
    return out


def best_rank_one_symmetric(T: DenseTensor, part: Partition, seed: int = 0,
                            restarts: int = 32, tol: float = 1e-10) -> RankOneResult:
    """Best rank-one approximation constrained to share factors per block.

    Alternating ascent on |f| with a damped half-step fallback (full block
    updates can overshoot when a block appears more than once), Newton
    polish on the grouped critical system.  Factors are reported per mode
    (block vectors repeated).  When every block has even multiplicity the
    sign of sigma cannot be normalized away; it is then reported as-is.
    """
    if not T.is_real():
        raise ValueError("rank-one approximation expects a real tensor")
    if hs_norm(T) == 0.0:
        raise ValueError("the zero tensor has no meaningful rank-one fit")
    _check_block_symmetric(T, part)
    scale = max(1.0, hs_norm(T))
    d = T.order
    rep_mode = []
    pos = 0
    for w in part.omega:
        rep_mode.append(pos)
        pos += w

    def f_of(zs: List[np.ndarray]) -> float:
        return float(complex(contract_full(T, _expand_blocks(part, zs))).real)

    best: Optional[Tuple[float, List[np.ndarray], int, float]] = None
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        zs = [rng.standard_normal(m) for m in part.mprime]
        zs = [(z / np.linalg.norm(z)).astype(np.complex128) for z in zs]
        fcur = f_of(zs)
        sweeps = 0
        for sweeps in range(1, 301):
            moved = False
            for k in range(part.num_blocks):
                mu = rep_mode[k]
                xs = _expand_blocks(part, zs)
                rest = [xs[j] for j in range(d) if j != mu]
                c = contract_all_but(T, mu, rest).real
                nrm = float(np.linalg.norm(c))
                if nrm == 0.0:
                    continue
                cand = (c / nrm).astype(np.complex128)
                trial = list(zs)
                trial[k] = cand
                ftrial = f_of(trial)
                if abs(ftrial) < abs(fcur):
                    # damped fallback: half-step toward the candidate
                    mid = zs[k] + 0.5 * (cand - zs[k])
                    mid = mid / np.linalg.norm(mid)
                    trial[k] = mid
                    ftrial = f_of(trial)
                    if abs(ftrial) < abs(fcur):
                        continue
                if abs(ftrial) > abs(fcur):
                    moved = True
                zs = trial
                fcur = ftrial
            if not moved:
                break
        try:
            t = newton_polish(T, zs, part=part)
        except ValueError:
            continue
        if not t.converged or t.residual > tol * scale:
            continue
        blocks = _real_factors(t)
        fval = f_of([b.astype(np.complex128) for b in blocks])
        # flip one odd-multiplicity block, if any, to make the value >= 0
        if fval < 0:
            for k, w in enumerate(part.omega):
                if w % 2 == 1:
                    blocks[k] = -blocks[k]
                    fval = -fval
                    break
        key = (abs(fval), tuple(-float(x) for b in blocks for x in b))
        if best is None or key > (abs(best[0]), tuple(-float(x) for b in best[1] for x in b)):
            best = (fval, blocks, sweeps, t.residual)
    if best is None:
        raise RuntimeError(
            "no restart produced a polished symmetric critical point; "
            "increase restarts or loosen tol"
        )
    fval, blocks, sweeps, _res = best
    factors = _expand_blocks(part, blocks)
    err = float(np.linalg.norm(T.values.real - fval * _rank_one_array(factors).reshape(-1)))
    return RankOneResult(tuple(np.asarray(v, dtype=np.float64) for v in factors),
                         fval, err, sweeps, True, restarts)


# ======================================================================
# rank-(r_1..r_d): alternating subspace refinement
# ======================================================================

def _project_other_modes(arr: np.ndarray, bases: Sequence[np.ndarray], skip: int) -> np.ndarray:
    """Contract every mode except ``skip`` with its basis; mode ``skip`` ends
    up as axis 0, projected modes follow in descending original order."""
    d = arr.ndim
    G = arr
    for j in range(d - 1, -1, -1):
        if j == skip:
            continue
        G = np.tensordot(G, bases[j], axes=([j], [0]))
    return G


def _core_of(arr: np.ndarray, bases: Sequence[np.ndarray]) -> np.ndarray:
    d = arr.ndim
    G = arr
    for j in range(d - 1, -1, -1):
        G = np.tensordot(G, bases[j], axes=([j], [0]))
    return np.transpose(G, axes=tuple(range(d - 1, -1, -1)))


def _expand_core(core: np.ndarray, bases: Sequence[np.ndarray]) -> np.ndarray:
    d = core.ndim
    G = core
    for j in range(d - 1, -1, -1):
        G = np.tensordot(G, bases[j].T, axes=([j], [0]))
    return np.transpose(G, axes=tuple(range(d - 1, -1, -1)))


def best_rank_r(T: DenseTensor, r: Sequence[int], seed: int = 0,
                tol: float = 1e-12, max_iter: int = 1000) -> RankRResult:
    """Alternating best rank-(r_1..r_d) approximation of a real tensor.

    Initialized from truncated mode-wise SVDs (ties between equal singular
    values resolved by index order); each sweep replaces one basis with the
    leading left singular vectors of the tensor projected onto the others.
    ``seed`` is accepted for interface uniformity; the refinement itself is
    deterministic.
    """
    if not T.is_real():
        raise ValueError("rank-r approximation expects a real tensor")
    rr = tuple(int(v) for v in r)
    if len(rr) != T.order:
        raise ValueError(f"rank vector {rr} must have one entry per mode")
    if any(v < 1 for v in rr):
        raise ValueError(f"rank entries must be >= 1, got {rr}")
    if any(v > m for v, m in zip(rr, T.dims)):
        raise ValueError(f"rank {rr} exceeds dims {T.dims} in some mode")
    if not rank_feasible(rr):
        raise ValueError(
            f"infeasible rank vector {rr}: attainable mode ranks require "
            f"r_i^2 <= prod_j r_j for every i"
        )
    arr = T.array.real
    bases = []
    for i in range(T.order):
        U, _, _ = np.linalg.svd(unfold(T, i).matrix.real, full_matrices=False)
        bases.append(np.ascontiguousarray(U[:, :rr[i]]))
    trace: List[float] = []

    def current_error() -> float:
        core = _core_of(arr, bases)
        return float(np.linalg.norm(arr - _expand_core(core, bases)))

    err = current_error()
    trace.append(err)
    for _sweep in range(max_iter):
        for i in range(T.order):
            G = _project_other_modes(arr, bases, i)
            W = G.reshape(T.dims[i], -1)
            U, _, _ = np.linalg.svd(W, full_matrices=False)
            bases[i] = np.ascontiguousarray(U[:, :rr[i]])
        new_err = current_error()
        trace.append(new_err)
        if abs(trace[-2] - new_err) <= tol * max(1.0, trace[-2]):
            break
    # stationarity probe: one more sweep must not move any subspace
    stationary = True
    probe = [b.copy() for b in bases]
    for i in range(T.order):
        G = _project_other_modes(arr, probe, i)
        U, _, _ = np.linalg.svd(G.reshape(T.dims[i], -1), full_matrices=False)
        Unew = U[:, :rr[i]]
        drift = float(np.linalg.norm(Unew @ Unew.T - probe[i] @ probe[i].T))
        if drift > 1e-6:
            stationary = False
        probe[i] = np.ascontiguousarray(Unew)
    core = DenseTensor.from_array(_core_of(arr, bases))
    return RankRResult(tuple(bases), core, trace[-1], trace, stationary)


def omega_rank_r_experiment(T: DenseTensor, part: Partition, r_blocks: Sequence[int],
                            max_iter: int = 200) -> dict:
    """Exploratory probe: symmetry-constrained vs free rank-r fit errors.

    The constrained refinement shares one basis per block (updated from the
    stacked subproblems of its modes).  Heuristic, no monotonicity or
    optimality claim — the comparison is reported, nothing is asserted.
    """
    _check_block_symmetric(T, part)
    rb = tuple(int(v) for v in r_blocks)
    if len(rb) != part.num_blocks:
        raise ValueError("one block rank per partition block required")
    r_modes = []
    for k, w in enumerate(part.omega):
        r_modes.extend([rb[k]] * w)
    free = best_rank_r(T, r_modes, max_iter=max_iter)
    arr = T.array.real
    d = T.order
    mode_block = []
    for k, w in enumerate(part.omega):
        mode_block.extend([k] * w)
    shared = []
    for k in range(part.num_blocks):
        i = mode_block.index(k)
        U, _, _ = np.linalg.svd(unfold(T, i).matrix.real, full_matrices=False)
        shared.append(np.ascontiguousarray(U[:, :rb[k]]))
    for _sweep in range(max_iter):
        prev = [U.copy() for U in shared]
        for k in range(part.num_blocks):
            bases = [shared[mode_block[j]] for j in range(d)]
            stacked = []
            for i in range(d):
                if mode_block[i] != k:
                    continue
                G = _project_other_modes(arr, bases, i)
                stacked.append(G.reshape(T.dims[i], -1))
            W = np.hstack(stacked)
            U, _, _ = np.linalg.svd(W, full_matrices=False)
            shared[k] = np.ascontiguousarray(U[:, :rb[k]])
        if max(float(np.linalg.norm(a - b)) for a, b in zip(prev, shared)) < 1e-12:
            break
    bases = [shared[mode_block[j]] for j in range(d)]
    core = _core_of(arr, bases)
    constrained_err = float(np.linalg.norm(arr - _expand_core(core, bases)))
    return {
        "free_error": free.error,
        "constrained_error": constrained_err,
        "gap": constrained_err - free.error,
    }


# ======================================================================
# one-sided Jacobi SVD (the independent matrix oracle)
# ======================================================================

def svd_oracle(M) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin SVD by one-sided Jacobi rotations: returns (s, U, V).

    M = U @ diag(s) @ V.T with s descending, U and V orthonormal.  Written
    without np.linalg.svd on purpose: this is the independent route the
    library results are checked against in the matrix case.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2:
        raise ValueError("matrix input required")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix entries must be finite")
    transposed = M.shape[0] < M.shape[1]
    A = (M.T if transposed else M).copy()
    m, n = A.shape
    V = np.eye(n)
    for _sweep in range(100):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                ap = A[:, p]
                aq = A[:, q]
                alpha = float(ap @ ap)
                beta = float(aq @ aq)
                gamma = float(ap @ aq)
                if abs(gamma) <= 1e-15 * math.sqrt(alpha * beta) or gamma == 0.0:
                    continue
                theta = 0.5 * math.atan2(2.0 * gamma, beta - alpha)
                c = math.cos(theta)
                s = math.sin(theta)
                new_p = c * ap - s * aq
                new_q = s * ap + c * aq
                A[:, p] = new_p
                A[:, q] = new_q
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
                rotated = True
        if not rotated:
            break
    sv = np.array([float(np.linalg.norm(A[:, j])) for j in range(n)])
    order = sorted(range(n), key=lambda j: (-sv[j], j))
    sv = sv[order]
    A = A[:, order]
    V = V[:, order]
    U = np.zeros((m, n))
    for j in range(n):
        if sv[j] > 1e-300:
            U[:, j] = A[:, j] / sv[j]
    # orthonormal completion for (numerically) zero columns
    for j in range(n):
        if float(np.linalg.norm(U[:, j])) > 0.5:
            continue
        for t in range(m):
            cand = np.zeros(m)
            cand[t] = 1.0
            for k in range(n):
                if k != j and float(np.linalg.norm(U[:, k])) > 0.5:
                    cand -= (U[:, k] @ cand) * U[:, k]
            nrm = float(np.linalg.norm(cand))
            if nrm > 1e-6:
                U[:, j] = cand / nrm
                break
    if transposed:
        return sv, V, U
    return sv, U, V
