"""Find, polish, deduplicate and classify singular vector tuples.

A singular vector tuple of a d-mode tensor is one unit vector per mode
satisfying, for every mode i, contraction of all other modes against
their vectors = lambda_i * x_i.  Symmetry-grouped variants tie one vector
to each block of a mode partition (fully symmetric = eigenpairs).  Small
tensors have exactly the counts predicted by the counts module, which is
what the multi-start solver saturates against.

Strategy: random complex starts, plain Newton on the chart-pinned square
system (one coordinate per block pinned to 1, one lambda per block),
projective dedup of converged solutions, then classification (zero
product of lambdas, isotropy pattern, Jacobian simplicity).  Restarts are
independent work units; results are merged in restart order and the final
report is sorted by canonical representatives, so output is byte-identical
for a fixed seed regardless of thread count.

Conventions:
  * canonical representative: unit norm, phase fixed so the first
    coordinate of largest modulus is real positive (ties: lowest index);
  * dedup metric: max over blocks of sqrt(1 - |<u, v>|^2), threshold 1e-6
    (phase-invariant, so it never depends on canonicalization details);
  * lambdas are recomputed at the canonical representatives;
  * zero-value flag: |prod of per-mode lambdas| < 1e-8 * hs_norm(T)^d;
  * simple flag: smallest/largest singular value of the final chart
    Jacobian > 1e-8.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import _kernels
from .counts import Partition, partial_symmetric_count, singular_tuple_count
from .tensor import (DenseTensor, almost_diagonal, contract_all_but, diagonal,
                     hs_norm, partial_symmetrize)

DEDUP_TOL = 1e-6
DEFAULT_CAP = 100
RESTART_FACTOR = 500
SIMPLE_RTOL = 1e-8
ZERO_RTOL = 1e-8
ISO_TOL = 1e-8
_CHUNK = 64  # restarts per scheduling chunk (fixed: keeps reports thread-count independent)


class CapExceeded(RuntimeError):
    """Expected tuple count exceeds the configured enumeration cap."""


class InvariantViolation(RuntimeError):
    """A mathematically guaranteed property failed numerically."""


# ======================================================================
# result types
# ======================================================================

@dataclass(frozen=True, eq=False)
class SingularTuple:
    """One projective solution: canonical vectors, lambdas, diagnostics."""

    vectors: Tuple[np.ndarray, ...]
    lambdas: Tuple[complex, ...]
    residual: float
    isotropy: Tuple[bool, ...]
    simple: bool
    zero: bool
    converged: bool = True

    def to_json_dict(self) -> dict:
        return {
            "vectors": [[[float(c.real), float(c.imag)] for c in v] for v in self.vectors],
            "lambdas": [[float(l.real), float(l.imag)] for l in self.lambdas],
            "residual": float(self.residual),
            "isotropy": list(self.isotropy),
            "simple": bool(self.simple),
            "zero": bool(self.zero),
            "converged": bool(self.converged),
        }


@dataclass
class SolveReport:
    """Outcome of a multi-start enumeration run."""

    tuples: List[SingularTuple]
    restarts_used: int
    converged_count: int
    duplicate_merges: int
    expected_count: Optional[int]

    @property
    def found(self) -> int:
        return len(self.tuples)

    @property
    def incomplete(self) -> bool:
        return self.expected_count is not None and self.found < self.expected_count

    def to_json_dict(self) -> dict:
        return {
            "expected": self.expected_count,
            "found": self.found,
            "incomplete": self.incomplete,
            "restarts_used": self.restarts_used,
            "converged_count": self.converged_count,
            "duplicate_merges": self.duplicate_merges,
            "tuples": [t.to_json_dict() for t in self.tuples],
        }


@dataclass
class SolveConfig:
    """Knobs for the multi-start solver (None restarts = 500 x expected)."""

    seed: int = 0
    restarts: Optional[int] = None
    tol: float = 1e-10
    cap: int = DEFAULT_CAP
    max_iter: int = 60
    threads: Optional[int] = None


@dataclass(frozen=True)
class Classification:
    zero: bool
    isotropy: Tuple[bool, ...]
    all_isotropic: bool
    none_isotropic: bool


# ======================================================================
# plumbing
# ======================================================================

def _num_threads(requested: Optional[int]) -> int:
    if requested is not None:
        return max(1, int(requested))
    env = os.environ.get("TENSOR_SPECTRA_THREADS", "").strip()
    if env:
        return max(1, int(env))
    return 1


def _trivial_partition(dims) -> Partition:
    return Partition(omega=(1,) * len(dims), mprime=tuple(dims))


class _Grouped:
    """Precomputed index arrays describing the block structure."""

    def __init__(self, T: DenseTensor, part: Partition):
        if T.dims != part.expand():
            raise ValueError(
                f"tensor dims {T.dims} do not match partition expansion {part.expand()}"
            )
        self.T = T
        self.part = part
        self.dims = np.array(T.dims, np.int64)
        p = part.num_blocks
        mode_block = []
        rep_mode = []
        pos = 0
        for k, w in enumerate(part.omega):
            rep_mode.append(pos)
            mode_block.extend([k] * w)
            pos += w
        self.mode_block = np.array(mode_block, np.int64)
        self.rep_mode = np.array(rep_mode, np.int64)
        self.msizes = np.array(part.mprime, np.int64)
        self.zoff = np.zeros(p, np.int64)
        self.zoff[1:] = np.cumsum(self.msizes)[:-1]
        self.N = int(self.msizes.sum())
        self.p = p
        self.scale = max(1.0, hs_norm(T))

    def split(self, z: np.ndarray) -> List[np.ndarray]:
        return [z[self.zoff[k]: self.zoff[k] + self.msizes[k]] for k in range(self.p)]

    def mode_vectors(self, block_vecs: Sequence[np.ndarray]) -> List[np.ndarray]:
        return [block_vecs[b] for b in self.mode_block]


def canonical_vector(v: np.ndarray) -> np.ndarray:
    """Unit-norm representative with the largest-modulus coordinate real > 0."""
    nrm = np.linalg.norm(v)
    if nrm == 0.0:
        raise ValueError("cannot canonicalize the zero vector")
    u = v / nrm
    mods = np.abs(u)
    j = int(np.argmax(mods))  # argmax takes the first maximum: lowest index on ties
    u = u * (u[j].conjugate() / mods[j])
    return u


def projective_distance(us: Sequence[np.ndarray], vs: Sequence[np.ndarray]) -> float:
    """max over blocks of sqrt(1 - |<u,v>|^2 / (|u||v|)^2), phase-free.

    Zero iff every pair spans the same projective point; inputs need not be
    normalized.  Resolution floor is ~sqrt(machine eps), far below the dedup
    threshold.
    """
    worst = 0.0
    for u, v in zip(us, vs):
        den = float(np.vdot(u, u).real * np.vdot(v, v).real)
        if den == 0.0:
            raise ValueError("projective distance of a zero vector is undefined")
        ratio = abs(np.vdot(u, v)) ** 2 / den
        worst = max(worst, math.sqrt(max(0.0, 1.0 - min(1.0, ratio))))
    return worst


def _finish_tuple(g: _Grouped, z: np.ndarray, accept_tol: float,
                  converged: bool = True) -> Optional[SingularTuple]:
    """Normalize a chart solution, recompute lambdas, classify, package."""
    try:
        us = [canonical_vector(zk) for zk in g.split(z)]
    except ValueError:
        return None
    xs = g.mode_vectors(us)
    lambdas: List[complex] = []
    residual = 0.0
    for k in range(g.p):
        mu = int(g.rep_mode[k])
        rest = [xs[j] for j in range(len(xs)) if j != mu]
        c = contract_all_but(g.T, mu, rest)
        lam = complex(np.vdot(us[k], c))
        lambdas.append(lam)
        residual = max(residual, float(np.linalg.norm(c - lam * us[k])))
    if converged and residual > accept_tol:
        return None
    # zero-value test uses the per-mode product: lambda_k counted omega_k times
    prod = 1.0 + 0.0j
    for k in range(g.p):
        prod *= lambdas[k] ** int(g.part.omega[k])
    zero = abs(prod) < ZERO_RTOL * g.scale ** len(g.mode_block)
    isotropy = tuple(bool(abs(np.dot(u, u)) < ISO_TOL) for u in us)
    # simplicity from the chart Jacobian at the (un-normalized) solution
    zs = g.split(z)
    lam_chart = np.zeros(g.p, np.complex128)
    for k in range(g.p):
        mu = int(g.rep_mode[k])
        rest = [zs[g.mode_block[j]] for j in range(len(g.mode_block)) if j != mu]
        c = contract_all_but(g.T, mu, rest)
        pin = int(np.argmax(np.abs(zs[k])))
        lam_chart[k] = c[pin] / zs[k][pin]
    F = np.zeros(g.N + g.p, np.complex128)
    J = np.zeros((g.N + g.p, g.N + g.p), np.complex128)
    pins = np.array([int(np.argmax(np.abs(zk))) for zk in zs], np.int64)
    _kernels.newton_fj(g.T.values, g.dims, g.mode_block, g.rep_mode, g.msizes,
                       g.zoff, pins, z, lam_chart, F, J)
    sv = np.linalg.svd(J, compute_uv=False)
    simple = bool(sv[0] > 0 and sv[-1] > SIMPLE_RTOL * sv[0])
    return SingularTuple(
        vectors=tuple(us),
        lambdas=tuple(lambdas),
        residual=residual,
        isotropy=isotropy,
        simple=simple,
        zero=zero,
        converged=converged,
    )


def _sort_key(t: SingularTuple):
    return tuple((c.real, c.imag) for v in t.vectors for c in v)


def _newton_from_start(g: _Grouped, starts: Sequence[np.ndarray], max_iter: int,
                       accept_tol: float):
    """Chart-pin the given block vectors and run Newton; returns (z, ok, fmax)."""
    z0 = np.zeros(g.N, np.complex128)
    pins = np.zeros(g.p, np.int64)
    for k, w in enumerate(starts):
        w = np.asarray(w, dtype=np.complex128).reshape(-1)
        if w.size != g.msizes[k]:
            raise ValueError(
                f"start vector {k} has length {w.size}, expected {g.msizes[k]}"
            )
        pin = int(np.argmax(np.abs(w)))
        if w[pin] == 0:
            raise ValueError("start vector is zero")
        pins[k] = pin
        z0[g.zoff[k]: g.zoff[k] + g.msizes[k]] = w / w[pin]
    lam0 = np.zeros(g.p, np.complex128)
    for k in range(g.p):
        c = _kernels.contract_keep_one(g.T.values, g.dims, int(g.rep_mode[k]),
                                       z0, g.zoff, g.mode_block)
        lam0[k] = c[pins[k]]
    ftol = 1e-13 * g.scale
    z, lam, status, iters, fmax = _kernels.newton_iterate(
        g.T.values, g.dims, g.mode_block, g.rep_mode, g.msizes, g.zoff, pins,
        z0, lam0, max_iter, ftol)
    return z, status == 1, float(fmax)


# ======================================================================
# public solver surface
# ======================================================================

def newton_polish(T: DenseTensor, start: Sequence[np.ndarray],
                  part: Optional[Partition] = None,
                  max_iter: int = 60, tol: float = 1e-12) -> SingularTuple:
    """Polish a candidate tuple by Newton on the chart-pinned square system.

    ``start`` holds one vector per mode (or per block when ``part`` is
    given).  On success the returned tuple has residual below ``tol``;
    on breakdown (singular Jacobian / divergence) the best-effort tuple
    is returned with ``converged=False`` and an honest residual.
    """
    part = part or _trivial_partition(T.dims)
    g = _Grouped(T, part)
    z, ok, fmax = _newton_from_start(g, start, max_iter, tol)
    finished = _finish_tuple(g, z, accept_tol=tol * g.scale, converged=ok)
    if finished is not None and ok and finished.residual <= tol * g.scale:
        return finished
    # failure path: report what we have, flagged
    fallback = _finish_tuple(g, z, accept_tol=np.inf, converged=False)
    if fallback is None:
        raise ValueError("polish collapsed onto a zero vector; no tuple to report")
    return fallback


def _enumerate(T: DenseTensor, part: Partition, config: SolveConfig,
               expected: Optional[int]) -> SolveReport:
    g = _Grouped(T, part)
    if expected is not None and config.cap is not None and expected > config.cap:
        raise CapExceeded(
            f"expected count {expected} exceeds cap {config.cap}; "
            f"raise the cap to enumerate this shape"
        )
    budget = config.restarts
    if budget is None:
        budget = RESTART_FACTOR * max(1, expected if expected else 1)
    accept_tol = config.tol * g.scale

    def run_one(r: int) -> Optional[SingularTuple]:
        rng = np.random.default_rng([config.seed, r])
        starts = []
        for k in range(g.p):
            mk = int(g.msizes[k])
            starts.append(rng.standard_normal(mk) + 1j * rng.standard_normal(mk))
        try:
            z, ok, _ = _newton_from_start(g, starts, config.max_iter, accept_tol)
        except ValueError:
            return None
        if not ok:
            return None
        return _finish_tuple(g, z, accept_tol)

    threads = _num_threads(config.threads)
    tuples: List[SingularTuple] = []
    merges = 0
    converged = 0
    used = 0
    done = expected is not None and expected == 0
    r = 0
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        while r < budget and not done:
            hi = min(budget, r + _CHUNK)
            if pool is not None:
                batch = list(pool.map(run_one, range(r, hi)))
            else:
                batch = [run_one(i) for i in range(r, hi)]
            for idx, cand in enumerate(batch):
                used = r + idx + 1
                if cand is not None:
                    converged += 1
                    if all(projective_distance(cand.vectors, t.vectors) > DEDUP_TOL
                           for t in tuples):
                        tuples.append(cand)
                    else:
                        merges += 1
                if expected is not None and len(tuples) == expected:
                    done = True
                    break
            r = hi
    finally:
        if pool is not None:
            pool.shutdown(wait=False)
    tuples.sort(key=_sort_key)
    return SolveReport(
        tuples=tuples,
        restarts_used=used,
        converged_count=converged,
        duplicate_merges=merges,
        expected_count=expected,
    )


def solve_all(T: DenseTensor, config: Optional[SolveConfig] = None) -> SolveReport:
    """Enumerate all singular vector tuples of a small tensor.

    Refuses shapes whose exact count exceeds the cap; under-discovery
    within the restart budget is reported (``incomplete``), never padded.
    """
    config = config or SolveConfig()
    expected = singular_tuple_count(T.dims)
    return _enumerate(T, _trivial_partition(T.dims), config, expected)


def solve_all_partial(T: DenseTensor, part: Partition,
                      config: Optional[SolveConfig] = None) -> SolveReport:
    """Enumerate symmetry-grouped tuples (one vector per block) of T.

    T must be symmetric within each block (symmetrize first if needed).
    """
    config = config or SolveConfig()
    sym = partial_symmetrize(T, part)
    scale = max(1.0, hs_norm(T))
    if float(np.max(np.abs(sym.values - T.values), initial=0.0)) > 1e-12 * scale:
        raise ValueError(
            "tensor is not symmetric under the given partition; "
            "apply partial_symmetrize first"
        )
    expected = partial_symmetric_count(part)
    return _enumerate(T, part, config, expected)


# ======================================================================
# alternating maximization (real tensors)
# ======================================================================

def hopm_step(T: DenseTensor, xs: Sequence[np.ndarray]) -> List[np.ndarray]:
    """One in-place-style alternating sweep: each x_i <- normalized contraction."""
    out = [np.asarray(x, dtype=np.complex128).reshape(-1) for x in xs]
    for i in range(T.order):
        rest = [out[j] for j in range(T.order) if j != i]
        c = contract_all_but(T, i, rest)
        nrm = np.linalg.norm(c)
        if nrm > 0.0:
            out[i] = c / nrm
    return out


def hopm_singular(T: DenseTensor, seed: int = 0, restarts: int = 64,
                  tol: float = 1e-10) -> SolveReport:
    """Multi-start alternating maximization for real critical tuples.

    Each start is iterated to (linear-rate) convergence, then polished by
    Newton.  Reported tuples satisfy the defining equations with a common
    real lambda >= 0: when canonical phase fixing would make the common
    lambda negative, the first factor absorbs a sign flip instead.
    """
    if not T.is_real():
        raise ValueError("alternating maximization expects a real tensor")
    part = _trivial_partition(T.dims)
    g = _Grouped(T, part)
    accept_tol = tol * g.scale
    tuples: List[SingularTuple] = []
    merges = 0
    converged = 0
    used = 0
    for r in range(restarts):
        used = r + 1
        rng = np.random.default_rng([seed, r])
        xs = [rng.standard_normal(m).astype(np.complex128) for m in T.dims]
        xs = [x / np.linalg.norm(x) for x in xs]
        f_prev = None
        for _ in range(500):
            xs = hopm_step(T, xs)
            f = abs(complex(np.dot(xs[0], contract_all_but(T, 0, xs[1:]))))
            if f_prev is not None and abs(f - f_prev) <= 1e-14 * max(1.0, f):
                break
            f_prev = f
        try:
            cand = newton_polish(T, xs, tol=tol)
        except ValueError:
            continue
        if not cand.converged or cand.residual > accept_tol:
            continue
        cand = _flip_to_nonneg(T, cand)
        converged += 1
        if all(projective_distance(cand.vectors, t.vectors) > DEDUP_TOL for t in tuples):
            tuples.append(cand)
        else:
            merges += 1
    tuples.sort(key=_sort_key)
    return SolveReport(
        tuples=tuples,
        restarts_used=used,
        converged_count=converged,
        duplicate_merges=merges,
        expected_count=None,
    )


def _flip_to_nonneg(T: DenseTensor, t: SingularTuple) -> SingularTuple:
    """Flip the first factor's sign if the common real lambda is negative."""
    lam0 = t.lambdas[0]
    if lam0.real >= 0:
        return t
    vectors = (t.vectors[0] * -1.0,) + t.vectors[1:]
    xs = list(vectors)
    lambdas = []
    residual = 0.0
    for i in range(len(xs)):
        rest = [xs[j] for j in range(len(xs)) if j != i]
        c = contract_all_but(T, i, rest)
        lam = complex(np.vdot(xs[i], c))
        lambdas.append(lam)
        residual = max(residual, float(np.linalg.norm(c - lam * xs[i])))
    return SingularTuple(
        vectors=vectors,
        lambdas=tuple(lambdas),
        residual=residual,
        isotropy=t.isotropy,
        simple=t.simple,
        zero=t.zero,
        converged=t.converged,
    )


# ======================================================================
# the diagonal 3x3x3 reference list
# ======================================================================

def _diagonal_333_rows() -> List[Tuple[Tuple[Tuple[int, ...], ...], int]]:
    """All 37 integer-vector tuples of the order-3 diagonal cube with values."""
    e = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    rows: List[Tuple[Tuple[Tuple[int, ...], ...], int]] = []
    # 7 fully symmetric tuples (x, x, x), value 1
    for x in e + [(1, 1, 0), (1, 0, 1), (0, 1, 1), (1, 1, 1)]:
        rows.append(((x, x, x), 1))
    # 6 sign-split pairs in each of 3 placements (x,y,y)/(y,x,y)/(y,y,x), value 1
    pairs = [
        ((1, 1, 0), (1, -1, 0)),
        ((1, 0, 1), (1, 0, -1)),
        ((0, 1, 1), (0, 1, -1)),
        ((1, 1, 1), (1, 1, -1)),
        ((1, 1, 1), (1, -1, 1)),
        ((1, 1, 1), (-1, 1, 1)),
    ]
    for x, y in pairs:
        rows.append(((x, y, y), 1))
        rows.append(((y, x, y), 1))
        rows.append(((y, y, x), 1))
    # 6 permutations of the standard basis, value 0
    for p in itertools.permutations(e):
        rows.append((tuple(p), 0))
    # 6 permutations of the sign pattern triple, value -1
    for p in itertools.permutations(((1, 1, -1), (1, -1, 1), (-1, 1, 1))):
        rows.append((tuple(p), -1))
    return rows


DIAGONAL_333_TABLE = _diagonal_333_rows()


def verify_diagonal_333() -> float:
    """Check every table row satisfies the defining equations exactly.

    Uses the integer representatives and the listed value verbatim;
    returns the max residual (0.0 in exact float arithmetic).  Raises
    InvariantViolation on any row off by more than 1e-12.
    """
    worst = 0.0
    for vecs, value in DIAGONAL_333_TABLE:
        arrs = [np.array(v, dtype=np.complex128) for v in vecs]
        for i in range(3):
            rest = [arrs[j] for j in range(3) if j != i]
            c = np.array([rest[0][t] * rest[1][t] for t in range(3)])
            res = float(np.max(np.abs(c - value * arrs[i])))
            worst = max(worst, res)
            if res > 1e-12:
                raise InvariantViolation(
                    f"diagonal table row {vecs} (value {value}) residual {res}"
                )
    return worst


def enumerate_diagonal_333() -> List[SingularTuple]:
    """The 37 singular tuples of the 3x3x3 diagonal cube, canonicalized.

    Each row is first verified literally (integer representatives, listed
    value); the emitted SingularTuple carries canonical unit vectors with
    lambdas recomputed there, so sign and 1/sqrt(norm) factors differ from
    the printed values while zero/nonzero classification is preserved.
    """
    verify_diagonal_333()
    T = diagonal(3, 3)
    out = []
    for vecs, _value in DIAGONAL_333_TABLE:
        t = newton_polish(T, [np.array(v, dtype=np.complex128) for v in vecs])
        if not t.converged or t.residual > 1e-12:
            raise InvariantViolation(f"table row {vecs} failed to polish")
        out.append(t)
    return out


# ======================================================================
# pencil eigenvectors via almost-diagonal tensors
# ======================================================================

def cyclic_permutation(m: int) -> np.ndarray:
    """The m x m cyclic shift matrix (1 on the superdiagonal, wrap-around)."""
    B = np.zeros((m, m))
    for i in range(m):
        B[i, (i + 1) % m] = 1.0
    return B


def pencil_eigs_almost_diagonal(A, B, d: int) -> List[Tuple[complex, np.ndarray]]:
    """All projective eigenvectors of the order-d pencil built from (A, B).

    The pencil equation contracts the almost-diagonal tensors of B and A
    against d-1 copies of x; solutions are coordinatewise (d-1)-th root
    branches of the eigenvectors of inv(A) @ B, pinned to 1 at the first
    well-conditioned coordinate.  Requires distinct eigenvalues.  Each of
    the m * (d-1)^(m-1) returned pairs is verified against the tensor
    equation before being returned.
    """
    A = np.asarray(A, dtype=np.complex128)
    B = np.asarray(B, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape != B.shape:
        raise ValueError(f"need equal square matrices, got {A.shape} and {B.shape}")
    if d < 2:
        raise ValueError("pencil order must be >= 2")
    m = A.shape[0]
    try:
        C = np.linalg.solve(A, B)
    except np.linalg.LinAlgError as exc:
        raise ValueError("matrix A must be invertible") from exc
    w, V = np.linalg.eig(C)
    scale = max(1.0, float(np.max(np.abs(w))))
    for i in range(m):
        for j in range(i + 1, m):
            if abs(w[i] - w[j]) <= 1e-8 * scale:
                raise ValueError(
                    f"eigenvalues {w[i]} and {w[j]} coincide; the root-branch "
                    f"construction needs distinct eigenvalues"
                )
    order = sorted(range(m), key=lambda i: (w[i].real, w[i].imag))
    TB = almost_diagonal(B, d)
    SA = almost_diagonal(A, d)
    root_count = d - 1
    zeta = np.exp(2j * np.pi / root_count)
    out: List[Tuple[complex, np.ndarray]] = []
    for i in order:
        lam = complex(w[i])
        v = V[:, i]
        vmax = float(np.max(np.abs(v)))
        pin = 0 if abs(v[0]) > 1e-8 * vmax else int(np.argmax(np.abs(v)))
        vv = v / v[pin]
        free = [j for j in range(m) if j != pin]
        base = {j: vv[j] ** (1.0 / root_count) for j in free}
        for branch in itertools.product(range(root_count), repeat=len(free)):
            x = np.zeros(m, np.complex128)
            x[pin] = 1.0
            for j, t in zip(free, branch):
                x[j] = base[j] * zeta ** t
            lhs = contract_all_but(TB, 0, [x] * (d - 1))
            rhs = contract_all_but(SA, 0, [x] * (d - 1))
            res = float(np.max(np.abs(lhs - lam * rhs)))
            tol = 1e-10 * max(1.0, abs(lam)) * max(1.0, float(np.max(np.abs(x))) ** (d - 1)) \
                * max(1.0, float(np.max(np.abs(A))), float(np.max(np.abs(B)))) * m
            if res > tol:
                raise InvariantViolation(
                    f"pencil eigenpair (lambda={lam}) failed verification: residual {res}"
                )
            out.append((lam, x))
    return out


# ======================================================================
# classification
# ======================================================================

def classify(t: SingularTuple, zero_tol: float = 1e-8,
             iso_tol: float = ISO_TOL) -> Classification:
    """Re-derive zero/isotropy flags from a polished tuple.

    ``zero_tol`` is an absolute threshold on |prod lambda_i| (solver-side
    classification scales it by hs_norm^d; pass that value for parity).
    For nonzero tuples the all-or-none isotropy dichotomy is enforced:
    a mixed pattern raises InvariantViolation.
    """
    prod = 1.0 + 0.0j
    for lam in t.lambdas:
        prod *= lam
    zero = abs(prod) < zero_tol
    isotropy = tuple(bool(abs(np.dot(v, v)) < iso_tol) for v in t.vectors)
    all_iso = all(isotropy)
    none_iso = not any(isotropy)
    if not zero and not (all_iso or none_iso):
        raise InvariantViolation(
            f"nonzero tuple with mixed isotropy pattern {isotropy}: "
            f"solver bug or misconfigured tolerances"
        )
    return Classification(zero=zero, isotropy=isotropy,
                          all_isotropic=all_iso, none_isotropic=none_iso)
