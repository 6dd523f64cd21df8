"""Dense d-mode tensors: contractions, unfoldings, ranks, symmetrization, IO.

Storage is a flat row-major (C-order, last index fastest) complex128 array;
real tensors are simply the zero-imaginary subset, there is no separate
type.  Tensors are immutable after construction (the buffer is marked
read-only) and every operation here is a pure function, so concurrent
reads need no coordination.

File format (JSON): ``{"dims": [m1, ..., md], "values": [[re, im], ...]}``
with values row-major; ``"real": true`` switches values to bare numbers.
Floats are written with shortest round-trip repr, so save/load is
bit-exact.
"""

from __future__ import annotations

import itertools
import json
import math
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from .counts import DimVector, Partition, validate_dims


class DenseTensor:
    """Immutable dense tensor with dims and a flat row-major value buffer."""

    __slots__ = ("dims", "values")

    def __init__(self, dims: Sequence[int], values):
        self.dims: DimVector = validate_dims(dims)
        buf = np.ascontiguousarray(values, dtype=np.complex128).reshape(-1)
        size = math.prod(self.dims)
        if buf.size != size:
            raise ValueError(f"got {buf.size} values for dims {self.dims} (need {size})")
        buf = buf.copy()
        buf.flags.writeable = False
        self.values: np.ndarray = buf

    @classmethod
    def from_array(cls, arr) -> "DenseTensor":
        arr = np.asarray(arr)
        return cls(arr.shape, arr.reshape(-1))

    @property
    def order(self) -> int:
        return len(self.dims)

    @property
    def array(self) -> np.ndarray:
        """Read-only view shaped to dims."""
        return self.values.reshape(self.dims)

    def is_real(self, tol: float = 0.0) -> bool:
        return bool(np.max(np.abs(self.values.imag), initial=0.0) <= tol)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, DenseTensor)
            and self.dims == other.dims
            and bool(np.array_equal(self.values, other.values))
        )

    def __hash__(self):
        return hash((self.dims, self.values.tobytes()))

    def __repr__(self) -> str:
        return f"DenseTensor(dims={self.dims})"


class UnfoldedMatrix:
    """Mode-i unfolding: row j is the slice at index j of mode i, remaining
    indices flattened in lexicographic (row-major) order."""

    __slots__ = ("mode", "matrix")

    def __init__(self, mode: int, matrix: np.ndarray):
        self.mode = int(mode)
        self.matrix = matrix

    @property
    def rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def cols(self) -> int:
        return self.matrix.shape[1]


# ======================================================================
# contractions
# ======================================================================

def _check_vectors(dims: DimVector, xs: Sequence[np.ndarray], skip: int | None) -> List[np.ndarray]:
    expected = [m for j, m in enumerate(dims) if j != skip]
    if len(xs) != len(expected):
        raise ValueError(f"need {len(expected)} vectors, got {len(xs)}")
    out = []
    for m, x in zip(expected, xs):
        v = np.asarray(x, dtype=np.complex128).reshape(-1)
        if v.size != m:
            raise ValueError(f"vector of length {v.size} does not match mode dimension {m}")
        out.append(v)
    return out


def contract_all_but(T: DenseTensor, i: int, xs: Sequence) -> np.ndarray:
    """Contract every mode except i (0-based) with the given vectors.

    ``xs`` lists the d-1 vectors in increasing mode order, skipping mode i.
    No conjugation is applied; the map is multilinear in each vector.
    """
    d = T.order
    if not 0 <= i < d:
        raise ValueError(f"mode {i} out of range for order {d}")
    vs = _check_vectors(T.dims, xs, skip=i)
    # contract from the highest mode down so lower axis indices stay valid
    arr = T.array
    pos = len(vs) - 1
    for j in range(d - 1, -1, -1):
        if j == i:
            continue
        arr = np.tensordot(arr, vs[pos], axes=([j], [0]))
        pos -= 1
    return np.ascontiguousarray(arr)


def contract_full(T: DenseTensor, xs: Sequence) -> complex:
    """Full multilinear contraction of T with one vector per mode."""
    vs = _check_vectors(T.dims, xs, skip=None)
    return complex(np.dot(vs[0], contract_all_but(T, 0, vs[1:])))


# ======================================================================
# unfoldings and mode ranks
# ======================================================================

def unfold(T: DenseTensor, i: int) -> UnfoldedMatrix:
    """Mode-i unfolding (m_i rows, prod of remaining dims columns)."""
    d = T.order
    if not 0 <= i < d:
        raise ValueError(f"mode {i} out of range for order {d}")
    mat = np.moveaxis(T.array, i, 0).reshape(T.dims[i], -1)
    return UnfoldedMatrix(i, np.ascontiguousarray(mat))


def fold(U: UnfoldedMatrix, dims: Sequence[int]) -> DenseTensor:
    """Exact inverse of unfold for the given original dims."""
    dims = validate_dims(dims)
    i = U.mode
    rest = [m for j, m in enumerate(dims) if j != i]
    arr = U.matrix.reshape([dims[i]] + rest)
    return DenseTensor.from_array(np.moveaxis(arr, 0, i))


def mode_rank(T: DenseTensor, i: int, tol: float = 1e-10) -> int:
    """Numerical rank of the mode-i unfolding.

    Counts singular values above tol times the largest one (exact algebraic
    rank is replaced by this standard numerical surrogate).
    """
    if tol < 0:
        raise ValueError("tol must be >= 0")
    s = np.linalg.svd(unfold(T, i).matrix, compute_uv=False)
    if s.size == 0 or s[0] <= 0.0:
        return 0
    return int(np.count_nonzero(s > tol * s[0]))


# ======================================================================
# symmetrization and embedding
# ======================================================================

def symmetrize_last(T: DenseTensor) -> DenseTensor:
    """Average over all permutations of the last d-1 indices (cube input).

    The result contracts identically to T against d-1 copies of any single
    vector, and the map is a projection (idempotent).
    """
    d = T.order
    if len(set(T.dims)) > 1:
        raise ValueError(f"symmetrization needs a cube, got dims {T.dims}")
    if d <= 2:
        return T
    arr = T.array
    acc = np.zeros_like(arr)
    count = 0
    for perm in itertools.permutations(range(1, d)):
        acc = acc + np.transpose(arr, axes=(0,) + perm)
        count += 1
    return DenseTensor.from_array(acc / count)


def partial_symmetrize(T: DenseTensor, part: Partition) -> DenseTensor:
    """Average over index permutations within each block of the partition."""
    if T.dims != part.expand():
        raise ValueError(f"dims {T.dims} do not match partition expansion {part.expand()}")
    blocks: List[List[int]] = []
    start = 0
    for w in part.omega:
        blocks.append(list(range(start, start + w)))
        start += w
    arr = T.array
    acc = np.zeros_like(arr)
    count = 0
    for combo in itertools.product(*(itertools.permutations(b) for b in blocks)):
        axes = [0] * T.order
        for block, perm in zip(blocks, combo):
            for src, dst in zip(block, perm):
                axes[src] = dst
        acc = acc + np.transpose(arr, axes=axes)
        count += 1
    return DenseTensor.from_array(acc / count)


def embed(core: DenseTensor, dims: Sequence[int]) -> DenseTensor:
    """Zero-pad a tensor into a larger shape (mode ranks are preserved)."""
    dims = validate_dims(dims)
    if len(dims) != core.order:
        raise ValueError(f"order mismatch: core {core.order} modes, target {len(dims)}")
    if any(c > m for c, m in zip(core.dims, dims)):
        raise ValueError(f"core dims {core.dims} exceed target {dims}")
    out = np.zeros(dims, dtype=np.complex128)
    out[tuple(slice(0, c) for c in core.dims)] = core.array
    return DenseTensor.from_array(out)


def rank_feasible(r: Sequence[int]) -> bool:
    """True iff r_i^2 <= prod_j r_j for every i (attainable mode-rank vector)."""
    rr = validate_dims(r)
    total = math.prod(rr)
    return all(v * v <= total for v in rr)


# ======================================================================
# constructors, norms
# ======================================================================

def diagonal(m: int, d: int) -> DenseTensor:
    """Order-d cube with ones on the main diagonal."""
    arr = np.zeros((m,) * d, dtype=np.complex128)
    idx = np.arange(m)
    arr[(idx,) * d] = 1.0
    return DenseTensor.from_array(arr)


def almost_diagonal(B, d: int) -> DenseTensor:
    """Order-d tensor with t[i, j, ..., j] = B[i, j], zero elsewhere.

    Contracting the last d-1 modes with a vector x gives B @ (x ** (d-1))
    entrywise in x — the defining property, exercised by tests.
    """
    B = np.asarray(B, dtype=np.complex128)
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise ValueError(f"square matrix required, got shape {B.shape}")
    m = B.shape[0]
    if d < 2:
        raise ValueError("order must be >= 2")
    arr = np.zeros((m,) * d, dtype=np.complex128)
    idx = np.arange(m)
    for i in range(m):
        arr[(np.full(m, i),) + (idx,) * (d - 1)] = B[i]
    return DenseTensor.from_array(arr)


def random(dims: Sequence[int], seed: int, field: str = "real") -> DenseTensor:
    """Seeded Gaussian tensor; field is "real" or "complex"."""
    dims = validate_dims(dims)
    rng = np.random.default_rng(seed)
    size = math.prod(dims)
    if field == "real":
        vals = rng.standard_normal(size).astype(np.complex128)
    elif field == "complex":
        vals = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    else:
        raise ValueError(f'field must be "real" or "complex", got {field!r}')
    return DenseTensor(dims, vals)


def hs_norm(T: DenseTensor) -> float:
    """Hilbert-Schmidt (Frobenius) norm."""
    return float(np.linalg.norm(T.values))


def inner(T: DenseTensor, S: DenseTensor) -> complex:
    """Hilbert-Schmidt inner product <T, S> = sum T * conj(S)."""
    if T.dims != S.dims:
        raise ValueError(f"shape mismatch: {T.dims} vs {S.dims}")
    return complex(np.vdot(S.values, T.values))


# ======================================================================
# JSON round trip
# ======================================================================

def to_json_dict(T: DenseTensor) -> dict:
    v = T.values
    real = bool(np.all(v.imag == 0.0)) and not bool(np.any(np.signbit(v.imag)))
    if real:
        return {"dims": list(T.dims), "real": True, "values": [float(x) for x in v.real]}
    return {"dims": list(T.dims), "values": [[float(x.real), float(x.imag)] for x in v]}


def from_json_dict(obj: dict) -> DenseTensor:
    try:
        dims = [int(m) for m in obj["dims"]]
        raw = obj["values"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed tensor object: {exc}") from exc
    try:
        if obj.get("real", False):
            vals = np.array([float(x) for x in raw], dtype=np.float64).astype(np.complex128)
        else:
            vals = np.array(
                [complex(float(re), float(im)) for re, im in raw], dtype=np.complex128
            )
    except (TypeError, ValueError) as exc:
        raise ValueError(f"malformed tensor values: {exc}") from exc
    return DenseTensor(dims, vals)


def save_tensor(T: DenseTensor, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(to_json_dict(T), fh)
        fh.write("\n")


def load_tensor(path: str) -> DenseTensor:
    with open(path) as fh:
        return from_json_dict(json.load(fh))
