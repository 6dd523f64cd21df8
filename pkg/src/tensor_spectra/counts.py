"""Exact counts of singular vector tuples of generic tensors.

A generic complex m_1 x ... x m_d tensor has finitely many singular vector
tuples up to scaling, and their number is the coefficient of
t_1^(m_1-1) * ... * t_d^(m_d-1) in a product of structured polynomial
factors, one per mode, computed exactly in a truncated integer ring
(see polyring).  The same extraction with symmetry-weighted linear forms
counts tuples of partially symmetric tensors, which specializes to the
eigenvector count of symmetric tensors and to a two-block family with
closed forms.

All functions return Python ints (exact at any size) and are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

from .polyring import coefficient, poly_prod, quotient_factor

DimVector = Tuple[int, ...]


# ======================================================================
# partitions of the mode set into symmetry blocks
# ======================================================================

@dataclass(frozen=True)
class Partition:
    """Symmetry pattern: block sizes ``omega`` and block dimensions ``mprime``.

    Block k glues together ``omega[k]`` modes that all share dimension
    ``mprime[k]`` and carry one common vector.  ``omega == (1,)*d`` is the
    unsymmetric case; ``omega == (d,)`` is full symmetry.
    """

    omega: Tuple[int, ...]
    mprime: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "omega", tuple(int(w) for w in self.omega))
        object.__setattr__(self, "mprime", tuple(int(m) for m in self.mprime))
        if len(self.omega) == 0 or len(self.omega) != len(self.mprime):
            raise ValueError("need equally many block sizes and block dimensions")
        if any(w < 1 for w in self.omega):
            raise ValueError(f"block sizes must be positive, got {self.omega}")
        if any(m < 1 for m in self.mprime):
            raise ValueError(f"block dimensions must be >= 1, got {self.mprime}")

    @property
    def num_blocks(self) -> int:
        return len(self.omega)

    @property
    def order(self) -> int:
        """Total tensor order d = sum of block sizes."""
        return sum(self.omega)

    def expand(self) -> DimVector:
        """Dimension vector with mprime[k] repeated omega[k] times."""
        dims: List[int] = []
        for w, m in zip(self.omega, self.mprime):
            dims.extend([m] * w)
        return tuple(dims)


def validate_dims(m: Sequence[int]) -> DimVector:
    dims = tuple(int(v) for v in m)
    if len(dims) == 0:
        raise ValueError("dimension vector must be non-empty")
    if any(v < 1 for v in dims):
        raise ValueError(f"mode dimensions must be >= 1, got {dims}")
    return dims


# ======================================================================
# the two coefficient-extraction counts
# ======================================================================

def singular_tuple_count(m: Sequence[int]) -> int:
    """Number of singular vector tuples of a generic tensor of shape m.

    Coefficient of prod_i t_i^(m_i - 1) in the product over modes of the
    quotient factors built from the linear forms sum_{j != i} t_j.  Exact.
    (The genericity statement behind the count assumes every m_i >= 2;
    m_i = 1 is accepted and degrades gracefully.)
    """
    dims = validate_dims(m)
    d = len(dims)
    factors = []
    for i in range(d):
        weights = [1] * d
        weights[i] = 0
        factors.append(quotient_factor(i, dims, weights))
    target = tuple(v - 1 for v in dims)
    return coefficient(poly_prod(factors), target)


def partial_symmetric_count(part: Partition) -> int:
    """Number of symmetry-respecting singular vector tuples for a pattern.

    Same extraction as singular_tuple_count but over one variable per
    block, with the linear form of block i weighted (omega_i - 1) on its
    own variable and omega_j on the others.
    """
    p = part.num_blocks
    caps = part.mprime
    factors = []
    for i in range(p):
        weights = [part.omega[j] if j != i else part.omega[i] - 1 for j in range(p)]
        factors.append(quotient_factor(i, caps, weights))
    target = tuple(v - 1 for v in caps)
    return coefficient(poly_prod(factors), target)


# ======================================================================
# closed forms
# ======================================================================

def cartwright_sturmfels(m: int, d: int) -> int:
    """Eigenvector count of a generic symmetric tensor: ((d-1)^m - 1)/(d-2)."""
    m, d = int(m), int(d)
    if d <= 2:
        raise ValueError(f"closed form requires order d >= 3, got d={d}")
    if m < 1:
        raise ValueError(f"dimension must be >= 1, got m={m}")
    num = (d - 1) ** m - 1
    if num % (d - 2) != 0:
        raise AssertionError(f"non-exact division in closed form: {num} / {d - 2}")
    return num // (d - 2)


def two_block_double_sum(m1: int, m2: int, d: int) -> int:
    """Double binomial sum sum_{i<m1} sum_{j<m2} C(i,j)(d-2)^j (d-1)^(i-j).

    Valid as a tuple count only for m1 <= m2: for m1 = m2 + 1 it loses a
    boundary term and overshoots (e.g. (4,3,3): sum 39, true count 32).
    Exposed for exactly that comparison; prefer two_block_count.
    """
    m1, m2, d = int(m1), int(m2), int(d)
    total = 0
    for i in range(m1):
        for j in range(min(i, m2 - 1) + 1):
            total += math.comb(i, j) * (d - 2) ** j * (d - 1) ** (i - j)
    return total


def two_block_count(m1: int, m2: int, d: int) -> int:
    """Tuple count for the pattern with one block of d-1 modes and one single mode.

    Returns the coefficient-extraction count for omega = (d-1, 1),
    mprime = (m1, m2), cross-checked against the closed forms in their
    regimes: for m1 <= m2 it equals ((2d-3)^m1 - 1)/(2d-4) (and the double
    binomial sum); for m1 = m2 + 1 it equals that value minus (d-1)^(m1-1).
    """
    m1, m2, d = int(m1), int(m2), int(d)
    if d < 3:
        raise ValueError(f"two-block pattern needs order d >= 3, got d={d}")
    if m1 < 1 or m2 < 1:
        raise ValueError(f"dimensions must be >= 1, got ({m1}, {m2})")
    count = partial_symmetric_count(Partition(omega=(d - 1, 1), mprime=(m1, m2)))
    num = (2 * d - 3) ** m1 - 1
    if num % (2 * d - 4) != 0:
        raise AssertionError(f"non-exact division in closed form: {num} / {2 * d - 4}")
    closed = num // (2 * d - 4)
    if m1 <= m2:
        if count != closed or count != two_block_double_sum(m1, m2, d):
            raise AssertionError(
                f"closed-form cross-check failed for ({m1},{m2},{d}): "
                f"count {count}, closed {closed}"
            )
    elif m1 == m2 + 1:
        if count != closed - (d - 1) ** (m1 - 1):
            raise AssertionError(
                f"closed-form cross-check failed for ({m1},{m2},{d}): "
                f"count {count}, closed {closed - (d - 1) ** (m1 - 1)}"
            )
    return count


def pencil_eigen_count(m: int, d: int) -> int:
    """Number of eigenvalues of a generic order-d tensor pencil on C^m."""
    m, d = int(m), int(d)
    if m < 1:
        raise ValueError(f"dimension must be >= 1, got m={m}")
    if d < 2:
        raise ValueError(f"order must be >= 2, got d={d}")
    return m * (d - 1) ** (m - 1)


# ======================================================================
# the reference table of third-order counts
# ======================================================================

# One entry per instantiation of a printed row; "n >= k" rows appear at
# n = k and n = k + 2 (the second sample witnesses stabilization), and the
# two formula rows (2,m,m+1 -> 2m^2 and 3,m,m+2 -> (8m^3 - 6m^2 + 7m)/3)
# appear at every m the table covers.
REFERENCE_COUNTS: List[Tuple[DimVector, int]] = [
    ((2, 2, 2), 6),
    ((2, 2, 3), 8), ((2, 2, 5), 8),          # 2,2,n    (n >= 3)
    ((2, 3, 3), 15),
    ((2, 3, 4), 18), ((2, 3, 6), 18),        # 2,3,n    (n >= 4)
    ((2, 4, 4), 28),
    ((2, 4, 5), 32), ((2, 4, 7), 32),        # 2,4,n    (n >= 5)
    ((2, 5, 5), 45),
    ((2, 5, 6), 50), ((2, 5, 8), 50),        # 2,5,n    (n >= 6)
    ((2, 2, 3), 2 * 2 ** 2),                 # 2,m,m+1 = 2m^2, m = 2..5
    ((2, 3, 4), 2 * 3 ** 2),
    ((2, 4, 5), 2 * 4 ** 2),
    ((2, 5, 6), 2 * 5 ** 2),
    ((3, 3, 3), 37),
    ((3, 3, 4), 55),
    ((3, 3, 5), 61), ((3, 3, 7), 61),        # 3,3,n    (n >= 5)
    ((3, 4, 4), 104),
    ((3, 4, 5), 138),
    ((3, 4, 6), 148), ((3, 4, 8), 148),      # 3,4,n    (n >= 6)
    ((3, 5, 5), 225),
    ((3, 5, 6), 280),
    ((3, 5, 7), 295), ((3, 5, 9), 295),      # 3,5,n    (n >= 7)
    ((3, 3, 5), (8 * 27 - 6 * 9 + 7 * 3) // 3),   # 3,m,m+2, m = 3..5
    ((3, 4, 6), (8 * 64 - 6 * 16 + 7 * 4) // 3),
    ((3, 5, 7), (8 * 125 - 6 * 25 + 7 * 5) // 3),
    ((4, 4, 4), 240),
    ((4, 4, 5), 380),
    ((4, 4, 6), 460),
    ((4, 4, 7), 480), ((4, 4, 9), 480),      # 4,4,n    (n >= 7)
    ((4, 5, 5), 725),
    ((4, 5, 6), 1030),
    ((4, 5, 7), 1185),
    ((4, 5, 8), 1220), ((4, 5, 10), 1220),   # 4,5,n    (n >= 8)
    ((5, 5, 5), 1621),
    ((5, 5, 6), 2671),
    ((5, 5, 7), 3461),
    ((5, 5, 8), 3811),
    ((5, 5, 9), 3881), ((5, 5, 11), 3881),   # 5,5,n    (n >= 9)
]


def reference_table() -> List[Tuple[DimVector, int]]:
    """Recompute every reference-table row and verify it; returns (dims, count).

    Raises RuntimeError on the first mismatch between the coefficient
    extraction and the stored value.
    """
    out: List[Tuple[DimVector, int]] = []
    for dims, expected in REFERENCE_COUNTS:
        got = singular_tuple_count(dims)
        if got != expected:
            raise RuntimeError(
                f"reference table mismatch at {dims}: computed {got}, stored {expected}"
            )
        out.append((dims, got))
    return out
