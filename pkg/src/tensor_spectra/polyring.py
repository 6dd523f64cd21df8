"""Exact arithmetic in truncated integer polynomial rings.

Everything downstream that *counts* (rather than solves) reduces to coefficient
extraction in Z[t_1,...,t_k] / (t_1^c_1, ..., t_k^c_k): multiply a handful of
structured factors, read off one coefficient.  Coefficients are Python ints,
so results are exact at any size.

Monomials are plain exponent tuples; a polynomial is a sparse map from
monomial to coefficient plus the per-variable exponent caps of its ring.
Truncation is applied eagerly during multiplication: any product monomial
that reaches a cap in some variable is dropped on the spot.  This is sound
for coefficient extraction below the caps because exponents only ever grow
under multiplication, so a dropped monomial can never contribute again.

All values are immutable by convention and every operation is a pure
function; the module is safe to use from multiple threads.
"""

from __future__ import annotations

from typing import Dict, Iterable, Sequence, Tuple

# A monomial is the tuple of exponents (one per ring variable).
Monomial = Tuple[int, ...]


class TruncPoly:
    """Sparse polynomial in Z[t_1..t_k] modulo (t_i ** caps[i])."""

    __slots__ = ("caps", "terms")

    def __init__(self, caps: Sequence[int], terms: Dict[Monomial, int]):
        self.caps: Tuple[int, ...] = tuple(int(c) for c in caps)
        if any(c < 1 for c in self.caps):
            raise ValueError(f"every exponent cap must be >= 1, got {self.caps}")
        clean: Dict[Monomial, int] = {}
        for mono, coef in terms.items():
            if coef == 0:
                continue
            if len(mono) != len(self.caps):
                raise ValueError(f"monomial {mono} has wrong arity for caps {self.caps}")
            if any(e < 0 or e >= c for e, c in zip(mono, self.caps)):
                raise ValueError(f"monomial {mono} violates caps {self.caps}")
            clean[tuple(int(e) for e in mono)] = int(coef)
        self.terms: Dict[Monomial, int] = clean

    # ------------------------------------------------------------------
    # conveniences
    # ------------------------------------------------------------------
    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, TruncPoly)
            and self.caps == other.caps
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        return hash((self.caps, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        if not self.terms:
            return f"TruncPoly(caps={self.caps}, 0)"
        bits = []
        for mono in sorted(self.terms):
            coef = self.terms[mono]
            vars_part = "*".join(
                f"t{i + 1}" + (f"^{e}" if e > 1 else "")
                for i, e in enumerate(mono)
                if e > 0
            )
            bits.append(f"{coef}" if not vars_part else f"{coef}*{vars_part}")
        return f"TruncPoly(caps={self.caps}, {' + '.join(bits)})"

    def is_zero(self) -> bool:
        return not self.terms


# ======================================================================
# constructors
# ======================================================================

def poly_zero(caps: Sequence[int]) -> TruncPoly:
    return TruncPoly(caps, {})


def poly_const(caps: Sequence[int], value: int) -> TruncPoly:
    return TruncPoly(caps, {(0,) * len(tuple(caps)): int(value)})


def poly_var(caps: Sequence[int], i: int) -> TruncPoly:
    """The single variable t_i (0-based index) as a polynomial.

    In a ring with caps[i] == 1 the relation t_i = 0 holds, so the result
    is the zero polynomial there.
    """
    caps = tuple(caps)
    if not 0 <= i < len(caps):
        raise IndexError(f"variable index {i} out of range for {len(caps)} variables")
    if caps[i] < 2:
        return poly_zero(caps)
    mono = tuple(1 if j == i else 0 for j in range(len(caps)))
    return TruncPoly(caps, {mono: 1})


def poly_linear(caps: Sequence[int], coeffs: Sequence[int]) -> TruncPoly:
    """The linear form sum_j coeffs[j] * t_j (variables with cap 1 vanish)."""
    caps = tuple(caps)
    if len(coeffs) != len(caps):
        raise ValueError("one linear coefficient per ring variable required")
    terms: Dict[Monomial, int] = {}
    for j, c in enumerate(coeffs):
        if c != 0 and caps[j] >= 2:
            terms[tuple(1 if i == j else 0 for i in range(len(caps)))] = int(c)
    return TruncPoly(caps, terms)


# ======================================================================
# ring operations
# ======================================================================

def _check_same_ring(a: TruncPoly, b: TruncPoly) -> None:
    if a.caps != b.caps:
        raise ValueError(f"ring mismatch: caps {a.caps} vs {b.caps}")


def poly_add(a: TruncPoly, b: TruncPoly) -> TruncPoly:
    """Coefficient-wise sum; zero terms are pruned."""
    _check_same_ring(a, b)
    terms = dict(a.terms)
    for mono, coef in b.terms.items():
        s = terms.get(mono, 0) + coef
        if s == 0:
            terms.pop(mono, None)
        else:
            terms[mono] = s
    return TruncPoly(a.caps, terms)


def poly_mul(a: TruncPoly, b: TruncPoly) -> TruncPoly:
    """Ring product; monomials that reach a cap in any variable vanish."""
    _check_same_ring(a, b)
    caps = a.caps
    terms: Dict[Monomial, int] = {}
    # iterate over the smaller factor on the outside
    if len(a.terms) > len(b.terms):
        a, b = b, a
    for ma, ca in a.terms.items():
        for mb, cb in b.terms.items():
            mono = tuple(ea + eb for ea, eb in zip(ma, mb))
            if any(e >= c for e, c in zip(mono, caps)):
                continue  # killed by the relation t_i^cap_i = 0
            s = terms.get(mono, 0) + ca * cb
            if s == 0:
                terms.pop(mono, None)
            else:
                terms[mono] = s
    return TruncPoly(caps, terms)


def coefficient(p: TruncPoly, mono: Monomial) -> int:
    """Coefficient of the given monomial (zero if absent)."""
    mono = tuple(int(e) for e in mono)
    if len(mono) != len(p.caps):
        raise ValueError(f"monomial {mono} has wrong arity for caps {p.caps}")
    if any(e < 0 or e >= c for e, c in zip(mono, p.caps)):
        raise ValueError(f"monomial {mono} violates caps {p.caps}")
    return p.terms.get(mono, 0)


# ======================================================================
# the structured factor behind every count
# ======================================================================

def quotient_factor(
    i: int,
    m: Sequence[int],
    weights: Sequence[int],
    caps: Sequence[int] | None = None,
) -> TruncPoly:
    """Degree-(m[i]-1) factor  sum_{j=0}^{m[i]-1} h^(m[i]-1-j) * t_i^j.

    Here h = sum_j weights[j] * t_j is the linear form attached to mode i
    (0-based).  With weights = all-ones-except-self the product of these
    factors over all modes generates the plain singular-tuple counts; with
    symmetry-weighted forms it generates the partially symmetric ones.
    The summation form is used on purpose: division by (h - t_i) is
    ill-defined in the truncated ring.

    ``caps`` defaults to ``m`` itself, which is exactly enough to read off
    the target coefficient; pass larger caps to work untruncated (used by
    the telescoping identity test).
    """
    m = tuple(int(v) for v in m)
    if not 0 <= i < len(m):
        raise IndexError(f"mode index {i} out of range for {len(m)} modes")
    if len(weights) != len(m):
        raise ValueError("one weight per mode required")
    ring = tuple(m) if caps is None else tuple(caps)
    h = poly_linear(ring, weights)
    ti = poly_var(ring, i)

    # powers of h up to m[i]-1, then stitch the sum together
    h_pows = [poly_const(ring, 1)]
    for _ in range(m[i] - 1):
        h_pows.append(poly_mul(h_pows[-1], h))
    ti_pow = poly_const(ring, 1)
    acc = poly_zero(ring)
    for j in range(m[i]):
        acc = poly_add(acc, poly_mul(h_pows[m[i] - 1 - j], ti_pow))
        if j < m[i] - 1:
            ti_pow = poly_mul(ti_pow, ti)
    return acc


def poly_prod(factors: Iterable[TruncPoly]) -> TruncPoly:
    """Product of a sequence of polynomials (empty product is 1)."""
    factors = list(factors)
    if not factors:
        raise ValueError("empty product needs a ring; pass at least one factor")
    acc = poly_const(factors[0].caps, 1)
    for f in factors:
        acc = poly_mul(acc, f)
    return acc
