"""
Exact integer polynomial arithmetic and the R / P / R-tilde families.

A polynomial in q is a tuple of int coefficients, index k holding the
coefficient of q^k, with no trailing zeros; the zero polynomial is ().
Python ints make overflow impossible by construction.

The three recursively defined families are memoized module-wide, keyed by
one-line tuples, so repeated interval analyses share work.  All functions
are pure; under CPython the dict caches are safe to share across threads,
and results are deterministic either way.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InvariantViolation
from .intervals import interval_elements
from .perms import Perm, bruhat_leq, descents, length, right_transposition

QPoly = tuple[int, ...]

ZERO: QPoly = ()
ONE: QPoly = (1,)
Q: QPoly = (0, 1)

LESS_EQUAL = "less-equal"
GREATER_EQUAL = "greater-equal"
EQUAL = "equal"
INCOMPARABLE = "incomparable"


def qp_normalize(coeffs: Sequence[int]) -> QPoly:
    end = len(coeffs)
    while end and coeffs[end - 1] == 0:
        end -= 1
    return tuple(coeffs[:end])


def qp_add(a: QPoly, b: QPoly) -> QPoly:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for k, c in enumerate(b):
        out[k] += c
    return qp_normalize(out)


def qp_sub(a: QPoly, b: QPoly) -> QPoly:
    out = list(a) + [0] * max(0, len(b) - len(a))
    for k, c in enumerate(b):
        out[k] -= c
    return qp_normalize(out)


def qp_mul(a: QPoly, b: QPoly) -> QPoly:
    if not a or not b:
        return ZERO
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                out[i + j] += ca * cb
    return qp_normalize(out)


def qp_shift(a: QPoly, k: int) -> QPoly:
    """Multiply by q^k."""
    return (0,) * k + a if a else ZERO


def qp_deg(a: QPoly) -> int:
    """Degree, with the zero polynomial assigned -1."""
    return len(a) - 1


def qp_eval(a: QPoly, x: int) -> int:
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def qp_mirror(a: QPoly, ell: int) -> QPoly:
    """q^ell * a(1/q); requires deg(a) <= ell."""
    if qp_deg(a) > ell:
        raise ValueError("degree exceeds the mirror exponent")
    out = [0] * (ell + 1)
    for k, c in enumerate(a):
        out[ell - k] = c
    return qp_normalize(out)


def format_qpoly(a: QPoly) -> str:
    """Render ascending, e.g. "1 + q + 3q^2"; the zero polynomial is "0"."""
    if not a:
        return "0"
    parts: list[str] = []
    for k, c in enumerate(a):
        if c == 0:
            continue
        if k == 0:
            body = str(abs(c))
        else:
            mag = "" if abs(c) == 1 else str(abs(c))
            body = f"{mag}q" if k == 1 else f"{mag}q^{k}"
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append(("- " if c < 0 else "+ ") + body)
    return " ".join(parts)


def compare_coefficientwise(a: QPoly, b: QPoly) -> str:
    """The tightest of equal / less-equal / greater-equal / incomparable,
    comparing coefficientwise after zero padding."""
    width = max(len(a), len(b))
    pa = a + (0,) * (width - len(a))
    pb = b + (0,) * (width - len(b))
    le = all(x <= y for x, y in zip(pa, pb))
    ge = all(x >= y for x, y in zip(pa, pb))
    if le and ge:
        return EQUAL
    if le:
        return LESS_EQUAL
    if ge:
        return GREATER_EQUAL
    return INCOMPARABLE


# ---------------------------------------------------------------------------
# Laurent polynomials in t (for the q = t^2 substitution)


@dataclass(frozen=True)
class LaurentPolynomial:
    """Integer Laurent polynomial: coeffs[k] is the coefficient of t^(low+k).

    The first and last stored coefficients are nonzero unless the whole
    polynomial is zero (low == 0, coeffs == ()).
    """

    low: int
    coeffs: tuple[int, ...]

    @staticmethod
    def from_terms(terms: dict[int, int]) -> "LaurentPolynomial":
        live = {e: c for e, c in terms.items() if c}
        if not live:
            return LaurentPolynomial(0, ())
        lo = min(live)
        hi = max(live)
        return LaurentPolynomial(lo, tuple(live.get(e, 0) for e in range(lo, hi + 1)))

    def terms(self) -> dict[int, int]:
        return {self.low + k: c for k, c in enumerate(self.coeffs) if c}

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def high(self) -> int:
        if self.is_zero:
            raise ValueError("zero polynomial has no top exponent")
        return self.low + len(self.coeffs) - 1

    def coeff(self, exponent: int) -> int:
        k = exponent - self.low
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return 0

    def __add__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        terms = self.terms()
        for e, c in other.terms().items():
            terms[e] = terms.get(e, 0) + c
        return LaurentPolynomial.from_terms(terms)

    def __sub__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        return self + other.scale(-1)

    def scale(self, c: int) -> "LaurentPolynomial":
        if c == 0 or self.is_zero:
            return LaurentPolynomial(0, ())
        return LaurentPolynomial(self.low, tuple(c * x for x in self.coeffs))

    def shift(self, k: int) -> "LaurentPolynomial":
        """Multiply by t^k."""
        if self.is_zero:
            return self
        return LaurentPolynomial(self.low + k, self.coeffs)


def laurent_q_squared(a: QPoly) -> LaurentPolynomial:
    """a(t^2) as a Laurent polynomial in t."""
    return LaurentPolynomial.from_terms({2 * k: c for k, c in enumerate(a)})


def t_minus_tinv_power(k: int) -> LaurentPolynomial:
    """(t - 1/t)^k expanded by the binomial theorem."""
    return LaurentPolynomial.from_terms(
        {k - 2 * m: (-1) ** m * math.comb(k, m) for m in range(k + 1)}
    )


def laurent_substitute(a: QPoly, ell: int) -> LaurentPolynomial:
    """t^ell * a(t - 1/t), the forward direction of the R <-> R-tilde bridge."""
    acc = LaurentPolynomial(0, ())
    for k, c in enumerate(a):
        if c:
            acc = acc + t_minus_tinv_power(k).scale(c).shift(ell)
    return acc


# ---------------------------------------------------------------------------
# the R / P / R-tilde families

_R_MEMO: dict[tuple[Perm, Perm], QPoly] = {}
_P_MEMO: dict[tuple[Perm, Perm], QPoly] = {}
_RT_MEMO: dict[tuple[Perm, Perm], QPoly] = {}


def clear_caches() -> None:
    _R_MEMO.clear()
    _P_MEMO.clear()
    _RT_MEMO.clear()


def r_poly(u: Perm, v: Perm) -> QPoly:
    """The R-polynomial, by the descent recurrence.

    R(u, u) = 1; R(u, v) = 0 when u is not <= v; otherwise recurse on any
    right descent s of v:  R(us, vs) when s is also a descent of u, else
    q R(us, vs) + (q - 1) R(u, vs).  The result is independent of the
    descent chosen; we take the smallest.
    """
    key = (u, v)
    hit = _R_MEMO.get(key)
    if hit is not None:
        return hit
    if u == v:
        res = ONE
    elif not bruhat_leq(u, v):
        res = ZERO
    else:
        i, j = min(descents(v))
        vs = right_transposition(v, i, j)
        us = right_transposition(u, i, j)
        if u[i - 1] > u[j - 1]:
            res = r_poly(us, vs)
        else:
            res = qp_add(
                qp_shift(r_poly(us, vs), 1),
                qp_mul((-1, 1), r_poly(u, vs)),
            )
    _R_MEMO[key] = res
    return res


def kl_poly(u: Perm, v: Perm) -> QPoly:
    """The Kazhdan-Lusztig polynomial P(u, v).

    Determined by P(v, v) = 1, deg P <= (l(u,v) - 1)/2 for u < v, and the
    inversion identity  q^l P(1/q) = sum over a in [u, v] of R(u, a) P(a, v).
    The unknown P(u, v) is read off the high coefficients of the partial sum
    (the two sides cannot overlap in degree), then the full identity is
    re-verified exactly.
    """
    key = (u, v)
    hit = _P_MEMO.get(key)
    if hit is not None:
        return hit
    if u == v:
        _P_MEMO[key] = ONE
        return ONE
    if not bruhat_leq(u, v):
        _P_MEMO[key] = ZERO
        return ZERO
    ell = length(v) - length(u)
    partial = ZERO
    for a in sorted(interval_elements(u, v)):
        if a != u:
            partial = qp_add(partial, qp_mul(r_poly(u, a), kl_poly(a, v)))
    bound = (ell - 1) // 2
    coeffs = [0] * (bound + 1)
    for j in range(bound + 1):
        idx = ell - j
        if idx < len(partial):
            coeffs[j] = partial[idx]
    res = qp_normalize(coeffs)
    if qp_mirror(res, ell) != qp_add(res, partial):
        raise InvariantViolation(
            f"P extraction failed the defining identity at ({u}, {v})"
        )
    _P_MEMO[key] = res
    return res


def rtilde_from_r(u: Perm, v: Perm) -> QPoly:
    """The unique R-tilde with t^l R-tilde(t - 1/t) = R(t^2), solved from the
    top coefficient downward; requires u <= v."""
    key = (u, v)
    hit = _RT_MEMO.get(key)
    if hit is not None:
        return hit
    if not bruhat_leq(u, v):
        raise ValueError("R-tilde requires u <= v")
    ell = length(v) - length(u)
    residue = laurent_q_squared(r_poly(u, v))
    out: dict[int, int] = {}
    while not residue.is_zero:
        k = residue.high - ell
        if k < 0 or k > ell or k in out:
            raise InvariantViolation(
                f"R-tilde substitution did not resolve at ({u}, {v})"
            )
        c = residue.coeff(residue.high)
        out[k] = c
        residue = residue - t_minus_tinv_power(k).scale(c).shift(ell)
    coeffs = [0] * (max(out) + 1 if out else 0)
    for k, c in out.items():
        coeffs[k] = c
    res = qp_normalize(coeffs)
    if any(c < 0 for c in res):
        raise InvariantViolation(f"negative R-tilde coefficient at ({u}, {v})")
    _RT_MEMO[key] = res
    return res


def rtilde_cache_items() -> list[tuple[Perm, Perm, QPoly]]:
    """Snapshot of the R-tilde memo, for the harness's on-disk cache."""
    return [(u, v, p) for (u, v), p in _RT_MEMO.items()]


def seed_rtilde_cache(items: Iterable[tuple[Perm, Perm, Sequence[int]]]) -> None:
    for u, v, coeffs in items:
        _RT_MEMO[(tuple(u), tuple(v))] = qp_normalize(tuple(coeffs))
