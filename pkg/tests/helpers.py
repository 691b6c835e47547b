"""Independent oracles and small utilities shared by the test modules.

Everything here recomputes its answers from first principles (graph
reachability, explicit path enumeration, exact linear algebra), so the
library's recursive implementations are checked against genuinely
different routes.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache

from bruhat_hypercubes.intervals import BruhatInterval, build_interval
from bruhat_hypercubes.perms import (
    Perm,
    all_perms,
    apply_reflection,
    bruhat_leq,
    length,
    reflections,
)
from bruhat_hypercubes.polynomials import (
    QPoly,
    qp_normalize,
)
from bruhat_hypercubes.reflection_orders import ReflectionOrder, make_order


def brute_length(w: Perm) -> int:
    return sum(
        1
        for i in range(len(w))
        for j in range(i + 1, len(w))
        if w[i] > w[j]
    )


@lru_cache(maxsize=None)
def reachability_leq(n: int) -> dict[tuple[Perm, Perm], bool]:
    """Bruhat order on S_n from scratch: transitive closure of the edge
    relation w -> t*w with length increasing."""
    elements = list(all_perms(n))
    idx = {w: i for i, w in enumerate(elements)}
    m = len(elements)
    reach = [1 << i for i in range(m)]
    by_length = sorted(range(m), key=lambda i: -brute_length(elements[i]))
    succ = [[] for _ in range(m)]
    for i, w in enumerate(elements):
        for t in reflections(n):
            y = apply_reflection(t, w)
            if brute_length(y) > brute_length(w):
                succ[i].append(idx[y])
    for i in by_length:
        for j in succ[i]:
            reach[i] |= reach[j]
    return {
        (elements[i], elements[j]): bool(reach[i] >> j & 1)
        for i in range(m)
        for j in range(m)
    }


def naive_increasing_paths(iv: BruhatInterval, order: ReflectionOrder) -> QPoly:
    """Explicit enumeration of increasing paths bottom -> top, no memo."""
    pos = order.position
    top = iv.size - 1
    counts: dict[int, int] = {}

    def walk(x: int, last: int, edges: int) -> None:
        if x == top:
            counts[edges] = counts.get(edges, 0) + 1
        for y, t in iv.out_edges[x]:
            if pos[t] > last:
                walk(y, pos[t], edges + 1)

    walk(0, -1, 0)
    if not counts:
        return ()
    out = [0] * (max(counts) + 1)
    for k, c in counts.items():
        out[k] = c
    return qp_normalize(out)


def r_from_rtilde(rt: QPoly, ell: int) -> QPoly:
    """Forward substitution: R(q) from R-tilde via R(t^2) = t^ell rt(t - 1/t)."""
    terms: dict[int, int] = {}
    for k, c in enumerate(rt):
        if not c:
            continue
        for m in range(k + 1):
            e = ell + k - 2 * m
            terms[e] = terms.get(e, 0) + c * (-1) ** m * _binom(k, m)
    out = [0] * (max(terms, default=0) // 2 + 1)
    for e, c in terms.items():
        if c:
            assert e % 2 == 0 and e >= 0, "substitution produced odd powers"
            out[e // 2] += c
    return qp_normalize(out)


def _binom(n: int, k: int) -> int:
    import math

    return math.comb(n, k)


def oracle_r(u: Perm, v: Perm) -> QPoly:
    """R-polynomial via lexicographic path counting plus forward substitution;
    never touches the descent recurrence."""
    if u == v:
        return (1,)
    if not bruhat_leq(u, v):
        return ()
    iv = build_interval(u, v)
    rt = naive_increasing_paths(iv, make_order(reflections(len(u))))
    return r_from_rtilde(rt, length(v) - length(u))


def oracle_kl(u: Perm, v: Perm, cache=None) -> QPoly:
    """Kazhdan-Lusztig polynomial by exact rational linear algebra: unknowns
    are the coefficients of P(u, v); the defining functional equation gives
    one linear constraint per power of q."""
    if cache is None:
        cache = {}
    key = (u, v)
    if key in cache:
        return cache[key]
    if not bruhat_leq(u, v):
        cache[key] = ()
        return ()
    if u == v:
        cache[key] = (1,)
        return (1,)
    iv = build_interval(u, v)
    ell = length(v) - length(u)
    partial = [0] * (ell + 1)
    for a in iv.elements:
        if a == u:
            continue
        prod = _mul(oracle_r(u, a), oracle_kl(a, v, cache))
        for k, c in enumerate(prod):
            partial[k] += c
    bound = (ell - 1) // 2
    width = bound + 1
    rows = []
    rhs = []
    for m_exp in range(ell + 1):
        row = [Fraction(0)] * width
        j = ell - m_exp
        if 0 <= j <= bound:
            row[j] += 1
        if m_exp <= bound:
            row[m_exp] -= 1
        rows.append(row)
        rhs.append(Fraction(partial[m_exp]))
    sol = _solve_exact(rows, rhs)
    assert sol is not None, "the defining system must be solvable"
    assert all(x.denominator == 1 for x in sol)
    res = qp_normalize([int(x) for x in sol])
    cache[key] = res
    return res


def _mul(a, b):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        for j, cb in enumerate(b):
            out[i + j] += ca * cb
    return qp_normalize(out)


def _solve_exact(rows, rhs):
    """Least-assumption Gaussian elimination for a consistent overdetermined
    system; returns None if inconsistent."""
    m = len(rows)
    width = len(rows[0]) if rows else 0
    aug = [list(rows[i]) + [rhs[i]] for i in range(m)]
    r = 0
    pivots = []
    for c in range(width):
        pivot = next((k for k in range(r, m) if aug[k][c] != 0), None)
        if pivot is None:
            continue
        aug[r], aug[pivot] = aug[pivot], aug[r]
        inv = 1 / aug[r][c]
        aug[r] = [x * inv for x in aug[r]]
        for k in range(m):
            if k != r and aug[k][c] != 0:
                f = aug[k][c]
                aug[k] = [x - f * y for x, y in zip(aug[k], aug[r])]
        pivots.append(c)
        r += 1
    for row in aug[r:]:
        if row[-1] != 0:
            return None
    out = [Fraction(0)] * width
    for ridx, c in enumerate(pivots):
        out[c] = aug[ridx][-1]
    return out


@lru_cache(maxsize=None)
def comparable_pairs(n: int) -> tuple[tuple[Perm, Perm], ...]:
    perms = sorted(all_perms(n), key=lambda w: (length(w), w))
    return tuple(
        (u, v) for v in perms for u in perms if bruhat_leq(u, v)
    )


def random_functional_order(n: int, rng) -> ReflectionOrder:
    """A random valid reflection order, by sorting roots by the ratio of a
    random integer functional to the pinned positive one."""
    from bruhat_hypercubes.perms import root_of

    while True:
        f1 = [rng.randrange(-50, 50) for _ in range(n)]
        ratios = {}
        ok = True
        for t in reflections(n):
            root = root_of(t, n)
            num = sum(f1[i] * root[i] for i in range(n))
            den = sum((n - 1 - i) * root[i] for i in range(n))
            ratio = Fraction(num, den)
            if ratio in ratios.values():
                ok = False
                break
            ratios[t] = ratio
        if ok:
            return make_order(sorted(reflections(n), key=lambda t: ratios[t]))


def down_set_masks(iv: BruhatInterval) -> list[int]:
    """All order ideals of the interval, as bitmasks."""
    m = iv.size
    out = []

    def rec(pos: int, mask: int) -> None:
        if pos == m:
            out.append(mask)
            return
        below = iv.down_mask[pos] & ~(1 << pos)
        if below & ~mask == 0:
            rec(pos + 1, mask | (1 << pos))
        rec(pos + 1, mask)

    rec(0, 0)
    return out


def mask_bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low
