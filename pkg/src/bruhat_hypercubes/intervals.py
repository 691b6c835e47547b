"""
Bruhat intervals [u, v]: element sets, Hasse diagrams, reflection-labelled
Bruhat graphs, and abstract-poset isomorphism.

Elements of an interval are referenced by dense integer indices, assigned in
(rank, one-line notation) order, so index 0 is u and the last index is v.
Subsets of an interval are bitmasks (Python ints) wherever speed matters.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional

from .errors import EmptyIntervalError
from .perms import (
    Perm,
    Reflection,
    Root,
    apply_reflection,
    bruhat_leq,
    format_perm,
    length,
    parse_perm,
    reflection_length_delta,
    reflections,
    root_of,
)


def interval_elements(u: Perm, v: Perm) -> set[Perm]:
    """All x with u <= x <= v, by BFS downward from v along covers."""
    if not bruhat_leq(u, v):
        raise EmptyIntervalError(
            f"{format_perm(u)} is not <= {format_perm(v)} in Bruhat order"
        )
    T = reflections(len(u))
    seen = {v}
    frontier = [v]
    while frontier:
        nxt = []
        for x in frontier:
            for t in T:
                if reflection_length_delta(t, x) == -1:
                    y = apply_reflection(t, x)
                    if y not in seen and bruhat_leq(u, y):
                        seen.add(y)
                        nxt.append(y)
        frontier = nxt
    return seen


@dataclass(eq=False)
class BruhatInterval:
    """The interval [u, v] with its Hasse diagram and Bruhat graph.

    Immutable by convention after construction; build with build_interval.
    up_mask[i] / down_mask[i] are bitmasks of {j : x_i <= x_j} and
    {j : x_j <= x_i}; out_mask[i] is the bitmask of Bruhat-edge targets of i.
    """

    bottom: Perm
    top: Perm
    elements: tuple[Perm, ...]
    index: dict[Perm, int]
    rank: tuple[int, ...]
    hasse_edges: tuple[tuple[int, int], ...]
    bruhat_edges: tuple[tuple[int, int, Reflection], ...]
    out_edges: tuple[tuple[tuple[int, Reflection], ...], ...]
    in_edges: tuple[tuple[tuple[int, Reflection], ...], ...]
    out_mask: tuple[int, ...]
    up_mask: tuple[int, ...]
    down_mask: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.bottom)

    @property
    def size(self) -> int:
        return len(self.elements)

    @property
    def length(self) -> int:
        return self.rank[-1]

    def leq(self, i: int, j: int) -> bool:
        return bool(self.up_mask[i] >> j & 1)

    def comparable(self, i: int, j: int) -> bool:
        return bool((self.up_mask[i] >> j | self.up_mask[j] >> i) & 1)

    @cached_property
    def diamonds(self):
        from .hypercubes import enumerate_diamonds

        return enumerate_diamonds(self)

    @cached_property
    def poset(self) -> "AbstractPoset":
        return AbstractPoset(self.size, self.hasse_edges, self.rank)


def build_interval(u: Perm, v: Perm) -> BruhatInterval:
    """Materialize [u, v]; raises EmptyIntervalError when u is not <= v."""
    base = length(u)
    elements = sorted(interval_elements(u, v), key=lambda x: (length(x), x))
    index = {x: i for i, x in enumerate(elements)}
    rank = tuple(length(x) - base for x in elements)
    m = len(elements)

    T = reflections(len(u))
    hasse: list[tuple[int, int]] = []
    bruhat: list[tuple[int, int, Reflection]] = []
    out_edges: list[list[tuple[int, Reflection]]] = [[] for _ in range(m)]
    in_edges: list[list[tuple[int, Reflection]]] = [[] for _ in range(m)]
    out_mask = [0] * m
    for i, x in enumerate(elements):
        for t in T:
            delta = reflection_length_delta(t, x)
            if delta < 0:
                continue
            j = index.get(apply_reflection(t, x))
            if j is None:
                continue
            bruhat.append((i, j, t))
            out_edges[i].append((j, t))
            in_edges[j].append((i, t))
            out_mask[i] |= 1 << j
            if delta == 1:
                hasse.append((i, j))

    # transitive closure along covers, by rank
    up_mask = [0] * m
    down_mask = [0] * m
    for i in range(m - 1, -1, -1):
        acc = 1 << i
        for j, t in out_edges[i]:
            if rank[j] == rank[i] + 1:
                acc |= up_mask[j]
        up_mask[i] = acc
    for j in range(m):
        acc = 1 << j
        for i, t in in_edges[j]:
            if rank[i] == rank[j] - 1:
                acc |= down_mask[i]
        down_mask[j] = acc

    return BruhatInterval(
        bottom=u,
        top=v,
        elements=tuple(elements),
        index=index,
        rank=rank,
        hasse_edges=tuple(hasse),
        bruhat_edges=tuple(bruhat),
        out_edges=tuple(tuple(es) for es in out_edges),
        in_edges=tuple(tuple(es) for es in in_edges),
        out_mask=tuple(out_mask),
        up_mask=tuple(up_mask),
        down_mask=tuple(down_mask),
    )


def atom_indices(iv: BruhatInterval) -> tuple[tuple[int, Reflection], ...]:
    """Indices of the elements covering u, with their edge labels."""
    return tuple((j, t) for j, t in iv.out_edges[0] if iv.rank[j] == 1)


def atoms(iv: BruhatInterval) -> tuple[tuple[Perm, Reflection, Root], ...]:
    """The atoms of [u, v] as (element, reflection, root) triples."""
    return tuple(
        (iv.elements[j], t, root_of(t, iv.n)) for j, t in atom_indices(iv)
    )


# ---------------------------------------------------------------------------
# abstract posets and isomorphism


@dataclass(frozen=True)
class AbstractPoset:
    """A graded poset given by its Hasse relation on {0, ..., size-1}."""

    size: int
    hasse: tuple[tuple[int, int], ...]
    rank: tuple[int, ...]


def _refined_colors(p: AbstractPoset, q: AbstractPoset):
    """Iteratively refine vertex colors on both posets simultaneously.

    Returns (colors_p, colors_q) or None when the color multisets diverge,
    which certifies non-isomorphism.
    """
    up_p, down_p = _adjacency(p)
    up_q, down_q = _adjacency(q)
    col_p = list(p.rank)
    col_q = list(q.rank)
    if sorted(col_p) != sorted(col_q):
        return None
    while True:
        sigs = {}

        def sig_of(x, col, up, down):
            return (
                col[x],
                tuple(sorted(col[y] for y in up[x])),
                tuple(sorted(col[y] for y in down[x])),
            )

        raw_p = [sig_of(x, col_p, up_p, down_p) for x in range(p.size)]
        raw_q = [sig_of(x, col_q, up_q, down_q) for x in range(q.size)]
        for s in sorted(set(raw_p) | set(raw_q)):
            sigs[s] = len(sigs)
        new_p = [sigs[s] for s in raw_p]
        new_q = [sigs[s] for s in raw_q]
        if sorted(new_p) != sorted(new_q):
            return None
        if len(set(new_p)) == len(set(col_p)):
            return new_p, new_q
        col_p, col_q = new_p, new_q


def _adjacency(p: AbstractPoset):
    up = [[] for _ in range(p.size)]
    down = [[] for _ in range(p.size)]
    for a, b in p.hasse:
        up[a].append(b)
        down[b].append(a)
    return up, down


def poset_isomorphic(p: AbstractPoset, q: AbstractPoset) -> Optional[tuple[int, ...]]:
    """A rank-preserving isomorphism p -> q as an index tuple, or None.

    Backtracking seeded by iteratively refined (rank, degree) vertex
    signatures; the returned mapping is verified against both edge sets.
    """
    if p.size != q.size or len(p.hasse) != len(q.hasse):
        return None
    colors = _refined_colors(p, q)
    if colors is None:
        return None
    col_p, col_q = colors
    up_p, down_p = _adjacency(p)
    up_q, down_q = _adjacency(q)
    up_q_set = [set(ys) for ys in up_q]
    down_q_set = [set(ys) for ys in down_q]

    by_color_q: dict[int, list[int]] = {}
    for y, c in enumerate(col_q):
        by_color_q.setdefault(c, []).append(y)
    # small candidate lists first keeps the search tree thin
    order = sorted(range(p.size), key=lambda x: (len(by_color_q[col_p[x]]), x))

    up_p_set = [set(ys) for ys in up_p]
    down_p_set = [set(ys) for ys in down_p]
    mapping = [-1] * p.size
    inv = [-1] * q.size

    def extend(pos: int) -> bool:
        if pos == len(order):
            return True
        x = order[pos]
        for y in by_color_q[col_p[x]]:
            if inv[y] >= 0:
                continue
            ok = all(
                mapping[x2] < 0 or mapping[x2] in up_q_set[y] for x2 in up_p[x]
            ) and all(
                mapping[x2] < 0 or mapping[x2] in down_q_set[y] for x2 in down_p[x]
            ) and all(
                inv[y2] < 0 or inv[y2] in up_p_set[x] for y2 in up_q[y]
            ) and all(
                inv[y2] < 0 or inv[y2] in down_p_set[x] for y2 in down_q[y]
            )
            if not ok:
                continue
            mapping[x] = y
            inv[y] = x
            if extend(pos + 1):
                return True
            mapping[x] = -1
            inv[y] = -1
        return False

    if not extend(0):
        return None
    result = tuple(mapping)
    # verify: bijection carrying the Hasse relation exactly
    assert sorted(result) == list(range(p.size))
    mapped = {(result[a], result[b]) for a, b in p.hasse}
    if mapped != set(q.hasse):
        return None
    return result


def iso_signature(p: AbstractPoset):
    """A cheap isomorphism invariant, usable as a grouping key."""
    up, down = _adjacency(p)
    col = list(p.rank)
    while True:
        sigs = {}
        raw = [
            (
                col[x],
                tuple(sorted(col[y] for y in up[x])),
                tuple(sorted(col[y] for y in down[x])),
            )
            for x in range(p.size)
        ]
        for s in sorted(set(raw)):
            sigs[s] = len(sigs)
        new = [sigs[s] for s in raw]
        if len(set(new)) == len(set(col)):
            return (p.size, len(p.hasse), tuple(sorted(raw)))
        col = new


# ---------------------------------------------------------------------------
# JSON serialization


def interval_to_json(iv: BruhatInterval) -> dict:
    """Elements in one-line notation; edges as index pairs, labels as [i, j]."""
    return {
        "u": format_perm(iv.bottom),
        "v": format_perm(iv.top),
        "elements": [format_perm(x) for x in iv.elements],
        "hasse_edges": [[i, j] for i, j in iv.hasse_edges],
        "bruhat_edges": [[i, j, [t[0], t[1]]] for i, j, t in iv.bruhat_edges],
    }


def interval_from_json(payload: dict) -> BruhatInterval:
    """Rebuild an interval from its JSON form, validating the payload."""
    iv = build_interval(parse_perm(payload["u"]), parse_perm(payload["v"]))
    if interval_to_json(iv) != payload:
        raise ValueError("interval payload does not match its rebuilt form")
    return iv
