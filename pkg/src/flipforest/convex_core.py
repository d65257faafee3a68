"""Convex point sets, chords, plane spanning trees and their enumeration.

Points are the labels ``1..n`` in counterclockwise order.  Everything is
decided from labels alone: in convex position every point is extreme, so
no point can lie inside a triangle spanned by three others.

A tree is stored as an integer bitmask over the ``n(n-1)/2`` chords, where
bit ``i`` belongs to the ``i``-th chord in lexicographic ``(a, b)`` order.
The mask doubles as the canonical code; canonical order is integer order.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, NamedTuple

MAX_ENUMERATION_N = 12


class Chord(NamedTuple):
    a: int
    b: int

    def __str__(self) -> str:
        return f"({self.a},{self.b})"


def chord(u: int, v: int) -> Chord:
    if u == v:
        raise ValueError(f"degenerate chord ({u},{v})")
    return Chord(u, v) if u < v else Chord(v, u)


class TreeError(ValueError):
    """Base class for invalid tree candidates."""


class LabelError(TreeError):
    pass


class WrongEdgeCount(TreeError):
    def __init__(self, count: int, n: int):
        super().__init__(f"expected {n - 1} edges, got {count}")
        self.count = count
        self.n = n


class CrossingPair(TreeError):
    def __init__(self, e: Chord, f: Chord):
        super().__init__(f"edges {e} and {f} cross")
        self.e = e
        self.f = f


class Disconnected(TreeError):
    def __init__(self, witness: tuple[int, ...]):
        super().__init__(f"component {witness} is not spanning")
        self.witness = witness


def check_label(n: int, v: int) -> None:
    if not 1 <= v <= n:
        raise LabelError(f"label {v} outside 1..{n}")


def crosses(e: Chord, f: Chord) -> bool:
    a, b = e
    inside = (a < f[0] < b) + (a < f[1] < b)
    if inside != 1:
        return False
    return f[0] not in (a, b) and f[1] not in (a, b)


def is_hull_edge(e: Chord, n: int) -> bool:
    check_label(n, e[0])
    check_label(n, e[1])
    return e[1] - e[0] == 1 or (e[0] == 1 and e[1] == n)


class Geometry:
    """Per-``n`` lookup tables shared by all mask-level routines."""

    def __init__(self, n: int):
        if n < 3:
            raise ValueError("need at least 3 points")
        self.n = n
        self.chords: list[Chord] = [Chord(a, b) for a in range(1, n + 1) for b in range(a + 1, n + 1)]
        self.index: dict[Chord, int] = {c: i for i, c in enumerate(self.chords)}
        self.bit: dict[Chord, int] = {c: 1 << i for i, c in enumerate(self.chords)}
        self.cross: list[int] = []
        for c in self.chords:
            m = 0
            for j, d in enumerate(self.chords):
                if crosses(c, d):
                    m |= 1 << j
            self.cross.append(m)
        self.hull_mask = 0
        for c in self.chords:
            if c[1] - c[0] == 1 or (c[0] == 1 and c[1] == n):
                self.hull_mask |= self.bit[c]
        self.full_mask = (1 << len(self.chords)) - 1

    def edges(self, mask: int) -> list[Chord]:
        out = []
        while mask:
            low = mask & -mask
            out.append(self.chords[low.bit_length() - 1])
            mask ^= low
        return out

    def indices(self, mask: int) -> list[int]:
        out = []
        while mask:
            low = mask & -mask
            out.append(low.bit_length() - 1)
            mask ^= low
        return out

    def mask_of(self, edges: Iterable[Chord]) -> int:
        m = 0
        for e in edges:
            m |= self.bit[chord(*e)]
        return m

    def is_tree(self, mask: int) -> bool:
        n = self.n
        if mask.bit_count() != n - 1:
            return False
        parent = list(range(n + 1))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        m = mask
        while m:
            low = m & -m
            i = low.bit_length() - 1
            if self.cross[i] & mask:
                return False
            a, b = self.chords[i]
            ra, rb = find(a), find(b)
            if ra == rb:
                return False
            parent[ra] = rb
            m ^= low
        return True


@lru_cache(maxsize=None)
def geometry(n: int) -> Geometry:
    return Geometry(n)


@lru_cache(maxsize=1 << 16)
def _edges(n: int, code: int) -> tuple[Chord, ...]:
    return tuple(geometry(n).edges(code))


@dataclass(frozen=True, order=True)
class Tree:
    """A plane spanning tree; compare and hash by canonical code."""

    n: int
    code: int

    @property
    def edges(self) -> tuple[Chord, ...]:
        return _edges(self.n, self.code)

    def __contains__(self, e: object) -> bool:
        if not isinstance(e, tuple) or len(e) != 2:
            return False
        c = chord(*e)
        bit = geometry(self.n).bit.get(c)
        return bit is not None and bool(self.code & bit)

    def __iter__(self) -> Iterator[Chord]:
        return iter(self.edges)

    def __len__(self) -> int:
        return self.n - 1

    def has(self, e: Chord) -> bool:
        return e in self

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [[a, b] for a, b in self.edges]}

    @classmethod
    def from_json(cls, data: dict) -> "Tree":
        return validate_tree([tuple(e) for e in data["edges"]], int(data["n"]))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Tree":
        return validate_tree(edges, n)

    def __repr__(self) -> str:
        return f"Tree(n={self.n}, edges={' '.join(map(str, self.edges))})"


def canonical_code(tree: Tree) -> int:
    return tree.code


def _fast_mask(g: Geometry, candidate: list) -> int | None:
    # common case: distinct valid chords forming a tree
    mask = 0
    bit = g.bit
    try:
        for e in candidate:
            b = bit.get(e if e[0] < e[1] else (e[1], e[0]))
            if b is None or mask & b:
                return None
            mask |= b
    except TypeError:
        return None
    return mask if g.is_tree(mask) else None


def validate_tree(candidate: Iterable[tuple[int, int]], n: int) -> Tree:
    """Return the tree on ``candidate`` or raise the first violated condition.

    Conditions are checked in order: edge count, then the first crossing pair
    in lexicographic order, then connectivity (the witness is the vertex set
    of the component containing vertex 1).
    """
    g = geometry(n)
    candidate = list(candidate)
    fast = _fast_mask(g, candidate)
    if fast is not None:
        return Tree(n, fast)
    edges = set()
    for u, v in candidate:
        check_label(n, u)
        check_label(n, v)
        edges.add(chord(u, v))
    if len(edges) != n - 1:
        raise WrongEdgeCount(len(edges), n)
    ordered = sorted(edges)
    for i, e in enumerate(ordered):
        for f in ordered[i + 1:]:
            if crosses(e, f):
                raise CrossingPair(e, f)
    adj: dict[int, list[int]] = {v: [] for v in range(1, n + 1)}
    for a, b in ordered:
        adj[a].append(b)
        adj[b].append(a)
    seen = {1}
    stack = [1]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    if len(seen) != n:
        raise Disconnected(tuple(sorted(seen)))
    return Tree(n, g.mask_of(ordered))


def tree_from_mask(n: int, mask: int) -> Tree:
    if not geometry(n).is_tree(mask):
        raise TreeError(f"mask {mask} is not a plane spanning tree on {n} points")
    return Tree(n, mask)


def hull_path(n: int) -> Tree:
    return validate_tree([(i, i + 1) for i in range(1, n)], n)


def star(n: int, center: int) -> Tree:
    return validate_tree([(center, w) for w in range(1, n + 1) if w != center], n)


def _interval_masks(n: int) -> list[int]:
    g = geometry(n)
    trees: dict[tuple[int, int], list[int]] = {}
    with_edge: dict[tuple[int, int], list[int]] = {}

    def span(i: int, j: int) -> list[int]:
        # trees on i..j, split by the largest neighbour k of i
        if i == j:
            return [0]
        key = (i, j)
        if key not in trees:
            out = []
            for k in range(i + 1, j + 1):
                right = span(k, j)
                out.extend(x | y for x in through(i, k) for y in right)
            trees[key] = out
        return trees[key]

    def through(i: int, k: int) -> list[int]:
        # trees on i..k containing (i, k); removing it leaves i..m and m+1..k
        key = (i, k)
        if key not in with_edge:
            bit = g.bit[Chord(i, k)]
            out = []
            for m in range(i, k):
                right = span(m + 1, k)
                out.extend(bit | x | y for x in span(i, m) for y in right)
            with_edge[key] = out
        return with_edge[key]

    return sorted(span(1, n))


def enumerate_trees(n: int) -> Iterator[Tree]:
    """Yield every plane spanning tree on ``n`` points in canonical order.

    Supported for ``3 <= n <= 12``; n=12 already has 8,414,640 trees.
    """
    if not 3 <= n <= MAX_ENUMERATION_N:
        raise ValueError(f"enumeration supports 3 <= n <= {MAX_ENUMERATION_N}, got {n}")
    for m in _interval_masks(n):
        yield Tree(n, m)


@lru_cache(maxsize=16)
def tree_codes(n: int) -> tuple[int, ...]:
    if not 3 <= n <= MAX_ENUMERATION_N:
        raise ValueError(f"enumeration supports 3 <= n <= {MAX_ENUMERATION_N}, got {n}")
    return tuple(_interval_masks(n))


def tree_count(n: int) -> int:
    from math import comb
    return comb(3 * n - 3, n - 1) // (2 * n - 1)


@lru_cache(maxsize=None)
def _interval_counts(n: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Counts behind the enumeration: trees on ``s + 1`` consecutive points, and those using the outer chord."""
    spans, withs = [1], [0]
    for s in range(1, n):
        withs.append(sum(spans[m] * spans[s - 1 - m] for m in range(s)))
        spans.append(sum(withs[k] * spans[s - k] for k in range(1, s + 1)))
    return tuple(spans), tuple(withs)


def _pick(rng: random.Random, weights: Iterable[int], total: int) -> int:
    r = rng.randrange(total)
    for i, w in enumerate(weights):
        if r < w:
            return i
        r -= w
    raise AssertionError("weights do not sum to the total")


def random_tree(n: int, rng: random.Random | None = None) -> Tree:
    """A plane spanning tree drawn uniformly at random, for any ``n >= 2``."""
    if n < 2:
        raise ValueError("need at least two points")
    rng = rng or random.Random()
    spans, withs = _interval_counts(n)
    edges: list[Chord] = []
    todo = [("span", 1, n - 1)]
    while todo:
        what, i, s = todo.pop()
        if s == 0:
            continue
        if what == "span":
            k = 1 + _pick(rng, (withs[k] * spans[s - k] for k in range(1, s + 1)), spans[s])
            todo.append(("with", i, k))
            todo.append(("span", i + k, s - k))
        else:
            edges.append(Chord(i, i + s))
            m = _pick(rng, (spans[m] * spans[s - 1 - m] for m in range(s)), withs[s])
            todo.append(("span", i, m))
            todo.append(("span", i + m + 1, s - 1 - m))
    return Tree(n, geometry(n).mask_of(edges))


@dataclass(frozen=True)
class Face:
    vertices: tuple[int, ...]
    edges: tuple[Chord, ...]
    gap: Chord


def face_polygons(n: int, diagonals: Iterable[Chord]) -> list[list[int]]:
    """Split the polygon 1..n along non-crossing diagonals."""
    polys = [list(range(1, n + 1))]
    for a, b in diagonals:
        for idx, p in enumerate(polys):
            if a in p and b in p:
                i, j = p.index(a), p.index(b)
                if i > j:
                    i, j = j, i
                inner = p[i:j + 1]
                outer = p[j:] + p[:i + 1]
                if len(inner) < 3 or len(outer) < 3:
                    continue
                polys[idx] = inner
                polys.append(outer)
                break
        else:
            raise TreeError(f"diagonal ({a},{b}) does not split any face")
    return polys


def faces(tree: Tree) -> list[Face]:
    """Faces of ``tree`` together with the hull, each with its hull non-edge."""
    n = tree.n
    present = set(tree.edges)
    diagonals = [e for e in tree.edges if not is_hull_edge(e, n)]
    out = []
    for poly in face_polygons(n, diagonals):
        sides = [chord(poly[i], poly[(i + 1) % len(poly)]) for i in range(len(poly))]
        missing = [s for s in sides if s not in present]
        if len(missing) != 1 or not is_hull_edge(missing[0], n):
            raise AssertionError(f"face {poly} has hull non-edges {missing}")
        out.append(Face(tuple(sorted(poly)), tuple(sorted(s for s in sides if s in present)), missing[0]))
    return sorted(out, key=lambda f: f.vertices)


@dataclass(frozen=True)
class SubPolygon:
    """A convex sub-polygon with its own labels ``1..m``.

    ``vertices[i]`` is the original label of local vertex ``i + 1``.  The
    listing must follow the cyclic order in either direction, so crossings
    and shared endpoints are the same in both labelings.
    """

    n: int
    vertices: tuple[int, ...]

    @property
    def m(self) -> int:
        return len(self.vertices)

    @cached_property
    def _local(self) -> dict[int, int]:
        return {v: i + 1 for i, v in enumerate(self.vertices)}

    def to_local(self, e: Chord) -> Chord:
        loc = self._local
        return chord(loc[e[0]], loc[e[1]])

    def to_global(self, e: Chord) -> Chord:
        return chord(self.vertices[e[0] - 1], self.vertices[e[1] - 1])

    def contains(self, e: Chord) -> bool:
        loc = self._local
        return e[0] in loc and e[1] in loc

    def restrict(self, tree: Tree) -> Tree:
        return validate_tree([self.to_local(e) for e in tree.edges if self.contains(e)], self.m)

    def lift_edges(self, tree: Tree) -> list[Chord]:
        return [self.to_global(e) for e in tree.edges]


def cyclic_shift(n: int, h: int) -> SubPolygon:
    """Relabeling that sends ``h`` to ``n`` and ``h + 1`` to 1 (``h = n`` is the identity)."""
    start = h % n + 1
    return SubPolygon(n, tuple((start - 1 + i) % n + 1 for i in range(n)))
