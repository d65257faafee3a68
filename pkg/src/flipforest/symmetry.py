"""Relabelings of the polygon that keep crossings and hull edges intact.

Any dihedral relabeling of ``1..n`` maps plane spanning trees to plane
spanning trees and flips to flips of the same kind, so distances and
anything defined purely from the geometry are invariant.  Sweeps over all
pairs use this to visit one pair per orbit.
"""

from __future__ import annotations

import random
from functools import lru_cache
from typing import Iterator

import numpy as np

from .convex_core import Chord, Tree, chord, geometry, random_tree, tree_codes
from .flip_ops import FlipSequence, FlipStep

VertexMap = tuple[int, ...]  # index v holds the image of v; index 0 unused


@lru_cache(maxsize=None)
def dihedral(n: int) -> tuple[VertexMap, ...]:
    maps = []
    for shift in range(n):
        maps.append((0,) + tuple((v - 1 + shift) % n + 1 for v in range(1, n + 1)))
        maps.append((0,) + tuple((shift - v) % n + 1 for v in range(1, n + 1)))
    return tuple(maps)


@lru_cache(maxsize=None)
def identity(n: int) -> tuple[VertexMap, ...]:
    return ((0,) + tuple(range(1, n + 1)),)


@lru_cache(maxsize=None)
def fixing_last(n: int) -> tuple[VertexMap, ...]:
    """Identity and the mirror ``v -> n - v`` that keeps ``n`` in place."""
    return ((0,) + tuple(range(1, n + 1)), (0,) + tuple(n - v for v in range(1, n)) + (n,))


def inverse(vmap: VertexMap) -> VertexMap:
    inv = [0] * len(vmap)
    for v in range(1, len(vmap)):
        inv[vmap[v]] = v
    return tuple(inv)


def map_chord(vmap: VertexMap, e: Chord) -> Chord:
    return chord(vmap[e[0]], vmap[e[1]])


@lru_cache(maxsize=256)
def _bit_table(vmap: VertexMap) -> tuple[int, ...]:
    g = geometry(len(vmap) - 1)
    return tuple(g.bit[map_chord(vmap, c)] for c in g.chords)


def map_code(vmap: VertexMap, code: int) -> int:
    table = _bit_table(vmap)
    out = 0
    while code:
        low = code & -code
        out |= table[low.bit_length() - 1]
        code ^= low
    return out


def map_tree(vmap: VertexMap, tree: Tree) -> Tree:
    return Tree(tree.n, map_code(vmap, tree.code))


def canonical_pair(a: Tree, b: Tree, group: tuple[VertexMap, ...],
                   swap: bool) -> tuple[Tree, Tree, VertexMap, bool]:
    """Smallest image ``(a', b')`` of the pair, the map used and whether it swapped."""
    best = None
    for vmap in group:
        ca, cb = map_code(vmap, a.code), map_code(vmap, b.code)
        cand = [((ca, cb), vmap, False)]
        if swap:
            cand.append(((cb, ca), vmap, True))
        for key, m, s in cand:
            if best is None or key < best[0]:
                best = (key, m, s)
    (ca, cb), vmap, swapped = best
    return Tree(a.n, ca), Tree(a.n, cb), vmap, swapped


@lru_cache(maxsize=32)
def index_permutations(n: int, group_name: str) -> np.ndarray:
    """Row g maps tree index i to the index of its image under group element g."""
    group = {"dihedral": dihedral, "fixing_last": fixing_last, "identity": identity}[group_name](n)
    codes = tree_codes(n)
    where = {c: i for i, c in enumerate(codes)}
    return np.array([[where[map_code(vmap, c)] for c in codes] for vmap in group], dtype=np.int64)


def orbit_representatives(n: int, group_name: str = "dihedral", swap: bool = True) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """One pair of tree indices per orbit, with the orbit sizes.

    Returns ``(first, second, size)``; the sizes add up to ``N**2``.
    """
    perms = index_permutations(n, group_name)
    size = perms.shape[1]
    i = np.repeat(np.arange(size, dtype=np.int64), size)
    j = np.tile(np.arange(size, dtype=np.int64), size)
    best = i * size + j
    for p in perms:
        best = np.minimum(best, p[i] * size + p[j])
        if swap:
            best = np.minimum(best, p[j] * size + p[i])
    own = i * size + j
    reps = np.flatnonzero(best == own)
    counts = np.bincount(best, minlength=size * size)[reps]
    return reps // size, reps % size, counts


def orbit_pairs(n: int, group_name: str = "dihedral", swap: bool = True) -> Iterator[tuple[Tree, Tree, int]]:
    """``(first, second, orbit size)`` for one pair per orbit."""
    codes = tree_codes(n)
    first, second, sizes = orbit_representatives(n, group_name, swap)
    for i, j, w in zip(first.tolist(), second.tolist(), sizes.tolist()):
        yield Tree(n, codes[i]), Tree(n, codes[j]), w


def random_pairs(n: int, count: int, seed: int) -> Iterator[tuple[Tree, Tree, int]]:
    """``count`` independent uniform pairs, each with weight 1."""
    rng = random.Random(seed)
    for _ in range(count):
        yield random_tree(n, rng), random_tree(n, rng), 1


def pull_back(seq: FlipSequence, vmap: VertexMap, swapped: bool) -> FlipSequence:
    """Turn a sequence between the images of a pair into one between the pair itself."""
    back = inverse(vmap)
    steps = tuple(FlipStep(map_chord(back, s.removed), map_chord(back, s.added), s.kind) for s in seq.steps)
    out = FlipSequence(map_tree(back, seq.start), steps)
    return out.reversed() if swapped else out
