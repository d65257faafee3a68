"""Exhaustive flip graphs and exact BFS distances.

This is the ground truth the constructive modules are checked against.
Searches store canonical codes only and regenerate neighbours on demand.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .convex_core import Tree, geometry, tree_codes
from .errors import BudgetExceeded
from .flip_ops import FlipKind, FlipSequence, FlipStep, apply, moves

DEFAULT_NODE_BUDGET = 10**6
DEFAULT_GEODESIC_CAP = 10**6
UNREACHED = 255


@dataclass(frozen=True)
class FlipGraph:
    n: int
    kind: FlipKind
    nodes: tuple[int, ...]
    indptr: np.ndarray
    targets: np.ndarray
    removed: np.ndarray
    added: np.ndarray

    @property
    def size(self) -> int:
        return len(self.nodes)

    @property
    def adjacency(self) -> list[list[int]]:
        return [self.targets[self.indptr[i]:self.indptr[i + 1]].tolist() for i in range(self.size)]

    def index_of(self, code: int) -> int:
        return _index_map(self.n)[code]

    def neighbours(self, i: int) -> np.ndarray:
        return self.targets[self.indptr[i]:self.indptr[i + 1]]

    def sources(self) -> np.ndarray:
        return np.repeat(np.arange(self.size), np.diff(self.indptr))


@lru_cache(maxsize=16)
def _index_map(n: int) -> dict[int, int]:
    return {c: i for i, c in enumerate(tree_codes(n))}


@lru_cache(maxsize=32)
def build_flip_graph(n: int, kind: FlipKind, node_budget: int = DEFAULT_NODE_BUDGET) -> FlipGraph:
    kind = FlipKind.parse(kind)
    codes = tree_codes(n)
    if len(codes) > node_budget:
        raise BudgetExceeded(f"{len(codes)} trees exceed the node budget {node_budget}")
    index = _index_map(n)
    indptr = [0]
    targets: list[int] = []
    removed: list[int] = []
    added: list[int] = []
    for code in codes:
        for r, a, new, _ in moves(n, code, kind):
            targets.append(index[new])
            removed.append(r)
            added.append(a)
        indptr.append(len(targets))
    return FlipGraph(
        n, kind, codes,
        np.asarray(indptr, dtype=np.int64),
        np.asarray(targets, dtype=np.int32),
        np.asarray(removed, dtype=np.int16),
        np.asarray(added, dtype=np.int16),
    )


def bfs_distances(graph: FlipGraph, source: int) -> list[int]:
    """Plain BFS from node index ``source``; -1 marks unreachable nodes."""
    adj = graph.adjacency
    dist = [-1] * graph.size
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


@lru_cache(maxsize=8)
def distance_matrix(n: int, kind: FlipKind, chunk: int = 512) -> np.ndarray:
    """All-pairs distances as uint8 (``UNREACHED`` if disconnected)."""
    graph = build_flip_graph(n, FlipKind.parse(kind))
    size = graph.size
    adj = csr_matrix(
        (np.ones(len(graph.targets), dtype=np.int8), graph.targets, graph.indptr),
        shape=(size, size),
    )
    out = np.empty((size, size), dtype=np.uint8)
    directed = graph.kind == FlipKind.SLIDE
    for lo in range(0, size, chunk):
        idx = np.arange(lo, min(size, lo + chunk))
        d = shortest_path(adj, method="D", directed=directed, unweighted=True, indices=idx)
        d[np.isinf(d)] = UNREACHED
        out[lo:lo + len(idx)] = d.astype(np.uint8)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class DistanceReport:
    distance: int
    witness: FlipSequence
    geodesic_count: int | None = None

    def to_json(self) -> dict:
        out = {"distance": self.distance, "witness": self.witness.to_json()}
        if self.geodesic_count is not None:
            out["geodesicCount"] = self.geodesic_count
        return out


def _trace(parents: dict[int, tuple[int, int, int] | None], code: int) -> list[tuple[int, int, int]]:
    chain = []
    while parents[code] is not None:
        prev, r, a = parents[code]
        chain.append((prev, r, a))
        code = prev
    return chain


def distance(t_in: Tree, t_tar: Tree, kind: FlipKind, node_budget: int = DEFAULT_NODE_BUDGET,
             count_geodesics: bool = False) -> DistanceReport:
    """Exact flip distance by bidirectional BFS, with a validated witness."""
    kind = FlipKind.parse(kind)
    if t_in.n != t_tar.n:
        raise ValueError("trees live on different point sets")
    n = t_in.n
    g = geometry(n)
    if t_in == t_tar:
        return DistanceReport(0, FlipSequence(t_in, ()), 1 if count_geodesics else None)
    if kind == FlipKind.SLIDE:
        return _one_sided(t_in, t_tar, kind, node_budget)
    fwd: dict[int, tuple[int, int, int] | None] = {t_in.code: None}
    bwd: dict[int, tuple[int, int, int] | None] = {t_tar.code: None}
    depth = {True: {t_in.code: 0}, False: {t_tar.code: 0}}
    f_front, b_front = [t_in.code], [t_tar.code]
    expanded = 0
    meets: list[int] = []
    while not meets:
        if not f_front or not b_front:
            raise RuntimeError("flip graph is disconnected")
        grow_fwd = len(f_front) <= len(b_front)
        front, seen, other = (f_front, fwd, bwd) if grow_fwd else (b_front, bwd, fwd)
        here = depth[grow_fwd]
        nxt = []
        for code in front:
            expanded += 1
            if expanded > node_budget:
                raise BudgetExceeded(f"expanded more than {node_budget} trees")
            for r, a, new, _ in moves(n, code, kind):
                if new in seen:
                    continue
                seen[new] = (code, r, a)
                here[new] = here[code] + 1
                nxt.append(new)
                if new in other:
                    meets.append(new)
        nxt.sort()
        if grow_fwd:
            f_front = nxt
        else:
            b_front = nxt
    meet = min(meets, key=lambda c: (depth[True][c] + depth[False][c], c))
    left = _trace(fwd, meet)[::-1]
    right = _trace(bwd, meet)
    steps = [FlipStep(g.chords[r], g.chords[a], kind) for _, r, a in left]
    # backward parents were recorded as flips away from the target; undo them
    steps += [FlipStep(g.chords[a], g.chords[r], kind) for _, r, a in right]
    seq = FlipSequence(t_in, tuple(steps))
    if apply(seq) != t_tar:
        raise AssertionError("witness does not reach the target")
    count = sum(1 for _ in all_geodesics(t_in, t_tar, kind)) if count_geodesics else None
    return DistanceReport(len(steps), seq, count)


def _one_sided(t_in: Tree, t_tar: Tree, kind: FlipKind, node_budget: int) -> DistanceReport:
    n = t_in.n
    g = geometry(n)
    parents: dict[int, tuple[int, int, int] | None] = {t_in.code: None}
    queue = deque([t_in.code])
    while queue:
        code = queue.popleft()
        if len(parents) > node_budget:
            raise BudgetExceeded(f"visited more than {node_budget} trees")
        for r, a, new, _ in moves(n, code, kind):
            if new not in parents:
                parents[new] = (code, r, a)
                if new == t_tar.code:
                    chain = _trace(parents, new)[::-1]
                    seq = FlipSequence(t_in, tuple(FlipStep(g.chords[r], g.chords[a], kind) for _, r, a in chain))
                    apply(seq)
                    return DistanceReport(len(seq), seq)
                queue.append(new)
    raise RuntimeError("target unreachable")


def layers_to(t_tar: Tree, kind: FlipKind, depth: int) -> dict[int, int]:
    """BFS distances towards ``t_tar`` for every tree within ``depth``."""
    n = t_tar.n
    dist = {t_tar.code: 0}
    front = [t_tar.code]
    for d in range(1, depth + 1):
        nxt = []
        for code in front:
            for _, _, new, _ in moves(n, code, kind):
                if new not in dist:
                    dist[new] = d
                    nxt.append(new)
        front = nxt
    return dist


def random_geodesic(t_in: Tree, t_tar: Tree, kind: FlipKind, rng: random.Random) -> FlipSequence:
    """A shortest sequence chosen by a uniform step among the arcs that stay on a geodesic."""
    kind = FlipKind.parse(kind)
    if kind == FlipKind.SLIDE:
        raise ValueError("slide flips are not symmetric; no backward layering")
    n = t_in.n
    g = geometry(n)
    d = distance(t_in, t_tar, kind).distance
    dist = layers_to(t_tar, kind, d)
    code = t_in.code
    steps = []
    for left in range(d, 0, -1):
        options = [(r, a, new) for r, a, new, _ in moves(n, code, kind) if dist.get(new) == left - 1]
        r, a, code = rng.choice(options)
        steps.append(FlipStep(g.chords[r], g.chords[a], kind))
    return FlipSequence(t_in, tuple(steps))


def all_geodesics(t_in: Tree, t_tar: Tree, kind: FlipKind, cap: int = DEFAULT_GEODESIC_CAP) -> Iterator[FlipSequence]:
    """Yield every shortest flip sequence, raising once more than ``cap`` exist."""
    kind = FlipKind.parse(kind)
    n = t_in.n
    g = geometry(n)
    d = distance(t_in, t_tar, kind).distance
    to_tar = layers_to(t_tar, kind, d)
    emitted = 0
    path: list[FlipStep] = []

    def walk(code: int, left: int) -> Iterator[FlipSequence]:
        nonlocal emitted
        if left == 0:
            emitted += 1
            if emitted > cap:
                raise BudgetExceeded(f"more than {cap} geodesics")
            yield FlipSequence(t_in, tuple(path))
            return
        for r, a, new, _ in moves(n, code, kind):
            if to_tar.get(new) == left - 1:
                path.append(FlipStep(g.chords[r], g.chords[a], kind))
                yield from walk(new, left - 1)
                path.pop()

    yield from walk(t_in.code, d)


def count_geodesics(t_in: Tree, t_tar: Tree, kind: FlipKind) -> int:
    kind = FlipKind.parse(kind)
    n = t_in.n
    d = distance(t_in, t_tar, kind).distance
    to_tar = layers_to(t_tar, kind, d)
    memo: dict[int, int] = {}

    def count(code: int, left: int) -> int:
        if left == 0:
            return 1
        if code not in memo:
            memo[code] = sum(count(new, left - 1) for _, _, new, _ in moves(n, code, kind)
                             if to_tar.get(new) == left - 1)
        return memo[code]

    return count(t_in.code, d)


def diameter_radius(n: int, kind: FlipKind) -> tuple[int, int, tuple[Tree, Tree]]:
    """Exact diameter, radius and the first diametral pair in canonical order.

    Uses all-pairs BFS, practical up to n = 8 (7752 trees).
    """
    kind = FlipKind.parse(kind)
    dm = distance_matrix(n, kind)
    if (dm == UNREACHED).any():
        raise RuntimeError(f"{kind.label} flip graph on {n} points is disconnected")
    ecc = dm.max(axis=1)
    diam = int(ecc.max())
    radius = int(ecc.min())
    i, j = (int(x) for x in np.argwhere(dm == diam)[0])
    codes = tree_codes(n)
    return diam, radius, (Tree(n, codes[i]), Tree(n, codes[j]))


def geodesic_edge_mask(dm: np.ndarray, src: np.ndarray, dst: np.ndarray, s: int, t: int) -> np.ndarray:
    """Boolean mask over graph arcs lying on at least one s-t geodesic."""
    d = int(dm[s, t])
    return (dm[s, src].astype(np.int32) + 1 + dm[dst, t].astype(np.int32)) == d


def every_geodesic_removes(graph: FlipGraph, dm: np.ndarray, s: int, t: int, protected: int) -> bool:
    """True iff every s-t geodesic removes at least one chord of ``protected``."""
    d = int(dm[s, t])
    if d == 0:
        return False
    if not protected:
        return False
    bits = [(protected >> i) & 1 for i in range(len(geometry(graph.n).chords))]
    reach = {s}
    for _ in range(d):
        nxt = set()
        for u in reach:
            lo, hi = graph.indptr[u], graph.indptr[u + 1]
            du = dm[u, t]
            for k in range(lo, hi):
                v = int(graph.targets[k])
                if dm[v, t] == du - 1 and not bits[graph.removed[k]]:
                    nxt.add(v)
        if not nxt:
            return True
        reach = nxt
    return t not in reach


def find_happy_violation(n: int, kind: FlipKind, n_min: int = 3) -> tuple[Tree, Tree] | None:
    """Smallest pair (by n, then canonical order) whose geodesics all flip a happy edge.

    Searches n_min..n in ascending order and returns the first hit.
    """
    kind = FlipKind.parse(kind)
    for m in range(n_min, n + 1):
        hit = _happy_violation_at(m, kind)
        if hit is not None:
            return hit
    return None


def _happy_violation_at(n: int, kind: FlipKind) -> tuple[Tree, Tree] | None:
    graph = build_flip_graph(n, kind)
    dm = distance_matrix(n, kind)
    codes = graph.nodes
    for s in range(graph.size):
        for t in range(graph.size):
            if s == t:
                continue
            happy = codes[s] & codes[t]
            if happy and every_geodesic_removes(graph, dm, s, t, happy):
                return Tree(n, codes[s]), Tree(n, codes[t])
    return None


def to_dot(graph: FlipGraph) -> Iterator[str]:
    """DOT lines for ``graph``; nodes are labelled by canonical code."""
    directed = graph.kind == FlipKind.SLIDE
    arrow = "->" if directed else "--"
    yield f'{"digraph" if directed else "graph"} "flips_n{graph.n}_{graph.kind.label}" {{\n'
    for code in graph.nodes:
        yield f'  t{code} [label="{code}"];\n'
    for i, code in enumerate(graph.nodes):
        for j in graph.neighbours(i).tolist():
            if directed or i < j:
                yield f"  t{code} {arrow} t{graph.nodes[j]};\n"
    yield "}\n"
