"""Linear representation of a tree and the gap-wise pairing of two trees.

The points are read left to right as ``1..n`` (the cut sits between ``n``
and 1).  Gap ``i`` is the spine segment between ``i`` and ``i + 1``.  Every
gap is matched with the shortest tree edge covering it; this matching is a
bijection exactly when the edges form a tree.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .convex_core import Chord, SubPolygon, Tree, crosses, cyclic_shift, enumerate_trees, geometry, is_hull_edge
from .errors import InvariantViolation
from .verdicts import Counterexample, Property, PropertyVerdict


class EdgeClass(Enum):
    SHORT = "short"
    NEAR = "near"
    WIDE = "wide"


class PairClass(Enum):
    EQ = "eq"
    ABOVE = "A"
    BELOW = "B"
    CROSSING = "C"
    REST = "R"


class CycleDetected(InvariantViolation):
    pass


def length(e: Chord) -> int:
    return e[1] - e[0]


def covers_vertex(e: Chord, v: int) -> bool:
    return e[0] <= v <= e[1]


def covers(e: Chord, f: Chord) -> bool:
    """``e`` covers both endpoints of ``f`` (an edge covers itself)."""
    return e[0] <= f[0] and f[1] <= e[1]


def covers_gap(e: Chord, gap: int) -> bool:
    return e[0] <= gap and gap + 1 <= e[1]


def gap_chord(gap: int) -> Chord:
    return Chord(gap, gap + 1)


@dataclass(frozen=True)
class GapBijection:
    n: int
    edge_of_gap: tuple[Chord, ...]  # index i - 1 holds the edge of gap i

    def edge(self, gap: int) -> Chord:
        return self.edge_of_gap[gap - 1]

    @property
    def gap_of_edge(self) -> dict[Chord, int]:
        return {e: i + 1 for i, e in enumerate(self.edge_of_gap)}

    def edge_class(self, gap: int) -> EdgeClass:
        return classify_edge(self.edge(gap), gap)


def classify_edge(e: Chord, gap: int) -> EdgeClass:
    shared = len({e[0], e[1]} & {gap, gap + 1})
    return (EdgeClass.WIDE, EdgeClass.NEAR, EdgeClass.SHORT)[shared]


def shortest_covering(edges: Iterable[Chord], gap: int) -> Chord | None:
    best = None
    for e in edges:
        if covers_gap(e, gap):
            if best is None or length(e) < length(best):
                best = e
            elif length(e) == length(best):
                raise InvariantViolation(f"edges {best} and {e} tie for gap {gap}")
    return best


def gap_bijection(tree: Tree) -> GapBijection:
    """Match each gap with its shortest covering edge and check bijectivity."""
    edges = tree.edges
    image = []
    for gap in range(1, tree.n):
        e = shortest_covering(edges, gap)
        if e is None:
            raise InvariantViolation(f"gap {gap} is not covered")
        image.append(e)
    if len(set(image)) != len(image):
        raise InvariantViolation("gap map is not injective")
    return GapBijection(tree.n, tuple(image))


@dataclass(frozen=True)
class SNW:
    short: tuple[Chord, ...]
    near: tuple[Chord, ...]
    wide: tuple[Chord, ...]
    uncovered: int


def uncovered_edges(edges: Sequence[Chord]) -> list[Chord]:
    return [e for e in edges if not any(f != e and covers(f, e) for f in edges)]


def classify_snw(tree: Tree) -> SNW:
    """Short/near/wide partition plus the uncovered-edge count.

    Asserts ``|S| >= k`` and ``|W| <= |S| - k`` for ``k`` uncovered edges.
    """
    bij = gap_bijection(tree)
    groups: dict[EdgeClass, list[Chord]] = {c: [] for c in EdgeClass}
    for gap in range(1, tree.n):
        groups[bij.edge_class(gap)].append(bij.edge(gap))
    k = len(uncovered_edges(tree.edges))
    s, w = len(groups[EdgeClass.SHORT]), len(groups[EdgeClass.WIDE])
    if not (s >= k and w <= s - k):
        raise InvariantViolation(f"short/wide counts S={s} W={w} violate the bound for k={k}")
    return SNW(tuple(groups[EdgeClass.SHORT]), tuple(groups[EdgeClass.NEAR]), tuple(groups[EdgeClass.WIDE]), k)


@dataclass(frozen=True)
class GapPair:
    gap: int
    e: Chord
    e_class: EdgeClass
    e2: Chord
    e2_class: EdgeClass
    kind: PairClass

    @property
    def shorts(self) -> int:
        return (self.e_class is EdgeClass.SHORT) + (self.e2_class is EdgeClass.SHORT)


@dataclass(frozen=True)
class GapPairing:
    n: int
    pairs: tuple[GapPair, ...]

    def of(self, *kinds: PairClass) -> list[GapPair]:
        return [p for p in self.pairs if p.kind in kinds]

    def to_tsv(self) -> str:
        rows = ["gap\te\tclass(e)\te'\tclass(e')\tpairClass"]
        for p in self.pairs:
            rows.append(f"{p.gap}\t{p.e}\t{p.e_class.value}\t{p.e2}\t{p.e2_class.value}\t{p.kind.value}")
        return "\n".join(rows) + "\n"


def pair_class(gap: int, e: Chord, e2: Chord) -> PairClass:
    if e == e2:
        return PairClass.EQ
    ce, ce2 = classify_edge(e, gap), classify_edge(e2, gap)
    if ce is not EdgeClass.NEAR or ce2 is not EdgeClass.NEAR:
        return PairClass.REST
    if set(e) & set(e2):
        return PairClass.ABOVE if length(e) > length(e2) else PairClass.BELOW
    if not crosses(e, e2):
        raise InvariantViolation(f"near pair {e}, {e2} over gap {gap} neither shares a vertex nor crosses")
    return PairClass.CROSSING


def pair_gapwise(t_in: Tree, t_tar: Tree) -> GapPairing:
    b_in, b_tar = gap_bijection(t_in), gap_bijection(t_tar)
    pairs = []
    for gap in range(1, t_in.n):
        e, e2 = b_in.edge(gap), b_tar.edge(gap)
        pairs.append(GapPair(gap, e, classify_edge(e, gap), e2, classify_edge(e2, gap), pair_class(gap, e, e2)))
    return GapPairing(t_in.n, tuple(pairs))


def relabel_for_common_hull_gap(t_in: Tree, t_tar: Tree) -> SubPolygon | None:
    """Cyclic relabeling moving a hull chord missing from both trees to ``(n, 1)``.

    ``(n, 1)`` itself is preferred, then the smallest ``(h, h + 1)``.
    Returns None when the two trees together contain every hull edge.
    """
    n = t_in.n
    g = geometry(n)
    union = t_in.code | t_tar.code
    if not union & g.bit[Chord(1, n)]:
        return cyclic_shift(n, n)
    for h in range(1, n):
        if not union & g.bit[Chord(h, h + 1)]:
            return cyclic_shift(n, h)
    return None


@dataclass(frozen=True)
class ConflictPair:
    """A pair of edges ``e`` (initial) and ``e2`` (target) charged to ``gap``."""

    gap: int
    e: Chord
    e2: Chord


@dataclass(frozen=True)
class ConflictGraph:
    nodes: tuple[ConflictPair, ...]
    arcs: tuple[tuple[int, int], ...]
    order: tuple[int, ...]

    def successors(self, i: int) -> list[int]:
        return [b for a, b in self.arcs if a == i]


def full_conflict(p: ConflictPair, q: ConflictPair) -> bool:
    """Whether ``p`` must be resolved before ``q`` in the three-condition sense."""
    if crosses(p.e, q.e2):
        return True
    if covers(q.e2, p.e) and covers_gap(p.e, q.gap):
        return True
    if covers(p.e, q.e2) and covers_gap(q.e2, p.gap):
        return True
    return False


def crossing_conflict(p: ConflictPair, q: ConflictPair) -> bool:
    return crosses(q.e2, p.e)


def conflict_graph(pairs: Sequence[ConflictPair], mode: str = "full") -> ConflictGraph:
    """Directed conflict graph with a deterministic topological order.

    ``mode`` is ``"crossing"`` (arc p -> q iff q's target crosses p's initial
    edge) or ``"full"``.  Raises CycleDetected if the graph has a cycle.
    """
    rel = crossing_conflict if mode == "crossing" else full_conflict
    if mode not in ("crossing", "full"):
        raise ValueError(f"unknown conflict mode {mode!r}")
    nodes = tuple(pairs)
    arcs = tuple((i, j) for i, p in enumerate(nodes) for j, q in enumerate(nodes) if i != j and rel(p, q))
    indeg = [0] * len(nodes)
    succ: list[list[int]] = [[] for _ in nodes]
    for a, b in arcs:
        indeg[b] += 1
        succ[a].append(b)
    ready = [i for i, d in enumerate(indeg) if d == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        i = heapq.heappop(ready)
        order.append(i)
        for j in succ[i]:
            indeg[j] -= 1
            if indeg[j] == 0:
                heapq.heappush(ready, j)
    if len(order) != len(nodes):
        raise CycleDetected(f"conflict graph on {len(nodes)} pairs has a cycle")
    return ConflictGraph(nodes, arcs, tuple(order))


def is_topmost(p: ConflictPair, others: Iterable[ConflictPair]) -> bool:
    """The three root properties a topmost crossing pair must satisfy."""
    for q in others:
        if q == p:
            continue
        if covers(q.e, p.e):
            return False
        if covers(p.e2, q.e2):
            return False
        if covers(p.e2, q.e) or crosses(p.e2, q.e):
            return False
    return True


def topmost_root(pairs: Sequence[ConflictPair]) -> ConflictPair:
    graph = conflict_graph(pairs, "crossing")
    roots = {i for i in range(len(pairs))} - {b for _, b in graph.arcs}
    for i in graph.order:
        if i in roots and is_topmost(pairs[i], pairs):
            return pairs[i]
    raise InvariantViolation("no topmost root among the crossing pairs")


def as_conflict_pairs(pairs: Iterable[GapPair]) -> list[ConflictPair]:
    return [ConflictPair(p.gap, p.e, p.e2) for p in pairs]


def hull_gaps(tree: Tree) -> list[int]:
    """Gaps whose hull chord is missing from ``tree``."""
    return [i for i in range(1, tree.n) if Chord(i, i + 1) not in tree]


def is_spine_edge(e: Chord, n: int) -> bool:
    return is_hull_edge(e, n) and e != Chord(1, n)


# ---------------------------------------------------------------- exhaustive checks


def check_gap_bijection(n: int) -> PropertyVerdict:
    """Every tree on ``n`` points: gaps and edges match one to one, and the inverse round-trips."""
    count = 0
    for tree in enumerate_trees(n):
        count += 1
        try:
            bij = gap_bijection(tree)
            back = bij.gap_of_edge
            if set(bij.edge_of_gap) != set(tree.edges) or any(back[bij.edge(g)] != g for g in range(1, n)):
                raise InvariantViolation("gap map does not invert")
        except InvariantViolation as exc:
            return PropertyVerdict(Property.GAP_BIJECTION, None, n, Counterexample(tree, None, {"error": str(exc)}))
    return PropertyVerdict(Property.GAP_BIJECTION, None, n, None, {"trees": count})


def check_short_wide(n: int) -> PropertyVerdict:
    """Every tree on ``n`` points: ``|S| >= k`` and ``|W| <= |S| - k`` for ``k`` uncovered edges."""
    count = 0
    tight = 0
    for tree in enumerate_trees(n):
        count += 1
        try:
            snw = classify_snw(tree)
        except InvariantViolation as exc:
            return PropertyVerdict(Property.SHORT_WIDE_COUNTS, None, n, Counterexample(tree, None, {"error": str(exc)}))
        tight += len(snw.wide) == len(snw.short) - snw.uncovered
    return PropertyVerdict(Property.SHORT_WIDE_COUNTS, None, n, None, {"trees": count, "wideBoundTight": tight})

