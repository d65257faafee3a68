"""Flip distance as a decision problem parameterized by the budget ``k``.

Both variants first shrink the instance: unmarked vertices (touching no
unhappy edge) that only carry happy hull edges are squeezed out.  The
unrestricted search then freezes the good happy edges and guesses which
bundles of the remaining happy diagonals get flipped.  The compatible
search cuts along every happy diagonal and solves the pieces one by one,
adding only edges of either tree or of the hull.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

from .convex_core import Chord, SubPolygon, Tree, chord, face_polygons, faces, geometry, is_hull_edge, validate_tree
from .errors import BudgetExceeded, InvariantViolation
from .flip_ops import FlipKind, FlipSequence, FlipStep, apply, moves

DEFAULT_NODE_CAP = 2 * 10**6


# ---------------------------------------------------------------- contraction


@dataclass(frozen=True)
class ReducedInstance:
    t_in: Tree
    t_tar: Tree
    polygon: SubPolygon          # kept original labels, in cyclic order
    absorbed: dict[int, int]     # squeezed-out vertex -> kept vertex it was merged into
    marked: frozenset[int]
    paths: dict[Chord, tuple[int, ...]] = field(default_factory=dict)  # reduced hull chord -> original path

    @property
    def m(self) -> int:
        return self.polygon.m

    def reduced_label(self, v: int) -> int | None:
        if v in self.absorbed:
            return None
        return self.polygon.vertices.index(v) + 1

    def lift(self, seq: FlipSequence, start: Tree) -> FlipSequence:
        """Replay a reduced sequence on the original trees."""
        steps = []
        for s in seq.steps:
            r, a = self.polygon.to_global(s.removed), self.polygon.to_global(s.added)
            if r in self.paths or a in self.paths:
                raise InvariantViolation(f"reduced sequence touches the contracted path {r}")
            steps.append(FlipStep(r, a, s.kind))
        return FlipSequence(start, tuple(steps))


def marked_vertices(t_in: Tree, t_tar: Tree) -> frozenset[int]:
    a, b = set(t_in.edges), set(t_tar.edges)
    return frozenset(v for e in a ^ b for v in e)


def contract(t_in: Tree, t_tar: Tree) -> ReducedInstance:
    """Squeeze out unmarked vertices along the hull until nothing changes.

    Two moves, applied while more than three vertices remain:
      - an unmarked vertex whose only edge (in both trees) is a hull edge
        disappears together with that edge;
      - an unmarked vertex of degree two whose two edges are the hull edges
        to its neighbours disappears; the two edges become one.
    """
    if t_in.n != t_tar.n:
        raise ValueError("trees live on different point sets")
    n = t_in.n
    edges_in, edges_tar = set(t_in.edges), set(t_tar.edges)
    marked = marked_vertices(t_in, t_tar)
    verts = list(range(1, n + 1))
    absorbed: dict[int, int] = {}
    paths: dict[Chord, tuple[int, ...]] = {}
    changed = True
    while changed and len(verts) > 3:
        changed = False
        m = len(verts)
        for i, v in enumerate(verts):
            if v in marked:
                continue
            left, right = verts[i - 1], verts[(i + 1) % m]
            around_in = [e for e in edges_in if v in e]
            around_tar = [e for e in edges_tar if v in e]
            hull_here = {chord(left, v), chord(v, right)}
            if len(around_in) == 1 and around_in == around_tar and around_in[0] in hull_here:
                e = around_in[0]
                edges_in.discard(e)
                edges_tar.discard(e)
                absorbed[v] = e[0] if e[1] == v else e[1]
            elif len(around_in) == 2 and set(around_in) == set(around_tar) == hull_here:
                edges_in -= hull_here
                edges_tar -= hull_here
                joined = chord(left, right)
                edges_in.add(joined)
                edges_tar.add(joined)
                seg_l = paths.pop(chord(left, v), (left, v))
                seg_r = paths.pop(chord(v, right), (v, right))
                seg_l = seg_l if seg_l[-1] == v else seg_l[::-1]
                seg_r = seg_r if seg_r[0] == v else seg_r[::-1]
                paths[joined] = seg_l + seg_r[1:] if left < right else (seg_l + seg_r[1:])[::-1]
                absorbed[v] = left
            else:
                continue
            verts.remove(v)
            changed = True
            break
    poly = SubPolygon(n, tuple(verts))
    r_in = validate_tree([poly.to_local(e) for e in edges_in], poly.m)
    r_tar = validate_tree([poly.to_local(e) for e in edges_tar], poly.m)
    return ReducedInstance(r_in, r_tar, poly, absorbed, marked, paths)


# ---------------------------------------------------------------- happy structure


def _part(e: Chord, f: Chord) -> int:
    # +1 strictly between the endpoints of e, -1 outside, 0 for e itself
    if f == e:
        return 0
    a, b = e
    return 1 if all(a <= x <= b for x in f) else -1


def good_happy_edges(t_in: Tree, t_tar: Tree) -> set[Chord]:
    """Happy hull edges, plus happy diagonals with no unhappy edge on one side."""
    n = t_in.n
    a, b = set(t_in.edges), set(t_tar.edges)
    happy = a & b
    unhappy = a ^ b
    good = set()
    for e in happy:
        if is_hull_edge(e, n):
            good.add(e)
            continue
        sides = {_part(e, f) for f in unhappy}
        if len(sides) < 2:
            good.add(e)
    return good


@dataclass(frozen=True)
class DualTreePath:
    """Happy diagonals that a geodesic flips all together or not at all.

    Usually a path of faces between two faces holding unhappy edges.  Where
    such paths meet in an all-happy face they are merged into one bundle.
    """

    faces: tuple[tuple[int, ...], ...]
    happy_edges: tuple[Chord, ...]

    @property
    def length(self) -> int:
        return len(self.happy_edges)


def happy_bundles(t_in: Tree, t_tar: Tree) -> list[DualTreePath]:
    """Group the non-good happy diagonals of ``t_in`` by the all-happy faces between them."""
    unhappy_in = set(t_in.edges) - set(t_tar.edges)
    loose = (set(t_in.edges) & set(t_tar.edges)) - good_happy_edges(t_in, t_tar)
    if not loose:
        return []
    face_list = faces(t_in)
    marked = [bool(set(f.edges) & unhappy_in) for f in face_list]
    owner: dict[Chord, Chord] = {e: e for e in loose}

    def find(e: Chord) -> Chord:
        while owner[e] != e:
            e = owner[e]
        return e

    where: dict[Chord, list[int]] = {e: [] for e in loose}
    for i, f in enumerate(face_list):
        here = [e for e in f.edges if e in loose]
        for e in here:
            where[e].append(i)
        if not marked[i]:
            for e in here[1:]:
                owner[find(e)] = find(here[0])
    groups: dict[Chord, list[Chord]] = {}
    for e in sorted(loose):
        groups.setdefault(find(e), []).append(e)
    out = []
    for members in groups.values():
        idx = sorted({i for e in members for i in where[e]})
        out.append(DualTreePath(tuple(face_list[i].vertices for i in idx), tuple(members)))
    return sorted(out, key=lambda p: p.happy_edges)


# ---------------------------------------------------------------- bounded search


@lru_cache(maxsize=400_000)
def _moves(n: int, code: int, kind: FlipKind) -> tuple[tuple[int, int, int], ...]:
    return tuple((r, a, new) for r, a, new, _ in moves(n, code, kind))


@dataclass
class SearchStats:
    expanded: int = 0
    cap: int = DEFAULT_NODE_CAP

    def tick(self) -> None:
        self.expanded += 1
        if self.expanded > self.cap:
            raise BudgetExceeded(f"expanded more than {self.cap} search nodes")


def bounded_search(t_in: Tree, t_tar: Tree, k: int, kind: FlipKind, frozen: int = 0,
                   addable: int | None = None, stats: SearchStats | None = None) -> FlipSequence | None:
    """Shortest sequence of length <= k that never removes a chord of ``frozen``.

    Iterative deepening on the number of flips, pruned by the count of
    missing target edges (every flip fixes at most one).  ``addable``
    restricts the chords that may be added.  States that failed with a given
    budget are remembered.
    """
    n = t_in.n
    g = geometry(n)
    stats = stats or SearchStats()
    goal = t_tar.code
    if addable is None:
        addable = g.full_mask

    def missing(code: int) -> int:
        return (goal & ~code).bit_count()

    path: list[tuple[int, int]] = []

    def dive(code: int, left: int, dead: dict[int, int]) -> bool:
        if code == goal:
            return True
        if missing(code) > left or dead.get(code, -1) >= left:
            return False
        stats.tick()
        for r, a, new in _moves(n, code, kind):
            if frozen >> r & 1 or not addable >> a & 1:
                continue
            path.append((r, a))
            if dive(new, left - 1, dead):
                return True
            path.pop()
        dead[code] = left
        return False

    for depth in range(missing(t_in.code), k + 1):
        if dive(t_in.code, depth, {}):
            steps = tuple(FlipStep(g.chords[r], g.chords[a], kind) for r, a in path)
            return FlipSequence(t_in, steps)
    return None


# ---------------------------------------------------------------- results


@dataclass(frozen=True)
class FptResult:
    found: bool
    sequence: FlipSequence | None
    nodes_expanded: int
    reduced_size: int
    detail: dict = field(default_factory=dict)

    @property
    def length(self) -> int | None:
        return None if self.sequence is None else len(self.sequence)

    def to_json(self) -> dict:
        return {
            "found": self.found,
            "length": self.length,
            "sequence": None if self.sequence is None else self.sequence.to_json(),
            "nodesExpanded": self.nodes_expanded,
            "reducedSize": self.reduced_size,
            **self.detail,
        }


def _finish(red: ReducedInstance, t_in: Tree, t_tar: Tree, local: FlipSequence | None,
            stats: SearchStats, detail: dict) -> FptResult:
    if local is None:
        return FptResult(False, None, stats.expanded, red.m, detail)
    seq = red.lift(local, t_in)
    if apply(seq) != t_tar:
        raise InvariantViolation("lifted sequence misses the target")
    return FptResult(True, seq, stats.expanded, red.m, detail)


def fpt_distance_unrestricted(t_in: Tree, t_tar: Tree, k: int, node_cap: int = DEFAULT_NODE_CAP,
                              conjecture_mode: bool = False) -> FptResult:
    """Is the unrestricted flip distance at most ``k``?  Returns a witness if so.

    After contraction, good happy edges are frozen.  Each subset of happy
    bundles whose edge count fits in ``(k - t) / 2`` (``t`` unhappy edges)
    is tried with the other happy edges frozen too.  ``conjecture_mode``
    freezes every happy edge instead, which is only sound if shortest
    sequences never flip happy edges.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    kind = FlipKind.UNRESTRICTED
    red = contract(t_in, t_tar)
    stats = SearchStats(cap=node_cap)
    a, b = red.t_in, red.t_tar
    g = geometry(red.m)
    t = (a.code & ~b.code).bit_count()
    happy = a.code & b.code
    detail = {"unhappy": t}
    if k < t:
        return _finish(red, t_in, t_tar, None, stats, detail)
    if conjecture_mode:
        return _finish(red, t_in, t_tar, bounded_search(a, b, k, kind, happy, stats=stats), stats, detail)
    good = g.mask_of(good_happy_edges(a, b))
    bundles = happy_bundles(a, b)
    detail["bundles"] = len(bundles)
    room = (k - t) / 2
    tried = 0
    for size in range(len(bundles) + 1):
        for chosen in combinations(bundles, size):
            if sum(p.length for p in chosen) > room:
                continue
            tried += 1
            free = g.mask_of(e for p in chosen for e in p.happy_edges)
            local = bounded_search(a, b, k, kind, happy & ~free | good, stats=stats)
            if local is not None:
                detail["subsetsTried"] = tried
                return _finish(red, t_in, t_tar, local, stats, detail)
    detail["subsetsTried"] = tried
    return _finish(red, t_in, t_tar, None, stats, detail)


def happy_components(t_in: Tree, t_tar: Tree) -> list[SubPolygon]:
    """Sub-polygons cut out by the happy diagonals."""
    n = t_in.n
    cuts = [e for e in set(t_in.edges) & set(t_tar.edges) if not is_hull_edge(e, n)]
    return sorted((SubPolygon(n, tuple(sorted(p))) for p in face_polygons(n, cuts)), key=lambda s: s.vertices)


def fpt_distance_compatible(t_in: Tree, t_tar: Tree, k: int, epsilon: float = 0.5,
                            node_cap: int = DEFAULT_NODE_CAP) -> FptResult:
    """Is the compatible flip distance at most ``k``?  Returns a witness if so.

    The reduced instance is cut along its happy diagonals.  Pieces with at
    most ``ceil(1 / epsilon)`` unhappy edges are solved exactly first, the
    rest share what is left of ``k``.  Inside a piece happy edges are never
    removed and only edges of either tree or of the hull are ever added.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    kind = FlipKind.COMPATIBLE
    red = contract(t_in, t_tar)
    stats = SearchStats(cap=node_cap)
    small_limit = math.ceil(1 / epsilon)
    pieces = []
    for poly in happy_components(red.t_in, red.t_tar):
        a, b = poly.restrict(red.t_in), poly.restrict(red.t_tar)
        unhappy = (a.code & ~b.code).bit_count()
        if unhappy:
            pieces.append((unhappy > small_limit, unhappy, poly, a, b))
    detail = {"unhappy": sum(p[1] for p in pieces), "pieces": len(pieces)}
    if detail["unhappy"] > k:
        return _finish(red, t_in, t_tar, None, stats, detail)
    pieces.sort(key=lambda p: (p[0], p[2].vertices))
    spent = 0
    steps: list[FlipStep] = []
    floor = sum(p[1] for p in pieces)
    for _, unhappy, poly, a, b in pieces:
        floor -= unhappy
        g = geometry(poly.m)
        addable = a.code | b.code | g.hull_mask
        local = bounded_search(a, b, k - spent - floor, kind, a.code & b.code, addable, stats)
        if local is None:
            return _finish(red, t_in, t_tar, None, stats, detail)
        spent += len(local)
        steps.extend(FlipStep(poly.to_global(s.removed), poly.to_global(s.added), kind) for s in local.steps)
    return _finish(red, t_in, t_tar, FlipSequence(red.t_in, tuple(steps)), stats, detail)


def fpt_distance(t_in: Tree, t_tar: Tree, kind: FlipKind, k_max: int | None = None, **options) -> FptResult:
    """Smallest ``k`` the decision procedure accepts, counting up from the unhappy edges."""
    kind = FlipKind.parse(kind)
    solver = {FlipKind.UNRESTRICTED: fpt_distance_unrestricted, FlipKind.COMPATIBLE: fpt_distance_compatible}.get(kind)
    if solver is None:
        raise ValueError(f"no parameterized search for {kind.label} flips")
    k = (t_in.code & ~t_tar.code).bit_count()
    limit = 2 * t_in.n if k_max is None else k_max
    expanded = 0
    while k <= limit:
        res = solver(t_in, t_tar, k, **options)
        expanded += res.nodes_expanded
        if res.found:
            return FptResult(True, res.sequence, expanded, res.reduced_size, {**res.detail, "k": k})
        k += 1
    return FptResult(False, None, expanded, 0, {"k": limit})
