"""Constructive compatible flip sequences within 5/3 d + 2/3 b + c - 1/3 flips.

Here ``d`` is the number of edges to replace, ``b`` the number of shared hull
edges and ``c`` the number of shared diagonals.  The construction cuts the
polygon along shared diagonals and solves each piece on its own: pieces whose
two trees jointly use every hull edge are finished with one perfect flip per
edge, the others go through the gap pairing in five phases.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .convex_core import Chord, SubPolygon, Tree, face_polygons, geometry, is_hull_edge
from .errors import InvariantViolation
from .flip_ops import FlipKind, FlipSequence, FlipStep, InvalidStep, _path_masks, apply, classify_flip, flip
from .linrep import (
    ConflictPair,
    GapPair,
    PairClass,
    as_conflict_pairs,
    conflict_graph,
    gap_chord,
    is_topmost,
    length,
    pair_gapwise,
    relabel_for_common_hull_gap,
)
from .symmetry import canonical_pair, dihedral, pull_back
from .verdicts import Counterexample, Property, PropertyVerdict

KIND = FlipKind.COMPATIBLE


class StuckWithoutPerfectFlip(InvariantViolation):
    pass


def _step(tree: Tree, removed: Chord, added: Chord, index: int = 0) -> tuple[Tree, FlipStep]:
    try:
        finest = classify_flip(tree, removed, added)
    except ValueError as exc:
        raise InvalidStep(index, getattr(exc, "reason", "InvalidFlip"), str(exc)) from None
    if finest > KIND:
        raise InvalidStep(index, "KindViolation", f"{removed}->{added} is {finest.label}")
    return flip(tree, removed, added), FlipStep(removed, added, KIND)


def _run(tree: Tree, flips: list[tuple[Chord, Chord]]) -> FlipSequence:
    steps = []
    cur = tree
    for i, (r, a) in enumerate(flips, start=1):
        cur, s = _step(cur, r, a, i)
        steps.append(s)
    return FlipSequence(tree, tuple(steps))


@dataclass(frozen=True)
class BoundCounts:
    d: int
    b: int
    c: int

    @property
    def bound(self) -> Fraction:
        return Fraction(5, 3) * self.d + Fraction(2, 3) * self.b + self.c - Fraction(1, 3)


def bound_counts(t_in: Tree, t_tar: Tree) -> BoundCounts:
    n = t_in.n
    happy = set(t_in.edges) & set(t_tar.edges)
    b = sum(1 for e in happy if is_hull_edge(e, n))
    return BoundCounts(n - 1 - len(happy), b, len(happy) - b)


def length_bound(t_in: Tree, t_tar: Tree) -> Fraction:
    return bound_counts(t_in, t_tar).bound


def resolve_ab(tree: Tree, pairs: list[GapPair]) -> FlipSequence:
    """Flip every above (or every below) pair directly, sources of the conflict graph first."""
    if not pairs:
        return FlipSequence(tree, ())
    graph = conflict_graph(as_conflict_pairs(pairs), "full")
    return _run(tree, [(graph.nodes[i].e, graph.nodes[i].e2) for i in graph.order])


def resolve_c(tree: Tree, pairs: list[GapPair]) -> FlipSequence:
    """Resolve crossing pairs in ``len(pairs) + 1`` compatible flips.

    The first topmost pair parks its edge on the hull chord ``(1, n)``; each
    later topmost pair moves its edge onto the target freed by the previous
    one, and the parked chord finally moves to the last open target.
    """
    if not pairs:
        return FlipSequence(tree, ())
    parking = Chord(1, tree.n)
    left = as_conflict_pairs(pairs)
    flips = []
    first = _pick_topmost(left)
    left.remove(first)
    flips.append((first.e, parking))
    pending = first.e2
    while left:
        nxt = _pick_topmost(left)
        left.remove(nxt)
        flips.append((nxt.e, pending))
        pending = nxt.e2
    flips.append((parking, pending))
    return _run(tree, flips)


def _pick_topmost(pairs: list[ConflictPair]) -> ConflictPair:
    graph = conflict_graph(pairs, "crossing")
    has_in = {b for _, b in graph.arcs}
    for i in graph.order:
        if i not in has_in and is_topmost(pairs[i], pairs):
            return pairs[i]
    raise InvariantViolation("no topmost crossing pair left")


def hull_covered_sequence(t_in: Tree, t_tar: Tree) -> FlipSequence:
    """Exactly ``|T_in \\ T_tar|`` perfect compatible flips when the trees jointly use every hull edge.

    Greedy: every round adds a missing target edge that crosses nothing and
    removes a surplus edge on the cycle it closes.  Rounds that keep every
    hull edge in the union are preferred, then rounds touching a hull edge.
    """
    n = t_in.n
    g = geometry(n)
    if (t_in.code | t_tar.code) & g.hull_mask != g.hull_mask:
        raise ValueError("the two trees do not jointly contain every hull edge")
    cur = t_in
    steps = []
    while cur != t_tar:
        move = _best_perfect_move(cur, t_tar)
        if move is None:
            raise StuckWithoutPerfectFlip(f"no perfect compatible flip from {cur} towards {t_tar}")
        cur, s = _step(cur, *move, len(steps) + 1)
        steps.append(s)
    return FlipSequence(t_in, tuple(steps))


def _best_perfect_move(cur: Tree, target: Tree) -> tuple[Chord, Chord] | None:
    n = cur.n
    g = geometry(n)
    paths = _path_masks(n, cur.code)
    surplus = cur.code & ~target.code
    best = None
    for a_idx in g.indices(target.code & ~cur.code):
        if g.cross[a_idx] & cur.code:
            continue
        added = g.chords[a_idx]
        for r_idx in g.indices(paths[added[0]][added[1]] & surplus):
            removed = g.chords[r_idx]
            keeps_hull = not is_hull_edge(removed, n)
            touches_hull = is_hull_edge(removed, n) or is_hull_edge(added, n)
            rank = (not keeps_hull, not touches_hull, removed, added)
            if best is None or rank < best[0]:
                best = (rank, (removed, added))
    return None if best is None else best[1]


@dataclass
class PhasePlan:
    """Bookkeeping of the five-phase construction on one piece."""

    d: int = 0
    b: int = 0
    c: int = 0
    d1: int = 0
    d2: int = 0
    d3: int = 0
    largest: PairClass | None = None
    phases: list[FlipSequence] = field(default_factory=list)

    @property
    def length(self) -> int:
        return sum(len(p) for p in self.phases)


def five_phase(t_in: Tree, t_tar: Tree) -> tuple[FlipSequence, PhasePlan]:
    """Five-phase sequence for trees sharing the empty hull chord ``(n, 1)``."""
    n = t_in.n
    if Chord(1, n) in t_in or Chord(1, n) in t_tar:
        raise ValueError("the hull chord (1, n) must be absent from both trees")
    pairing = pair_gapwise(t_in, t_tar)
    rest = pairing.of(PairClass.REST)
    groups = {k: pairing.of(k) for k in (PairClass.ABOVE, PairClass.BELOW, PairClass.CROSSING)}
    # ties prefer A, then B, then C; C is the only class that costs one extra flip
    largest = max(groups, key=lambda k: (len(groups[k]), -list(groups).index(k)))
    smaller = [p for k, ps in groups.items() if k is not largest for p in ps]
    counts = bound_counts(t_in, t_tar)
    plan = PhasePlan(counts.d, counts.b, counts.c, largest=largest)
    plan.d1 = sum(1 for p in rest if p.shorts == 1)
    plan.d2 = len(rest) - plan.d1
    plan.d3 = sum(len(ps) for ps in groups.values())

    def to_gaps(tree: Tree, chosen: list[GapPair], side: str) -> FlipSequence:
        moves = []
        for p in sorted(chosen, key=lambda p: -length(getattr(p, side))):
            e = getattr(p, side)
            if e != gap_chord(p.gap):
                moves.append((e, gap_chord(p.gap)))
        return _run(tree, moves)

    ph1 = to_gaps(t_in, rest, "e")
    ph2 = to_gaps(ph1.end, smaller, "e")
    back5 = to_gaps(t_tar, rest, "e2")
    back4 = to_gaps(back5.end, smaller, "e2")
    mid_in, mid_tar = ph2.end, back4.end
    if largest is PairClass.CROSSING:
        ph3 = resolve_c(mid_in, groups[largest])
    else:
        ph3 = resolve_ab(mid_in, groups[largest])
    if ph3.end != mid_tar:
        raise InvariantViolation("middle phase does not meet the target side")
    ph4, ph5 = back4.reversed(), back5.reversed()
    plan.phases = [ph1, ph2, ph3, ph4, ph5]
    for p in rest:
        cost = (p.e_class.value != "short") + (p.e2_class.value != "short")
        if cost != 2 - p.shorts:
            raise InvariantViolation(f"pair at gap {p.gap} costs {cost} flips")
    steps = tuple(s for ph in plan.phases for s in ph.steps)
    return FlipSequence(t_in, steps), plan


def _lift(piece: SubPolygon, seq: FlipSequence) -> list[FlipStep]:
    return [FlipStep(piece.to_global(s.removed), piece.to_global(s.added), s.kind) for s in seq.steps]


def piece_sequence(t_in: Tree, t_tar: Tree) -> FlipSequence:
    """Solve one piece whose shared edges are all hull edges."""
    if t_in == t_tar:
        return FlipSequence(t_in, ())
    shift = relabel_for_common_hull_gap(t_in, t_tar)
    if shift is None:
        return hull_covered_sequence(t_in, t_tar)
    local, _ = five_phase(shift.restrict(t_in), shift.restrict(t_tar))
    return FlipSequence(t_in, tuple(_lift(shift, local)))


def pieces(t_in: Tree, t_tar: Tree) -> list[SubPolygon]:
    """Sub-polygons cut out by the shared diagonals, sorted by smallest label."""
    n = t_in.n
    shared = [e for e in t_in.edges if e in t_tar and not is_hull_edge(e, n)]
    polys = face_polygons(n, shared)
    return sorted((SubPolygon(n, tuple(sorted(p))) for p in polys), key=lambda s: s.vertices)


def compatible_sequence(t_in: Tree, t_tar: Tree, canonical: bool = True) -> FlipSequence:
    """A validated compatible flip sequence from ``t_in`` to ``t_tar`` within the bound.

    By default the construction runs on the smallest image of the pair under
    the dihedral relabelings and the swap of the two trees; the result is
    mapped back.  The bound is invariant under both, and the answer then
    depends only on the orbit of the pair.
    """
    if t_in.n != t_tar.n:
        raise ValueError("trees live on different point sets")
    if canonical:
        a, b, vmap, swapped = canonical_pair(t_in, t_tar, dihedral(t_in.n), swap=True)
        seq = pull_back(_construct(a, b), vmap, swapped)
    else:
        seq = _construct(t_in, t_tar)
    if seq.start != t_in or apply(seq) != t_tar:
        raise InvariantViolation("compatible sequence misses the target")
    return seq


def _construct(t_in: Tree, t_tar: Tree) -> FlipSequence:
    steps: list[FlipStep] = []
    for piece in pieces(t_in, t_tar):
        local = piece_sequence(piece.restrict(t_in), piece.restrict(t_tar))
        steps.extend(_lift(piece, local))
    return FlipSequence(t_in, tuple(steps))


def bound_report(t_in: Tree, t_tar: Tree, seq: FlipSequence, oracle: int | None = None) -> dict:
    counts = bound_counts(t_in, t_tar)
    out = {"d": counts.d, "b": counts.b, "c": counts.c, "bound": str(counts.bound), "emitted": len(seq)}
    if oracle is not None:
        out["oracle"] = oracle
    return out


def never_removes_shared(t_in: Tree, t_tar: Tree, seq: FlipSequence) -> bool:
    shared = set(t_in.edges) & set(t_tar.edges)
    return not any(s.removed in shared for s in seq.steps)


def check_bound(n: int, pairs: Iterable[tuple[Tree, Tree, int]], exhaustive: bool = True) -> PropertyVerdict:
    """Build a sequence for every pair and compare its length with the bound exactly.

    ``pairs`` carries a weight per pair (its orbit size), summed into
    ``pairsCovered``.  Stops at the first failure.
    """
    checked = covered = tight = 0
    for t_in, t_tar, weight in pairs:
        bound = length_bound(t_in, t_tar)
        try:
            seq = compatible_sequence(t_in, t_tar)
            if seq.start != t_in or apply(seq) != t_tar:
                raise InvariantViolation("sequence does not connect the pair")
            if any(st.kind > FlipKind.COMPATIBLE for st in seq.steps):
                raise InvariantViolation("non-compatible step")
            if len(seq) > bound:
                raise InvariantViolation(f"{len(seq)} flips exceed the bound {bound}")
        except (InvariantViolation, InvalidStep) as exc:
            ce = Counterexample(t_in, t_tar, {"error": str(exc), "bound": str(bound)})
            return PropertyVerdict(Property.COMPATIBLE_BOUND, FlipKind.COMPATIBLE, n, ce, exhaustive=exhaustive)
        checked += 1
        covered += weight
        tight += bound - len(seq) < 1
    stats = {"pairsChecked": checked, "pairsCovered": covered, "withinOneOfBound": tight}
    return PropertyVerdict(Property.COMPATIBLE_BOUND, FlipKind.COMPATIBLE, n, None, stats, exhaustive)

