"""Constructive rotation sequences of length at most 2(n-1) - max(|L|, |R|, |J|, |D|).

Rooting both trees at ``n`` attaches every other vertex to its incoming edge,
which pairs the edges of the two trees vertex by vertex.  For the vertex
``i`` with initial edge ``(i, j)`` and target edge ``(i, k)`` the pair is

* right-attached (R) if ``j, k < i``, left-attached (L) if ``j, k > i``,
* diving (D) if ``j < i < k`` and jumping (J) if ``k < i < j``.

One of the four classes holds at least a quarter of the vertices; the
matching strategy below saves one rotation per pair in it.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

from .convex_core import Chord, SubPolygon, Tree, chord, face_polygons, faces, geometry, is_hull_edge, validate_tree
from .errors import InvariantViolation
from .flip_ops import FlipKind, FlipSequence, FlipStep, InvalidStep, apply, classify_flip, flip, moves
from .linrep import ConflictPair, conflict_graph
from .verdicts import Counterexample, Property, PropertyVerdict

KIND = FlipKind.ROTATION


class NoApplicableRotation(InvariantViolation):
    pass


class CaseMachineStuck(InvariantViolation):
    pass


def rho(tree: Tree, root: int) -> dict[int, Chord]:
    """Map every vertex other than ``root`` to its incoming edge when rooted at ``root``.

    The dict is cached and shared; treat it as read-only.
    """
    return _rho(tree.n, tree.code, root)


@lru_cache(maxsize=1 << 16)
def _rho(n: int, code: int, root: int) -> dict[int, Chord]:
    adj: dict[int, list[int]] = {v: [] for v in range(1, n + 1)}
    for a, b in geometry(n).edges(code):
        adj[a].append(b)
        adj[b].append(a)
    out = {}
    stack = [root]
    seen = {root}
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                out[w] = chord(v, w)
                stack.append(w)
    return out


def parent_of(e: Chord, v: int) -> int:
    return e[0] if e[1] == v else e[1]


@dataclass(frozen=True)
class RotPairing:
    n: int
    initial: dict[int, Chord]
    target: dict[int, Chord]
    classes: dict[int, str]

    def members(self, *names: str) -> list[int]:
        return [v for v in range(1, self.n) if self.classes[v] in names]

    @property
    def left(self) -> list[int]:
        return self.members("LA", "LB")

    @property
    def right(self) -> list[int]:
        return self.members("RA", "RB")

    @property
    def jumping(self) -> list[int]:
        return self.members("J")

    @property
    def diving(self) -> list[int]:
        return self.members("D")

    def counts(self) -> dict[str, int]:
        return {"L": len(self.left), "R": len(self.right), "D": len(self.diving), "J": len(self.jumping)}


def classify_pair(i: int, j: int, k: int) -> str:
    if j < i and k < i:
        return "RA" if j <= k else "RB"
    if j > i and k > i:
        return "LA" if k <= j else "LB"
    return "D" if j < i else "J"


def rot_pairing(t_in: Tree, t_tar: Tree) -> RotPairing:
    n = t_in.n
    r_in, r_tar = rho(t_in, n), rho(t_tar, n)
    classes = {}
    for i in range(1, n):
        classes[i] = classify_pair(i, parent_of(r_in[i], i), parent_of(r_tar[i], i))
    return RotPairing(n, r_in, r_tar, classes)


def rotation_bound(pairing: RotPairing) -> int:
    return 2 * (pairing.n - 1) - max(pairing.counts().values())


def _rotate(tree: Tree, removed: Chord, added: Chord, index: int) -> tuple[Tree, FlipStep]:
    try:
        finest = classify_flip(tree, removed, added)
    except ValueError as exc:
        raise InvalidStep(index, getattr(exc, "reason", "InvalidFlip"), str(exc)) from None
    if finest > KIND:
        raise InvalidStep(index, "KindViolation", f"{removed}->{added} is {finest.label}")
    return flip(tree, removed, added), FlipStep(removed, added, KIND)


def delta(n: int, j: int, k: int) -> Chord:
    """Hull gap assigned to vertex ``k`` when gap ``(j, j+1)`` is left free."""
    if k > j:
        return chord(k, k % n + 1)
    return chord(k, (k - 2) % n + 1)


def star_transform(
    tree: Tree, j: int, istar: Iterable[int], kstar: Iterable[int], budget: int | None = None
) -> FlipSequence:
    """Rotate towards hull gaps ``delta_j(k)`` for ``k`` in ``istar`` and ``(n, k)`` for ``k`` in ``kstar``.

    The default budget is the number of vertices whose incoming edge
    (rooted at ``n``) differs from their goal.  With a non-empty ``kstar``
    that budget can be one short, so callers may pass a larger one.  The
    preferred move swaps a pending
    vertex's incoming edge for its goal, which settles exactly that vertex.
    Such swaps can deadlock, so the moves are explored depth first within
    the budget, pruned by the number of edges still missing.
    """
    n = tree.n
    istar, kstar = set(istar), set(kstar)
    if istar & kstar or istar | kstar != set(range(1, n)):
        raise ValueError("istar and kstar must partition 1..n-1")
    if not 1 <= j <= n - 1:
        raise ValueError("j must lie in 1..n-1")
    goal = {k: delta(n, j, k) if k in istar else chord(n, k) for k in range(1, n)}
    target = validate_tree(goal.values(), n)
    if budget is None:
        budget = _unsettled(tree, goal)
    own = rho(tree, n)
    keep = {e for k, e in own.items() if e == goal[k]}
    found = _rotation_search(tree, target, goal, budget, keep)
    if found is None:
        raise NoApplicableRotation(f"no rotation sequence within budget from {tree} to {target}")
    return FlipSequence(tree, tuple(FlipStep(r, a, KIND) for r, a in found))


def _unsettled(tree: Tree, goal: dict[int, Chord]) -> int:
    own = rho(tree, tree.n)
    return sum(1 for k, e in goal.items() if own[k] != e)


def _rotation_search(
    start: Tree, target: Tree, goal: dict[int, Chord], budget: int, keep: set[Chord]
) -> list[tuple[Chord, Chord]] | None:
    n = start.n
    g = geometry(n)
    frozen = g.mask_of(keep)
    dead: set[tuple[int, int]] = set()

    def missing(code: int) -> int:
        return bin(code & ~target.code).count("1")

    def ordered_moves(cur: Tree) -> list[tuple[int, Chord, Chord, int]]:
        own = rho(cur, n)
        swaps = {(own[k], goal[k]) for k in goal if own[k] != goal[k]}
        out = []
        for ri, ai, code, _ in moves(n, cur.code, KIND):
            if frozen >> ri & 1:
                continue
            r, a = g.chords[ri], g.chords[ai]
            rank = 0 if (r, a) in swaps else 1 if target.code & g.bit[a] else 2
            out.append((rank, r, a, code))
        out.sort(key=lambda m: m[0])
        return out

    def dfs(cur: Tree, left: int) -> list[tuple[Chord, Chord]] | None:
        if cur == target:
            return []
        if missing(cur.code) > left or (cur.code, left) in dead:
            return None
        for _, r, a, code in ordered_moves(cur):
            rest = dfs(Tree(n, code), left - 1)
            if rest is not None:
                return [(r, a)] + rest
        dead.add((cur.code, left))
        return None

    return dfs(start, budget)


def _lift(piece: SubPolygon, seq: FlipSequence) -> list[FlipStep]:
    return [FlipStep(piece.to_global(s.removed), piece.to_global(s.added), s.kind) for s in seq.steps]


def _side_piece(n: int, vertices: list[int], side: str, root_at_one: bool = False) -> SubPolygon:
    ordered = sorted(vertices)
    if side == "R":
        return SubPolygon(n, tuple(ordered))
    if ordered[0] == 1 and ordered[-1] == n and not root_at_one:
        return SubPolygon(n, tuple(sorted(ordered[:-1], reverse=True)) + (n,))
    return SubPolygon(n, tuple(reversed(ordered)))


def side_edges(tree_edges: dict[int, Chord], pairing: RotPairing, side: str) -> list[Chord]:
    members = pairing.right if side == "R" else pairing.left
    return [tree_edges[v] for v in members]


def rotate_to_hull(tree: Tree, pairing: RotPairing, side: str, which: str = "initial") -> FlipSequence:
    """Move every edge outside the chosen side class onto the hull.

    The polygon is cut along the side-class edges of ``tree`` (``which``
    selects the initial or target edges of the pairing).  Each piece is
    rooted at ``n`` if it contains ``n``, otherwise at its rightmost (R) or
    leftmost (L) vertex, and every other vertex moves to the hull gap on
    its side away from the root.
    """
    if side not in ("R", "L"):
        raise ValueError("side must be 'R' or 'L'")
    n = tree.n
    owned = pairing.initial if which == "initial" else pairing.target
    own = side_edges(owned, pairing, side)
    cut = [e for e in own if not is_hull_edge(e, n)]
    # a left-attached (1, n) stays put only if the outer piece is rooted at 1
    root_at_one = side == "L" and Chord(1, n) in own
    steps: list[FlipStep] = []
    for poly in sorted(face_polygons(n, cut), key=min):
        piece = _side_piece(n, poly, side, root_at_one)
        local = piece.restrict(tree)
        m = piece.m
        seq = star_transform(local, m - 1, range(1, m), ())
        steps.extend(_lift(piece, seq))
    seq = FlipSequence(tree, tuple(steps))
    end = apply(seq)
    for v in (pairing.right if side == "R" else pairing.left):
        gap = chord(v - 1, v) if side == "R" else chord(v, v + 1)
        if gap in end and gap != owned[v]:
            raise InvariantViolation(f"gap {gap} next to side vertex {v} is not empty")
    return seq


def resolve_lr(t1: Tree, t2: Tree, pairing: RotPairing, side: str) -> FlipSequence:
    """Rotate every side pair directly, in topological order of the conflict graph."""
    members = pairing.right if side == "R" else pairing.left
    pairs = []
    for v in members:
        e, e2 = pairing.initial[v], pairing.target[v]
        if e != e2:
            pairs.append(ConflictPair(v - 1 if side == "R" else v, e, e2))
    graph = conflict_graph(pairs, "full")
    cur = t1
    steps = []
    for i in graph.order:
        p = graph.nodes[i]
        cur, s = _rotate(cur, p.e, p.e2, len(steps) + 1)
        steps.append(s)
    if cur != t2:
        raise InvariantViolation("side resolution does not reach the second hull tree")
    return FlipSequence(t1, tuple(steps))


def lr_strategy(t_in: Tree, t_tar: Tree, pairing: RotPairing, side: str) -> FlipSequence:
    first = rotate_to_hull(t_in, pairing, side, "initial")
    last = rotate_to_hull(t_tar, pairing, side, "target")
    middle = resolve_lr(first.end, last.end, pairing, side)
    return first.then(middle).then(last.reversed())


class _Live:
    """Contracted view of the current tree used by the jump-pair sweep.

    Every live vertex stands for an interval of original labels ending at
    itself; cut-off vertices disappear completely.
    """

    def __init__(self, n: int):
        self.alive = list(range(1, n + 1))
        self.low = {v: v for v in range(1, n + 1)}
        self.gone: set[int] = set()

    def rep(self, v: int) -> int | None:
        if v in self.gone:
            return None
        for w in self.alive:
            if self.low[w] <= v <= w:
                return w
        return None

    def view(self, tree: Tree) -> tuple[Tree, dict[Chord, Chord]]:
        index = {v: i + 1 for i, v in enumerate(self.alive)}
        reps = {v: self.rep(v) for v in range(1, tree.n + 1)}
        real_of: dict[Chord, Chord] = {}
        for a, b in tree.edges:
            ra, rb = reps[a], reps[b]
            if ra is None or rb is None or ra == rb:
                continue
            le = chord(index[ra], index[rb])
            if le in real_of:
                raise CaseMachineStuck(f"edges {real_of[le]} and {(a, b)} collapse onto one live edge")
            real_of[le] = Chord(a, b)
        live = validate_tree(real_of, len(self.alive))
        return live, real_of

    def contract(self, first: int, last: int) -> None:
        """Merge the live vertices ``first..last`` (live indices) into the last one."""
        keep = self.alive[last - 1]
        merged = self.alive[first - 1:last - 1]
        self.low[keep] = self.low[self.alive[first - 1]]
        self.alive = [v for v in self.alive if v not in merged]

    def cut(self, left: int, right: int) -> None:
        """Drop everything strictly between two original labels."""
        for v in range(left + 1, right):
            self.gone.add(v)
        self.alive = [v for v in self.alive if not left < v < right]
        self.low[right] = right


def dj_forward(t_in: Tree, pairing: RotPairing) -> tuple[FlipSequence, Tree]:
    """Rotate ``t_in`` into the intermediate tree of the jump-pair strategy.

    After an opening rotation that puts ``(1, n)`` in place, the sweep looks
    at the unique empty hull gap in the face of ``(1, n)`` and applies one
    of the cases (1), (2a), (2b), (3a) or stops (3b).  Cut and contracted
    parts are tracked on a live view; emitted rotations use original labels.
    """
    n = t_in.n
    cur = t_in
    steps: list[FlipStep] = []
    owner = {e: v for v, e in pairing.initial.items()}

    def rotate(removed: Chord, added: Chord) -> None:
        nonlocal cur
        cur, s = _rotate(cur, removed, added, len(steps) + 1)
        steps.append(s)
        owner.pop(removed, None)

    if Chord(1, n) not in cur:
        rotate(pairing.initial[1], Chord(1, n))
    live = _Live(n)
    for _ in range(2 * n):
        view, real_of = live.view(cur)
        m = view.n
        if m < 3:
            break
        top = [f for f in faces(view) if Chord(1, m) in f.edges]
        if len(top) != 1:
            raise CaseMachineStuck("edge (1, n) does not border exactly one face")
        gi, gj = top[0].gap
        if gj != gi + 1:
            raise CaseMachineStuck(f"visible gap {top[0].gap} is not a spine gap")
        att = rho(view, m)
        if gj == m:
            inner = [e for e in view.edges if not is_hull_edge(e, m)]
            if not inner:
                break
            k = max(v for v, e in att.items() if not is_hull_edge(e, m))
            f = att[k]
            if parent_of(f, k) > k:
                raise CaseMachineStuck(f"rightmost inner edge {f} is not right-attached")
            real_f = real_of[f]
            kr = live.alive[k - 1]
            if kr not in real_f:
                raise CaseMachineStuck(f"edge {real_f} does not touch vertex {kr}")
            rotate(real_f, chord(kr, n))
            live.contract(k, m)
            continue
        e_r = att[gj]
        real_r = real_of[e_r]
        u = owner.get(real_r)
        rep_r = live.alive[gj - 1]
        if u is None or u != rep_r:
            raise CaseMachineStuck(f"edge {real_r} at live vertex {rep_r} is not its original edge")
        cls = pairing.classes[u]
        left_real = live.alive[gi - 1]
        if cls in ("LA", "LB"):
            gap = chord(left_real, live.low[rep_r])
            if live.low[rep_r] != u or gap[1] - gap[0] != 1:
                raise CaseMachineStuck(f"case (1) at {u} does not face a hull gap")
            rotate(real_r, gap)
            continue
        if cls != "J":
            raise CaseMachineStuck(f"edge attached right of the visible gap has class {cls}")
        target = pairing.target[u]
        vj = parent_of(target, u)
        lj = live.alive.index(vj) + 1 if vj in live.alive else None
        if lj is None:
            raise CaseMachineStuck(f"jump target endpoint {vj} is no longer live")
        between = [v for v in range(lj + 1, gi + 1) if not is_hull_edge(att[v], m)]
        if not between:
            rotate(real_r, target)
            live.cut(vj, u)
            continue
        k = max(between)
        f = att[k]
        if parent_of(f, k) > k:
            raise CaseMachineStuck(f"edge {f} chosen in case (2b) is not right-attached")
        real_f = real_of[f]
        kr = live.alive[k - 1]
        if kr not in real_f:
            raise CaseMachineStuck(f"edge {real_f} does not touch vertex {kr}")
        rotate(real_f, chord(kr, u))
        live.contract(k, gj)
    else:
        raise CaseMachineStuck("sweep did not terminate")
    return FlipSequence(t_in, tuple(steps)), cur


def dj_backward(t_tar: Tree, pairing: RotPairing, t_star: Tree, budget: int | None = None) -> FlipSequence:
    """Rotate ``t_tar`` into ``t_star`` piece by piece between jump target edges.

    The default budget is ``n - 1 - |J|`` rotations in total.  Every piece
    first tries its own vertex count of unsettled vertices; pieces where
    that is too little are deepened one rotation at a time afterwards.
    """
    n = t_tar.n
    if budget is None:
        budget = n - 1 - len(pairing.jumping)
    cut = [pairing.target[v] for v in pairing.jumping if not is_hull_edge(pairing.target[v], n)]
    pieces = [SubPolygon(n, tuple(sorted(poly))) for poly in sorted(face_polygons(n, cut), key=min)]
    plans = {}
    solved: dict[SubPolygon, FlipSequence] = {}
    for piece in pieces:
        m = piece.m
        local, star_local = piece.restrict(t_tar), piece.restrict(t_star)
        to_root = {k for k in range(2, m) if Chord(k, m) in star_local}
        plans[piece] = (local, star_local, set(range(1, m)) - to_root, to_root)
        try:
            solved[piece] = star_transform(local, m - 1, plans[piece][2], to_root)
        except NoApplicableRotation:
            pass
    for piece in pieces:
        if piece in solved:
            continue
        local, star_local, istar, kstar = plans[piece]
        spent = sum(len(x) for x in solved.values())
        later = sum(len(set(plans[p][1].edges) - set(plans[p][0].edges)) for p in pieces if p not in solved and p != piece)
        first = _unsettled(local, {k: star_goal(piece.m, k, istar) for k in range(1, piece.m)}) + 1
        for allowed in range(first, budget - spent - later + 1):
            try:
                solved[piece] = star_transform(local, piece.m - 1, istar, kstar, allowed)
                break
            except NoApplicableRotation:
                continue
        else:
            raise NoApplicableRotation(f"piece {piece.vertices} cannot be finished within the backward budget")
    steps: list[FlipStep] = []
    for piece in pieces:
        if solved[piece].end != plans[piece][1]:
            raise InvariantViolation(f"piece {piece.vertices} of the intermediate tree has an unexpected shape")
        steps.extend(_lift(piece, solved[piece]))
    seq = FlipSequence(t_tar, tuple(steps))
    if apply(seq) != t_star:
        raise InvariantViolation("backward sweep misses the intermediate tree")
    return seq


def star_goal(n: int, k: int, istar: set[int]) -> Chord:
    return delta(n, n - 1, k) if k in istar else chord(n, k)


def j_strategy(t_in: Tree, t_tar: Tree, pairing: RotPairing) -> FlipSequence:
    forward, t_star = dj_forward(t_in, pairing)
    # whatever the forward sweep saved may be spent going backward
    budget = 2 * (t_in.n - 1) - len(pairing.jumping) - len(forward)
    backward = dj_backward(t_tar, pairing, t_star, budget)
    return forward.then(backward.reversed())


@dataclass(frozen=True)
class RotationResult:
    sequence: FlipSequence
    strategy: str
    pairing: RotPairing

    @property
    def bound(self) -> int:
        return rotation_bound(self.pairing)

    def report(self) -> dict:
        out = dict(self.pairing.counts())
        out.update({"strategy": self.strategy, "bound": self.bound, "emitted": len(self.sequence)})
        return out


def rotation_sequence(t_in: Tree, t_tar: Tree, strategy: str | None = None, canonical: bool = True) -> RotationResult:
    """Rotation sequence using the strategy of the largest class (ties: L, R, J, D).

    Without a forced strategy the construction runs on whichever of
    ``(t_in, t_tar)`` and ``(t_tar, t_in)`` is smaller and is reversed if
    needed.  Swapping the trees exchanges J and D and keeps the bound.
    """
    if t_in.n != t_tar.n:
        raise ValueError("trees live on different point sets")
    if strategy is None and canonical:
        swapped = t_tar.code < t_in.code
        inner = _construct(t_tar, t_in, None) if swapped else _construct(t_in, t_tar, None)
        seq = inner.sequence.reversed() if swapped else inner.sequence
        label = inner.strategy
        if swapped:
            label = {"J": "D", "D": "J"}.get(label, label)
        result = RotationResult(seq, label, rot_pairing(t_in, t_tar))
        if result.bound != inner.bound:
            raise InvariantViolation("rotation bound differs between the images of a pair")
    else:
        result = _construct(t_in, t_tar, strategy)
    if result.sequence.start != t_in or apply(result.sequence) != t_tar:
        raise InvariantViolation("rotation sequence misses the target")
    return result


def _construct(t_in: Tree, t_tar: Tree, strategy: str | None) -> RotationResult:
    pairing = rot_pairing(t_in, t_tar)
    counts = pairing.counts()
    if strategy is None:
        strategy = max(("L", "R", "J", "D"), key=lambda s: (counts[s], -"LRJD".index(s)))
    if t_in == t_tar:
        seq = FlipSequence(t_in, ())
    elif strategy in ("L", "R"):
        seq = lr_strategy(t_in, t_tar, pairing, strategy)
    elif strategy == "J":
        seq = j_strategy(t_in, t_tar, pairing)
    elif strategy == "D":
        swapped = rot_pairing(t_tar, t_in)
        seq = j_strategy(t_tar, t_in, swapped).reversed()
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    return RotationResult(seq, strategy, pairing)


def check_bound(n: int, pairs: Iterable[tuple[Tree, Tree, int]], exhaustive: bool = True) -> PropertyVerdict:
    """Build a rotation sequence for every pair; each must be legal and within its bound."""
    checked = covered = 0
    by_strategy = {"L": 0, "R": 0, "J": 0, "D": 0}
    for t_in, t_tar, weight in pairs:
        try:
            res = rotation_sequence(t_in, t_tar)
            seq = res.sequence
            if seq.start != t_in or apply(seq) != t_tar:
                raise InvariantViolation("sequence does not connect the pair")
            if any(st.kind > KIND for st in seq.steps):
                raise InvariantViolation("step not declared as a rotation")
            if len(seq) > res.bound:
                raise InvariantViolation(f"{len(seq)} rotations exceed the bound {res.bound}")
        except (InvariantViolation, InvalidStep) as exc:
            ce = Counterexample(t_in, t_tar, {"error": str(exc), "bound": rotation_bound(rot_pairing(t_in, t_tar))})
            return PropertyVerdict(Property.ROTATION_BOUND, KIND, n, ce, exhaustive=exhaustive)
        checked += 1
        covered += weight
        by_strategy[res.strategy] += 1
    stats = {"pairsChecked": checked, "pairsCovered": covered, "strategies": by_strategy}
    return PropertyVerdict(Property.ROTATION_BOUND, KIND, n, None, stats, exhaustive)

