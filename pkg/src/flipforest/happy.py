"""Happy edges: normalizations of flip sequences and exhaustive property checks.

A happy edge is one that both endpoint trees share.  A sequence "flips" a
happy edge when it removes one at any step.

The exhaustive checks never enumerate geodesics one by one.  An arc u -> v of
the flip graph lies on some s-t geodesic iff ``D[s,u] + 1 + D[v,t] == D[s,t]``,
so questions about every geodesic become questions about arcs of that DAG.
"""

from __future__ import annotations

import json
import random
from collections import deque
from importlib import resources

import numpy as np

from .convex_core import Chord, Tree, chord, crosses, geometry, is_hull_edge, random_tree
from .errors import BudgetExceeded, InvariantViolation
from .flip_ops import (FlipKind, FlipSequence, FlipStep, InvalidStep, _path_masks, apply, classify_flip, moves,
                       random_walk)
from .verdicts import Counterexample, Property, PropertyVerdict
from .oracle import UNREACHED, build_flip_graph, distance, distance_matrix, random_geodesic


class PreconditionViolated(ValueError):
    pass


FIXTURES = ("crossing_shortcut", "perfect_flip_trap", "rotation_happy_trap")


def load_fixture(name: str) -> dict:
    """Shipped instance ``name`` with its trees parsed (``in``, ``tar``, optional ``line``)."""
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}")
    raw = json.loads(resources.files("flipforest").joinpath("fixtures", f"{name}.json").read_text())
    raw["in"] = Tree.from_json(raw["in"])
    raw["tar"] = Tree.from_json(raw["tar"])
    if "line" in raw:
        raw["line"] = FlipSequence.from_json(raw["line"])
    return raw


def flips_happy_edge(seq: FlipSequence, t_tar: Tree | None = None) -> bool:
    end = apply(seq) if t_tar is None else t_tar
    happy = set(seq.start.edges) & set(end.edges)
    return any(s.removed in happy for s in seq.steps)


def _declared_kind(seq: FlipSequence) -> FlipKind:
    return max((s.kind for s in seq.steps), default=FlipKind.UNRESTRICTED)


def _steps_between(trees: list[Tree], kind: FlipKind) -> list[FlipStep]:
    steps = []
    for a, b in zip(trees, trees[1:]):
        gone = set(a.edges) - set(b.edges)
        new = set(b.edges) - set(a.edges)
        if not gone:
            continue
        if len(gone) != 1 or len(new) != 1:
            raise InvariantViolation(f"consecutive trees differ in {len(gone)} edges")
        steps.append(FlipStep(gone.pop(), new.pop(), kind))
    return steps


# ---------------------------------------------------------------- remove, re-add


def normalize_remove_readd(seq: FlipSequence, e: Chord) -> FlipSequence:
    """Drop one removal and re-addition of ``e``, saving at least one flip.

    Between the removal and the re-addition, every intermediate tree gets
    ``e`` back in exchange for the first edge on the closed cycle that the
    original sequence removes later.  Needs that nothing added in between
    crosses ``e``.
    """
    e = chord(*e)
    trees = seq.trees()
    start = next((i for i, s in enumerate(seq.steps) if s.removed == e), None)
    if start is None:
        raise PreconditionViolated(f"{e} is never removed")
    stop = next((j for j in range(start + 1, len(seq.steps)) if seq.steps[j].added == e), None)
    if stop is None:
        raise PreconditionViolated(f"{e} is removed but never added back")
    for s in seq.steps[start:stop + 1]:
        if crosses(s.added, e):
            raise PreconditionViolated(f"{s.added} is added while {e} is missing and crosses it")
    n = seq.start.n
    g = geometry(n)
    window = trees[start:stop + 2]   # window[0] and window[-1] contain e
    later = seq.steps[start + 1:stop + 1]
    rebuilt = [window[0]]
    for i in range(1, len(window) - 1):
        cur = window[i]
        cycle = _path_masks(n, cur.code)[e[0]][e[1]]
        f = next(s.removed for s in later[i - 1:] if g.bit[s.removed] & cycle)
        rebuilt.append(Tree(n, (cur.code | g.bit[e]) & ~g.bit[f]))
    kind = _declared_kind(seq)
    middle = _steps_between(rebuilt, kind)
    out = FlipSequence(seq.start, seq.steps[:start] + tuple(middle) + seq.steps[stop + 1:])
    if apply(out) != trees[-1]:
        raise InvariantViolation("remove-readd normalization changed the end tree")
    return out


# ---------------------------------------------------------------- parking edges


def parking_edges(seq: FlipSequence) -> set[Chord]:
    trees = seq.trees()
    ends = set(trees[0].edges) | set(trees[-1].edges)
    return {e for t in trees for e in t.edges} - ends


def _side(f: Chord, e: Chord) -> int:
    """+1 if ``e`` lies between the endpoints of ``f``, -1 if outside, 0 for ``f`` itself."""
    a, b = f
    if e == f:
        return 0
    inside = all(a <= x <= b for x in e)
    outside = all(x <= a or x >= b for x in e)
    if inside == outside:
        raise InvariantViolation(f"{e} crosses {f}")
    return 1 if inside else -1


def _side_vertices(f: Chord, side: int, n: int) -> list[int]:
    a, b = f
    if side > 0:
        return list(range(a, b + 1))
    return list(range(b, n + 1)) + list(range(1, a + 1))


def _bridge(tree: Tree, f: Chord, side: int) -> Chord:
    """Hull edge on ``side`` joining the two parts of the tree left after removing ``f``."""
    n = tree.n
    verts = _side_vertices(f, side, n)
    parent = {v: v for v in verts}

    def find(x: int) -> int:
        while parent[x] != x:
            x = parent[x]
        return x

    for e in tree.edges:
        if e != f and _side(f, e) == side:
            parent[find(e[0])] = find(e[1])
    for u, v in zip(verts, verts[1:]):
        if find(u) != find(v):
            return chord(u, v)
    raise InvariantViolation(f"side of {f} is connected without it")


def _next_inner_parking(seq: FlipSequence) -> tuple[Chord, int, int] | None:
    n = seq.start.n
    trees = seq.trees()
    parked = parking_edges(seq)
    for i, t in enumerate(trees):
        for e in t.edges:
            if e in parked and not is_hull_edge(e, n):
                j = i
                while j + 1 < len(trees) and e in trees[j + 1]:
                    j += 1
                return e, i, j
    return None


def _reroute(seq: FlipSequence, f: Chord, first: int, last: int) -> FlipSequence:
    # trees[first..last] all contain f; step first-1 adds it, step last removes it
    n = seq.start.n
    g = geometry(n)
    trees = seq.trees()
    steps = seq.steps
    opening, closing = steps[first - 1], steps[last]
    path = _path_masks(n, trees[first - 1].code)[f[0]][f[1]]
    side_b = _side(f, g.chords[(path & -path).bit_length() - 1])
    side_a = -side_b
    on_a, on_b = [], []
    for s in steps[first:last]:
        where = _side(f, s.added)
        if _side(f, s.removed) != where:
            raise InvariantViolation(f"flip {s.removed}->{s.added} straddles {f}")
        (on_a if where == side_a else on_b).append(s)
    h = _bridge(trees[last], f, side_a)
    # when f is finally replaced by h itself the closing flip vanishes
    unpark = () if h == closing.added else (FlipStep(h, closing.added, closing.kind),)
    new = (
        steps[:first - 1]
        + tuple(on_a)
        + (FlipStep(opening.removed, h, opening.kind),)
        + tuple(on_b)
        + unpark
        + steps[last + 1:]
    )
    return FlipSequence(seq.start, new)


def normalize_parking(seq: FlipSequence) -> FlipSequence:
    """Compatible sequence, no longer than ``seq``, whose parking edges all lie on the hull.

    Each occurrence of a diagonal parking edge ``f`` is replaced in turn.  The
    flips on the side of ``f`` away from the path that ``f`` short-cuts run
    first, a hull edge bridges that side instead of ``f``, the other side
    follows, and the bridge is swapped for whatever replaced ``f``.  The
    length only drops when that replacement is the bridge itself, which
    cannot happen on a shortest sequence.
    """
    end = apply(seq)
    for i, s in enumerate(seq.steps, start=1):
        if s.kind > FlipKind.COMPATIBLE:
            raise InvalidStep(i, "KindViolation", "parking normalization needs compatible flips")
    out = seq
    while True:
        hit = _next_inner_parking(out)
        if hit is None:
            break
        out = _reroute(out, *hit)
        if apply(out) != end:
            raise InvariantViolation("parking normalization changed the end tree")
    if len(out) > len(seq):
        raise InvariantViolation("parking normalization made the sequence longer")
    return out


def parking_sample(n_max: int, samples: int, seed: int, max_len: int = 12) -> list[tuple[FlipSequence, bool]]:
    """Random valid compatible sequences on 4..n_max points, flagged True if built as geodesics.

    Even draws are random walks, odd draws random geodesics between random trees.
    """
    rng = random.Random(seed)
    out = []
    for i in range(samples):
        n = rng.randint(4, n_max)
        start = random_tree(n, rng)
        if i % 2:
            out.append((random_geodesic(start, random_tree(n, rng), FlipKind.COMPATIBLE, rng), True))
        else:
            out.append((random_walk(start, rng.randint(0, max_len), FlipKind.COMPATIBLE, rng), False))
    return out


def check_parking(n_max: int, samples: int = 1000, seed: int = 0) -> PropertyVerdict:
    """Normalize a random sample and check ends, kind, length and parking edges of every output."""
    changed = shorter = on_geodesics = 0
    for seq, geodesic in parking_sample(n_max, samples, seed):
        out = normalize_parking(seq)
        end = apply(out)
        n = seq.start.n
        problem = None
        if out.start != seq.start or end != apply(seq):
            problem = "endpoints changed"
        elif any(s.kind > FlipKind.COMPATIBLE for s in out.steps):
            problem = "non-compatible step"
        elif any(not is_hull_edge(e, n) for e in parking_edges(out)):
            problem = "diagonal parking edge left"
        elif len(out) > len(seq) or (geodesic and len(out) != len(seq)):
            problem = "length changed"
        elif len(out) < len(seq) and len(seq) == distance(seq.start, end, FlipKind.COMPATIBLE).distance:
            problem = "shortened a geodesic"
        if problem:
            ce = Counterexample(seq.start, end, {"problem": problem, "input": seq.to_json(), "output": out.to_json()})
            return PropertyVerdict(Property.PARKING_ON_HULL, FlipKind.COMPATIBLE, n_max, ce, exhaustive=False)
        changed += out != seq
        on_geodesics += geodesic and out != seq
        shorter += len(out) < len(seq)
    stats = {"samples": samples, "seed": seed, "rerouted": changed, "reroutedGeodesics": on_geodesics, "shortened": shorter}
    return PropertyVerdict(Property.PARKING_ON_HULL, FlipKind.COMPATIBLE, n_max, None, stats, exhaustive=False)


# ---------------------------------------------------------------- exhaustive checks


def _graph_arrays(n: int, kind: FlipKind):
    graph = build_flip_graph(n, kind)
    dm = distance_matrix(n, kind).astype(np.int16)
    if (dm == UNREACHED).any():
        raise InvariantViolation(f"{kind.label} flip graph on {n} points is disconnected")
    codes = np.asarray(graph.nodes, dtype=np.int64)
    src = graph.sources()
    return graph, dm, codes, src, graph.targets.astype(np.int64), graph.removed.astype(np.int64), graph.added.astype(np.int64)


def _geodesic_evidence(n: int, kind: FlipKind, s: int, t: int, removing: int) -> dict:
    """A concrete geodesic that removes a chord of ``removing``."""
    graph, dm, codes, src, dst, rem, _ = _graph_arrays(n, kind)
    g = geometry(n)
    d = int(dm[s, t])
    on = (dm[s, src] + 1 + dm[dst, t]) == d
    hit = np.flatnonzero(on & (((removing >> rem) & 1) == 1))[0]
    u, v = int(src[hit]), int(dst[hit])
    head = distance(Tree(n, int(codes[s])), Tree(n, int(codes[u])), kind).witness
    tail = distance(Tree(n, int(codes[v])), Tree(n, int(codes[t])), kind).witness
    step = FlipStep(g.chords[int(rem[hit])], g.chords[int(graph.added[hit])], kind)
    seq = FlipSequence(head.start, head.steps + (step,) + tail.steps)
    return {"distance": d, "geodesic": seq.to_json(), "happyRemoved": list(step.removed)}


def verify_strong_happy(n: int, kind: FlipKind = FlipKind.COMPATIBLE) -> PropertyVerdict:
    """Does any geodesic between any two trees remove one of their shared edges?

    Works target by target on the arcs that descend towards ``t`` and asks,
    for every source at once, whether such an arc sits on an s-t geodesic and
    removes a chord of ``s & t``.
    """
    kind = FlipKind.parse(kind)
    graph, dm, codes, src, dst, rem, _ = _graph_arrays(n, kind)
    size = graph.size
    checked = 0
    for t in range(size):
        dt = dm[:, t]
        down = dt[src] == dt[dst] + 1
        a_src, a_dst, a_rem = src[down], dst[down], rem[down]
        in_t = ((int(codes[t]) >> a_rem) & 1) == 1
        a_src, a_dst, a_rem = a_src[in_t], a_dst[in_t], a_rem[in_t]
        if not len(a_src):
            continue
        on = (dm[:, a_src] + 1 + dt[a_dst][None, :]) == dt[:, None]
        in_s = ((codes[:, None] >> a_rem[None, :]) & 1) == 1
        bad = (on & in_s).any(axis=1)
        bad[t] = False
        checked += size
        if bad.any():
            s = int(np.flatnonzero(bad)[0])
            ev = _geodesic_evidence(n, kind, s, t, int(codes[s] & codes[t]))
            return PropertyVerdict(Property.STRONG_HAPPY, kind, n,
                                   Counterexample(Tree(n, int(codes[s])), Tree(n, int(codes[t])), ev))
    return PropertyVerdict(Property.STRONG_HAPPY, kind, n, stats={"pairs": size * size})


def strong_happy_by_counting(n: int, kind: FlipKind = FlipKind.COMPATIBLE) -> tuple[int, int]:
    """Second route to the strong check, by counting geodesics.

    For every target ``t`` and chord ``c`` of ``t`` the number of geodesics
    into ``t`` is counted twice, once in full and once over arcs that keep
    ``c``.  Returns ``(violating pairs, total geodesics counted)``.
    """
    kind = FlipKind.parse(kind)
    graph, dm, codes, src, dst, rem, _ = _graph_arrays(n, kind)
    size = graph.size
    g = geometry(n)
    bad_pairs = 0
    total_paths = 0
    for t in range(size):
        dt = dm[:, t]
        down = dt[src] == dt[dst] + 1
        a_src, a_dst, a_rem = src[down], dst[down], rem[down]
        layer = dt[a_src]
        depth = int(dt.max())

        def count(keep: np.ndarray) -> np.ndarray:
            paths = np.zeros(size, dtype=np.int64)
            paths[t] = 1
            for d in range(1, depth + 1):
                sel = keep & (layer == d)
                np.add.at(paths, a_src[sel], paths[a_dst[sel]])
            return paths

        full = count(np.ones(len(a_src), dtype=bool))
        if full.max() >= 2**62:
            raise BudgetExceeded("geodesic counts overflow int64")
        total_paths += int(full.sum()) - 1
        bad = np.zeros(size, dtype=bool)
        for c in g.indices(int(codes[t])):
            kept = count(a_rem != c)
            bad |= (((codes >> c) & 1) == 1) & (kept < full)
        bad[t] = False
        bad_pairs += int(bad.sum())
    return bad_pairs, total_paths


def strong_happy_by_enumeration(n: int, kind: FlipKind = FlipKind.COMPATIBLE, cap: int = 10**6) -> tuple[int, int]:
    """Third route: walk every geodesic of every pair, one at a time.

    Depth-first over arcs that lose one unit of distance to the target.
    Raises BudgetExceeded when one pair has more than ``cap`` geodesics.
    Returns ``(violating pairs, geodesics walked)``.
    """
    kind = FlipKind.parse(kind)
    graph = build_flip_graph(n, kind)
    dm = distance_matrix(n, kind)
    codes = graph.nodes
    arcs = [list(zip(graph.targets[graph.indptr[u]:graph.indptr[u + 1]].tolist(),
                     graph.removed[graph.indptr[u]:graph.indptr[u + 1]].tolist()))
            for u in range(graph.size)]
    bad = walked = 0
    for t in range(graph.size):
        dt = dm[:, t].tolist()
        for s in range(graph.size):
            if s == t:
                continue
            happy = codes[s] & codes[t]
            count = 0
            hit = False
            stack = [(s, False)]
            while stack:
                u, dirty = stack.pop()
                if u == t:
                    count += 1
                    hit = hit or dirty
                    if count > cap:
                        raise BudgetExceeded(f"more than {cap} geodesics between two trees")
                    continue
                want = dt[u] - 1
                for v, r in arcs[u]:
                    if dt[v] == want:
                        stack.append((v, dirty or bool(happy >> r & 1)))
            walked += count
            bad += hit
    return bad, walked


def verify_weak_happy(n: int, kind: FlipKind) -> PropertyVerdict:
    """Is there a pair all of whose geodesics remove a shared edge?

    For each target and each pattern of shared edges, marks the trees that
    still reach the target along a geodesic that keeps the pattern.  The
    reported pair is the smallest by (source, target) in canonical order.
    """
    kind = FlipKind.parse(kind)
    graph, dm, codes, src, dst, rem, _ = _graph_arrays(n, kind)
    size = graph.size
    first = None
    for t in range(size):
        dt = dm[:, t]
        down = dt[src] == dt[dst] + 1
        a_src, a_dst, a_rem = src[down], dst[down], rem[down]
        layer = dt[a_src]
        happy = codes & codes[t]
        for pattern in np.unique(happy):
            pattern = int(pattern)
            if not pattern:
                continue
            keep = ((pattern >> a_rem) & 1) == 0
            ok = np.zeros(size, dtype=bool)
            ok[t] = True
            for d in range(1, int(dt.max()) + 1):
                sel = keep & (layer == d) & ok[a_dst]
                ok[a_src[sel]] = True
            stuck = np.flatnonzero((happy == pattern) & ~ok)
            if len(stuck):
                first = min(first or (size, size), (int(stuck[0]), t))
    if first is None:
        return PropertyVerdict(Property.WEAK_HAPPY, kind, n, stats={"pairs": size * size})
    s, t = first
    s_tree, t_tree = Tree(n, int(codes[s])), Tree(n, int(codes[t]))
    ev = {
        "distance": int(dm[s, t]),
        "happyPreservingDistance": happy_preserving_distance(s_tree, t_tree, kind),
    }
    return PropertyVerdict(Property.WEAK_HAPPY, kind, n, Counterexample(s_tree, t_tree, ev))


def happy_preserving_distance(t_in: Tree, t_tar: Tree, kind: FlipKind) -> int | None:
    """Shortest sequence that never removes a shared edge (None if there is none)."""
    kind = FlipKind.parse(kind)
    n = t_in.n
    g = geometry(n)
    keep = t_in.code & t_tar.code
    dist = {t_in.code: 0}
    queue = deque([t_in.code])
    while queue:
        code = queue.popleft()
        if code == t_tar.code:
            return dist[code]
        for r, _, new, _ in moves(n, code, kind):
            if not (g.bit[g.chords[r]] & keep) and new not in dist:
                dist[new] = dist[code] + 1
                queue.append(new)
    return None


# ---------------------------------------------------------------- perfect flips


def is_perfect_flip(tree: Tree, step: FlipStep, t_tar: Tree) -> bool:
    return step.removed not in t_tar and step.added in t_tar


def perfect_flips(tree: Tree, t_tar: Tree, kind: FlipKind) -> list[FlipStep]:
    n = tree.n
    g = geometry(n)
    out = []
    for r, a, _, _ in moves(n, tree.code, kind):
        if not t_tar.code >> r & 1 and t_tar.code >> a & 1:
            out.append(FlipStep(g.chords[r], g.chords[a], kind))
    return out


def check_perfect_flip_property(n: int, kind: FlipKind) -> PropertyVerdict:
    """Look for a perfect first flip that no geodesic starts with.

    A flip is perfect when it removes an edge the target lacks and adds one
    it has.  The first pair found (by target index, then source index)
    becomes the counterexample.
    """
    kind = FlipKind.parse(kind)
    graph, dm, codes, src, dst, rem, add = _graph_arrays(n, kind)
    g = geometry(n)
    for t in range(graph.size):
        ct = int(codes[t])
        perfect = (((ct >> rem) & 1) == 0) & (((ct >> add) & 1) == 1)
        wasted = perfect & (dm[dst, t] != dm[src, t] - 1)
        if wasted.any():
            k = int(np.flatnonzero(wasted)[0])
            s, v = int(src[k]), int(dst[k])
            step = FlipStep(g.chords[int(rem[k])], g.chords[int(add[k])], kind)
            ev = {
                "flip": {"remove": list(step.removed), "add": list(step.added)},
                "distance": int(dm[s, t]),
                "distanceAfterFlip": int(dm[v, t]),
            }
            return PropertyVerdict(Property.PERFECT_FLIP, kind, n,
                                   Counterexample(Tree(n, int(codes[s])), Tree(n, ct), ev))
    return PropertyVerdict(Property.PERFECT_FLIP, kind, n, stats={"pairs": graph.size ** 2})


def greedy_perfect_line(t_in: Tree, t_tar: Tree, kind: FlipKind) -> FlipSequence:
    """Play the smallest perfect flip while one exists."""
    kind = FlipKind.parse(kind)
    cur = t_in
    steps = []
    while True:
        options = perfect_flips(cur, t_tar, kind)
        if not options:
            return FlipSequence(t_in, tuple(steps))
        step = min(options, key=lambda s: (s.removed, s.added))
        g = geometry(cur.n)
        cur = Tree(cur.n, (cur.code & ~g.bit[step.removed]) | g.bit[step.added])
        steps.append(step)


def replay(verdict: PropertyVerdict) -> bool:
    """Recompute a counterexample's evidence from scratch."""
    ce = verdict.counterexample
    if ce is None:
        return True
    kind = verdict.kind
    d = distance(ce.t_in, ce.t_tar, kind).distance
    ev = ce.evidence
    if d != ev["distance"]:
        return False
    if verdict.prop is Property.STRONG_HAPPY:
        seq = FlipSequence.from_json(ev["geodesic"])
        return apply(seq) == ce.t_tar and len(seq) == d and flips_happy_edge(seq, ce.t_tar)
    if verdict.prop is Property.WEAK_HAPPY:
        kept = happy_preserving_distance(ce.t_in, ce.t_tar, kind)
        return kept == ev["happyPreservingDistance"] and (kept is None or kept > d)
    if verdict.prop is Property.PERFECT_FLIP:
        step = FlipStep(tuple(ev["flip"]["remove"]), tuple(ev["flip"]["add"]), kind)
        if classify_flip(ce.t_in, step.removed, step.added) > kind or not is_perfect_flip(ce.t_in, step, ce.t_tar):
            return False
        g = geometry(ce.t_in.n)
        after = Tree(ce.t_in.n, (ce.t_in.code & ~g.bit[step.removed]) | g.bit[step.added])
        d2 = distance(after, ce.t_tar, kind).distance
        return d2 == ev["distanceAfterFlip"] and d2 != d - 1
    return False


# ---------------------------------------------------------------- hierarchy premise


def check_hierarchy_premise(n: int, kind: FlipKind) -> dict:
    """How much can the best happy-flipping sequence be shortened?

    For every pair with a shared edge, finds the shortest sequence that
    removes one of the shared edges somewhere and records its excess over the
    distance, bucketed as 0, 1 and 2+.  Measures, proves nothing.
    """
    kind = FlipKind.parse(kind)
    graph, dm, codes, src, dst, rem, _ = _graph_arrays(n, kind)
    buckets = {"0": 0, "1": 0, "2+": 0}
    example: dict[str, tuple[int, int]] = {}
    for t in range(graph.size):
        ct = int(codes[t])
        keep = ((ct >> rem) & 1) == 1
        a_src, a_dst, a_rem = src[keep], dst[keep], rem[keep]
        if not len(a_src):
            continue
        via = dm[:, a_src] + 1 + dm[a_dst, t][None, :]
        in_s = ((codes[:, None] >> a_rem[None, :]) & 1) == 1
        via = np.where(in_s, via, np.iinfo(np.int16).max)
        best = via.min(axis=1)
        for s in range(graph.size):
            if s == t or not int(codes[s]) & ct:
                continue
            excess = int(best[s]) - int(dm[s, t])
            key = "0" if excess <= 0 else "1" if excess == 1 else "2+"
            buckets[key] += 1
            example.setdefault(key, (s, t))
    return {
        "n": n,
        "kind": kind.label,
        "excess": buckets,
        "examples": {k: [Tree(n, int(codes[s])).to_json(), Tree(n, int(codes[t])).to_json()]
                     for k, (s, t) in sorted(example.items())},
    }
