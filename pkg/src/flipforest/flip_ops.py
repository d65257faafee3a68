"""Flip kinds, flip classification and application of flip sequences."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import IntEnum

from .convex_core import Chord, Tree, chord, crosses, geometry


class FlipKind(IntEnum):
    # finer kinds have smaller values
    SLIDE = 0
    ROTATION = 1
    COMPATIBLE = 2
    UNRESTRICTED = 3

    @property
    def label(self) -> str:
        return self.name.lower()

    @classmethod
    def parse(cls, text: "str | FlipKind") -> "FlipKind":
        if isinstance(text, FlipKind):
            return text
        try:
            return cls[text.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown flip kind {text!r}") from None


MAIN_KINDS = (FlipKind.UNRESTRICTED, FlipKind.COMPATIBLE, FlipKind.ROTATION)


class FlipError(ValueError):
    reason = "InvalidFlip"


class NotInTree(FlipError):
    reason = "NotInTree"


class AlreadyInTree(FlipError):
    reason = "AlreadyInTree"


class NotATreeAfterFlip(FlipError):
    reason = "NotATreeAfterFlip"


class InvalidStep(ValueError):
    def __init__(self, index: int, reason: str, detail: str = ""):
        super().__init__(f"step {index}: {reason}" + (f" ({detail})" if detail else ""))
        self.index = index
        self.reason = reason


@dataclass(frozen=True)
class FlipStep:
    removed: Chord
    added: Chord
    kind: FlipKind = FlipKind.UNRESTRICTED

    def __post_init__(self) -> None:
        object.__setattr__(self, "removed", chord(*self.removed))
        object.__setattr__(self, "added", chord(*self.added))
        if self.removed == self.added:
            raise ValueError("a flip must remove and add different chords")

    def reversed(self) -> "FlipStep":
        return FlipStep(self.added, self.removed, self.kind)


@dataclass(frozen=True)
class FlipSequence:
    start: Tree
    steps: tuple[FlipStep, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "steps", tuple(self.steps))

    def __len__(self) -> int:
        return len(self.steps)

    def trees(self) -> list[Tree]:
        """Every intermediate tree including both endpoints (no validation)."""
        g = geometry(self.start.n)
        code = self.start.code
        out = [self.start]
        for s in self.steps:
            code = (code & ~g.bit[s.removed]) | g.bit[s.added]
            out.append(Tree(self.start.n, code))
        return out

    @property
    def end(self) -> Tree:
        return self.trees()[-1]

    def reversed(self) -> "FlipSequence":
        return FlipSequence(self.end, tuple(s.reversed() for s in reversed(self.steps)))

    def then(self, other: "FlipSequence") -> "FlipSequence":
        return FlipSequence(self.start, self.steps + other.steps)

    def with_kind(self, kind: FlipKind) -> "FlipSequence":
        return FlipSequence(self.start, tuple(FlipStep(s.removed, s.added, kind) for s in self.steps))

    def to_json(self) -> dict:
        kinds = {s.kind for s in self.steps}
        kind = max(kinds) if kinds else FlipKind.UNRESTRICTED
        return {
            "start": self.start.to_json(),
            "kind": kind.label,
            "steps": [{"remove": list(s.removed), "add": list(s.added)} for s in self.steps],
        }

    @classmethod
    def from_json(cls, data: dict) -> "FlipSequence":
        kind = FlipKind.parse(data.get("kind", "unrestricted"))
        steps = tuple(FlipStep(tuple(s["remove"]), tuple(s["add"]), kind) for s in data["steps"])
        return cls(Tree.from_json(data["start"]), steps)


def _path_masks(n: int, code: int) -> list[list[int]]:
    """paths[u][v] = bitmask of tree edges on the path between u and v."""
    g = geometry(n)
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n + 1)]
    for i in g.indices(code):
        a, b = g.chords[i]
        adj[a].append((b, 1 << i))
        adj[b].append((a, 1 << i))
    paths = [[0] * (n + 1) for _ in range(n + 1)]
    for u in range(1, n + 1):
        row = paths[u]
        seen = [False] * (n + 1)
        seen[u] = True
        stack = [u]
        while stack:
            v = stack.pop()
            for w, bit in adj[v]:
                if not seen[w]:
                    seen[w] = True
                    row[w] = row[v] | bit
                    stack.append(w)
    return paths


def _finest(g, code: int, ri: int, ai: int, crossing: bool) -> FlipKind:
    if crossing:
        return FlipKind.UNRESTRICTED
    e, f = g.chords[ri], g.chords[ai]
    shared = set(e) & set(f)
    if not shared:
        return FlipKind.COMPATIBLE
    (v,) = shared
    w = e[0] if e[1] == v else e[1]
    u = f[0] if f[1] == v else f[1]
    # the triangle (u, v, w) is always empty in convex position
    if code & g.bit[chord(u, w)]:
        return FlipKind.SLIDE
    return FlipKind.ROTATION


def moves(n: int, code: int, kind: FlipKind = FlipKind.UNRESTRICTED) -> list[tuple[int, int, int, FlipKind]]:
    """All flips of finest kind <= ``kind`` as (removed idx, added idx, new code, finest).

    Sorted by removed chord, then added chord.
    """
    g = geometry(n)
    paths = _path_masks(n, code)
    out = []
    absent = g.full_mask & ~code
    while absent:
        low = absent & -absent
        ai = low.bit_length() - 1
        absent ^= low
        hit = g.cross[ai] & code
        if hit & (hit - 1):
            continue
        a, b = g.chords[ai]
        path = paths[a][b]
        if hit:
            if kind >= FlipKind.UNRESTRICTED and path & hit:
                ri = hit.bit_length() - 1
                out.append((ri, ai, (code ^ hit) | low, FlipKind.UNRESTRICTED))
            continue
        while path:
            pl = path & -path
            ri = pl.bit_length() - 1
            path ^= pl
            fk = _finest(g, code, ri, ai, False)
            if fk <= kind:
                out.append((ri, ai, (code ^ pl) | low, fk))
    out.sort()
    return out


def neighbour_codes(n: int, code: int, kind: FlipKind) -> list[int]:
    return [m[2] for m in moves(n, code, kind)]


def classify_flip(tree: Tree, removed: Chord, added: Chord) -> FlipKind:
    """Finest kind of the flip, or raise if it is not a flip at all."""
    g = geometry(tree.n)
    removed, added = chord(*removed), chord(*added)
    if removed not in g.bit or not tree.code & g.bit[removed]:
        raise NotInTree(f"{removed} is not an edge of the tree")
    if added not in g.bit:
        raise NotATreeAfterFlip(f"{added} is not a chord on {tree.n} points")
    if tree.code & g.bit[added]:
        raise AlreadyInTree(f"{added} is already an edge of the tree")
    new = (tree.code & ~g.bit[removed]) | g.bit[added]
    if not g.is_tree(new):
        raise NotATreeAfterFlip(f"removing {removed} and adding {added} breaks the tree")
    return _finest(g, tree.code, g.index[removed], g.index[added], crosses(removed, added))


def flip(tree: Tree, removed: Chord, added: Chord) -> Tree:
    classify_flip(tree, removed, added)
    g = geometry(tree.n)
    return Tree(tree.n, (tree.code & ~g.bit[chord(*removed)]) | g.bit[chord(*added)])


def legal_flips(tree: Tree, kind: FlipKind) -> list[FlipStep]:
    g = geometry(tree.n)
    return [FlipStep(g.chords[r], g.chords[a], kind) for r, a, _, _ in moves(tree.n, tree.code, kind)]


def apply(seq: FlipSequence) -> Tree:
    """Replay ``seq`` checking validity and the declared kind of every step."""
    tree = seq.start
    g = geometry(tree.n)
    for idx, step in enumerate(seq.steps, start=1):
        try:
            finest = classify_flip(tree, step.removed, step.added)
        except FlipError as exc:
            raise InvalidStep(idx, exc.reason, str(exc)) from None
        if finest > step.kind:
            raise InvalidStep(idx, "KindViolation", f"{finest.label} flip declared {step.kind.label}")
        tree = Tree(tree.n, (tree.code & ~g.bit[step.removed]) | g.bit[step.added])
    return tree


def removed_edges(seq: FlipSequence) -> set[Chord]:
    return {s.removed for s in seq.steps}


def random_walk(start: Tree, length: int, kind: FlipKind, rng: random.Random) -> FlipSequence:
    """``length`` uniformly chosen legal flips of ``kind`` from ``start``."""
    g = geometry(start.n)
    code = start.code
    steps = []
    for _ in range(length):
        r, a, code, _ = rng.choice(moves(start.n, code, kind))
        steps.append(FlipStep(g.chords[r], g.chords[a], kind))
    return FlipSequence(start, tuple(steps))
