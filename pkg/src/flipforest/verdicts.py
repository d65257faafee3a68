"""Outcome records shared by the exhaustive and sampled property checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .convex_core import Tree
from .flip_ops import FlipKind


class Property(Enum):
    WEAK_HAPPY = "WeakHappy"
    STRONG_HAPPY = "StrongHappy"
    PERFECT_FLIP = "PerfectFlip"
    PARKING_ON_HULL = "ParkingOnHull"
    GAP_BIJECTION = "GapBijection"
    SHORT_WIDE_COUNTS = "ShortWideCounts"
    COMPATIBLE_BOUND = "CompatibleBound"
    ROTATION_BOUND = "RotationBound"


@dataclass(frozen=True)
class Counterexample:
    t_in: Tree
    t_tar: Tree | None  # None for properties of a single tree
    evidence: dict

    def to_json(self) -> dict:
        out = {"in": self.t_in.to_json()}
        if self.t_tar is not None:
            out["tar"] = self.t_tar.to_json()
        out["evidence"] = self.evidence
        return out


@dataclass(frozen=True)
class PropertyVerdict:
    prop: Property
    kind: FlipKind | None
    n: int
    counterexample: Counterexample | None = None
    stats: dict = field(default_factory=dict)
    exhaustive: bool = True

    @property
    def holds(self) -> bool:
        return self.counterexample is None

    @property
    def verdict(self) -> str:
        if not self.holds:
            return "CounterexampleFound"
        return "HoldsExhaustively" if self.exhaustive else "HoldsOnSample"

    def to_json(self) -> dict:
        out = {"property": self.prop.value}
        if self.kind is not None:
            out["kind"] = self.kind.label
        out.update({"n": self.n, "verdict": self.verdict})
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample.to_json()
        if self.stats:
            out["stats"] = self.stats
        return out
