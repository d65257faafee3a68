import math
import random

import pytest

import brute
from flipforest.convex_core import Chord, enumerate_trees, hull_path, random_tree, star, validate_tree
from flipforest.flip_ops import FlipKind, apply
from flipforest.oracle import distance
from flipforest.rot_bound import (
    NoApplicableRotation, check_bound, classify_pair, delta, rho, rot_pairing, rotation_bound, rotation_sequence,
    star_transform,
)
from flipforest.symmetry import orbit_pairs, random_pairs

C = Chord
K = FlipKind


def test_rho_on_path():
    assert rho(hull_path(4), 4) == {3: C(3, 4), 2: C(2, 3), 1: C(1, 2)}


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_rho_is_a_bijection_at_every_root(n):
    for t in enumerate_trees(n):
        for root in range(1, n + 1):
            image = rho(t, root)
            assert set(image) == set(range(1, n + 1)) - {root}
            assert set(image.values()) == set(t.edges)
            assert all(v in e for v, e in image.items())


def test_classes():
    assert classify_pair(3, 5, 4) == "LA" and classify_pair(3, 4, 5) == "LB"
    assert classify_pair(3, 1, 2) == "RA" and classify_pair(3, 2, 1) == "RB"
    assert classify_pair(3, 1, 5) == "D" and classify_pair(3, 5, 1) == "J"


def test_equal_stars_are_all_left():
    p = rot_pairing(star(6, 6), star(6, 6))
    assert set(p.classes.values()) == {"LA"}
    assert p.counts() == {"L": 5, "R": 0, "D": 0, "J": 0}


def test_path_to_star_at_last_vertex():
    a, b = hull_path(4), star(4, 4)
    p = rot_pairing(a, b)
    assert p.counts()["L"] == 3 and rotation_bound(p) == 3
    res = rotation_sequence(a, b)
    assert len(res.sequence) <= 3
    # two rotations suffice: (1,2)->(1,4), then (2,3)->(2,4)
    assert distance(a, b, K.ROTATION).distance == 2 == brute.distance(4, a, b, "rotation")
    assert res.report()["bound"] == 3


def test_delta_wraps():
    assert delta(6, 3, 5) == C(5, 6) and delta(6, 3, 6) == C(1, 6)
    assert delta(6, 3, 2) == C(1, 2) and delta(6, 3, 1) == C(1, 6)


def test_star_transform_budget_can_be_short():
    t = validate_tree([(1, 7), (2, 6), (2, 7), (3, 4), (3, 6), (4, 5)], 7)
    goal = validate_tree([(1, 2), (1, 7), (3, 4), (3, 7), (4, 5), (5, 6)], 7)
    with pytest.raises(NoApplicableRotation):
        star_transform(t, 6, {1, 2, 4, 5, 6}, {3})
    seq = star_transform(t, 6, {1, 2, 4, 5, 6}, {3}, budget=4)
    assert apply(seq) == goal and len(seq) == 4 == distance(t, goal, K.ROTATION).distance


def test_star_transform_without_kstar():
    rng = random.Random(6)
    for _ in range(20):
        n = rng.randint(4, 8)
        t = random_tree(n, rng)
        j = rng.randint(1, n - 1)
        seq = star_transform(t, j, set(range(1, n)), set())
        end = apply(seq)
        assert {rho(end, n)[k] for k in range(1, n)} == {delta(n, j, k) for k in range(1, n)}
    with pytest.raises(ValueError):
        star_transform(hull_path(5), 2, {1, 2}, {3})


@pytest.mark.parametrize("n", [4, 5])
def test_every_pair_within_bound(n):
    trees = list(enumerate_trees(n))
    for a in trees:
        for b in trees:
            res = rotation_sequence(a, b)
            assert apply(res.sequence) == b
            assert all(s.kind <= K.ROTATION for s in res.sequence.steps)
            assert len(res.sequence) <= res.bound <= math.ceil(7 * (n - 1) / 4)


def test_forced_strategies_are_valid():
    rng = random.Random(12)
    for _ in range(25):
        n = rng.randint(4, 9)
        a, b = random_tree(n, rng), random_tree(n, rng)
        counts = rot_pairing(a, b).counts()
        for strategy in "LRJD":
            res = rotation_sequence(a, b, strategy=strategy)
            assert apply(res.sequence) == b
            assert len(res.sequence) <= 2 * (n - 1) - counts[strategy]


def test_check_bound_on_orbits_and_samples():
    v = check_bound(5, orbit_pairs(5, "identity", swap=True))
    assert v.verdict == "HoldsExhaustively" and v.stats["pairsCovered"] == 55 ** 2
    v = check_bound(12, random_pairs(12, 30, seed=1), exhaustive=False)
    assert v.verdict == "HoldsOnSample"
