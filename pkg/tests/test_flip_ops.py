import random

import pytest

import brute
from flipforest.convex_core import Chord, Tree, enumerate_trees, hull_path, star, validate_tree
from flipforest.flip_ops import (
    AlreadyInTree, FlipKind, FlipSequence, FlipStep, InvalidStep, NotATreeAfterFlip, NotInTree, apply,
    classify_flip, flip, legal_flips, moves, random_walk, removed_edges,
)

K = FlipKind


def test_kind_order_and_parse():
    assert K.SLIDE < K.ROTATION < K.COMPATIBLE < K.UNRESTRICTED
    assert K.parse(" Rotation ") is K.ROTATION
    with pytest.raises(ValueError):
        K.parse("diagonal")


@pytest.mark.parametrize("n", [4, 5, 6])
@pytest.mark.parametrize("kind", list(K), ids=lambda k: k.label)
def test_moves_match_brute_neighbours(n, kind):
    for t in enumerate_trees(n):
        mine = sorted(sorted(Tree(n, code).edges) for _, _, code, _ in moves(n, t.code, kind))
        ref = sorted(sorted(s) for s in brute.neighbours(n, frozenset(tuple(e) for e in t.edges), kind.label))
        assert mine == ref


@pytest.mark.parametrize("n", [5, 6])
def test_classify_matches_brute(n):
    for t in enumerate_trees(n):
        tset = frozenset(tuple(e) for e in t.edges)
        for s in legal_flips(t, K.UNRESTRICTED):
            assert classify_flip(t, s.removed, s.added).label == brute.flip_kind(tset, tuple(s.removed), tuple(s.added))


def test_classify_rejections():
    t = hull_path(5)
    with pytest.raises(NotInTree):
        classify_flip(t, (1, 3), (1, 4))
    with pytest.raises(AlreadyInTree):
        classify_flip(t, (1, 2), (2, 3))
    with pytest.raises(NotATreeAfterFlip):
        classify_flip(t, (1, 2), (3, 5))  # leaves vertex 1 isolated


def test_crossing_flip_on_four_points():
    t = validate_tree([(1, 2), (2, 4), (3, 4)], 4)
    assert classify_flip(t, (2, 4), (1, 3)) == K.UNRESTRICTED
    assert flip(t, (2, 4), (1, 3)) == validate_tree([(1, 2), (1, 3), (3, 4)], 4)


def test_slide_needs_the_third_side():
    t = star(5, 1)
    # (1,3) turns about 3 onto (3,4); the third side (1,4) is in the tree
    assert classify_flip(t, (1, 3), (3, 4)) == K.SLIDE
    t2 = validate_tree([(1, 2), (2, 3), (3, 4), (4, 5)], 5)
    assert classify_flip(t2, (4, 5), (1, 5)) == K.ROTATION


def test_step_normalizes_and_rejects_noop():
    s = FlipStep((4, 2), (3, 1))
    assert s.removed == Chord(2, 4) and s.added == Chord(1, 3)
    with pytest.raises(ValueError):
        FlipStep((1, 2), (2, 1))


def test_apply_reports_step_index_and_reason():
    t = hull_path(4)
    bad = FlipSequence(t, (FlipStep((3, 4), (1, 4), K.ROTATION), FlipStep((1, 4), (1, 3), K.ROTATION)))
    with pytest.raises(InvalidStep) as err:
        apply(bad)
    assert err.value.index == 2 and err.value.reason == "NotATreeAfterFlip"
    declared = FlipSequence(validate_tree([(1, 2), (2, 4), (3, 4)], 4), (FlipStep((2, 4), (1, 3), K.COMPATIBLE),))
    with pytest.raises(InvalidStep) as err:
        apply(declared)
    assert err.value.reason == "KindViolation"


def test_sequence_reverse_concat_json():
    rng = random.Random(4)
    t = hull_path(7)
    seq = random_walk(t, 6, K.COMPATIBLE, rng)
    end = apply(seq)
    back = seq.reversed()
    assert back.start == end and apply(back) == t
    assert apply(seq.then(back)) == t and len(seq.then(back)) == 12
    assert FlipSequence.from_json(seq.to_json()) == seq
    assert seq.trees()[-1] == end == seq.end
    assert removed_edges(seq) == {s.removed for s in seq.steps}


@pytest.mark.parametrize("kind", [K.SLIDE, K.ROTATION, K.COMPATIBLE, K.UNRESTRICTED], ids=lambda k: k.label)
def test_random_walks_respect_kind(kind):
    rng = random.Random(kind.value)
    for _ in range(50):
        n = rng.randint(4, 12)
        seq = random_walk(hull_path(n), rng.randint(0, 10), kind, rng)
        apply(seq)
        assert all(s.kind == kind for s in seq.steps)


def test_moves_sorted_and_within_kind():
    t = star(7, 4)
    out = moves(7, t.code, K.COMPATIBLE)
    assert out == sorted(out)
    assert all(f <= K.COMPATIBLE for *_, f in out)
