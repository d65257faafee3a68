import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import brute
from flipforest.convex_core import (
    Chord, CrossingPair, Disconnected, LabelError, SubPolygon, Tree, WrongEdgeCount, chord, crosses,
    cyclic_shift, enumerate_trees, faces, geometry, hull_path, is_hull_edge, random_tree, star, tree_codes,
    tree_count, tree_from_mask, validate_tree,
)


def test_chord_is_ordered():
    assert chord(5, 2) == Chord(2, 5)
    with pytest.raises(ValueError):
        chord(3, 3)


@pytest.mark.parametrize("n", [4, 5, 6, 7])
def test_crossing_matches_brute(n):
    cs = brute.chords(n)
    for e in cs:
        for f in cs:
            assert crosses(Chord(*e), Chord(*f)) == brute.cross(e, f)


def test_hull_edges():
    assert is_hull_edge(Chord(1, 6), 6) and is_hull_edge(Chord(3, 4), 6)
    assert not is_hull_edge(Chord(2, 4), 6)
    with pytest.raises(LabelError):
        is_hull_edge(Chord(1, 7), 6)


def test_validate_reports_edge_count_first():
    with pytest.raises(WrongEdgeCount) as err:
        validate_tree([(1, 3), (2, 4)], 4)  # crossing too, but too few edges
    assert err.value.count == 2


def test_validate_reports_first_crossing():
    with pytest.raises(CrossingPair) as err:
        validate_tree([(2, 5), (1, 3), (3, 6), (1, 4), (4, 6)], 6)
    assert (err.value.e, err.value.f) == (Chord(1, 3), Chord(2, 5))


def test_validate_reports_component_of_vertex_one():
    with pytest.raises(Disconnected) as err:
        validate_tree([(1, 2), (2, 3), (1, 3), (4, 5)], 5)
    assert err.value.witness == (1, 2, 3)


def test_validate_rejects_bad_labels_and_duplicates():
    with pytest.raises(LabelError):
        validate_tree([(0, 1), (1, 2)], 3)
    with pytest.raises(WrongEdgeCount):
        validate_tree([(1, 2), (2, 1), (2, 3)], 4)  # duplicate collapses


def test_validate_accepts_any_orientation_and_lists():
    t = validate_tree([[2, 1], (3, 2), (4, 3)], 4)
    assert t == hull_path(4)


@pytest.mark.parametrize("n", [3, 4, 5, 6, 7])
def test_enumeration_matches_brute(n):
    ours = {frozenset(tuple(e) for e in t.edges) for t in enumerate_trees(n)}
    assert ours == set(brute.all_trees(n))
    assert tree_count(n) == len(ours)


def test_counts_follow_known_sequence():
    # number of non-crossing spanning trees on n points in convex position
    assert [tree_count(n) for n in range(3, 11)] == [3, 12, 55, 273, 1428, 7752, 43263, 246675]


def test_codes_are_sorted_and_valid():
    codes = tree_codes(6)
    assert list(codes) == sorted(codes)
    g = geometry(6)
    assert all(g.is_tree(c) for c in codes)


def test_tree_from_mask_rejects_non_trees():
    g = geometry(5)
    with pytest.raises(ValueError):
        tree_from_mask(5, g.bit[Chord(1, 3)] | g.bit[Chord(2, 4)])


def test_json_round_trip():
    t = star(6, 3)
    assert Tree.from_json(t.to_json()) == t
    assert Chord(3, 5) in t and (5, 3) in t and (1, 2) not in t


def test_random_tree_is_uniform():
    rng = random.Random(11)
    counts = Counter(random_tree(5, rng).code for _ in range(22000))
    assert set(counts) == set(tree_codes(5))
    expected = 22000 / 55
    chi2 = sum((c - expected) ** 2 / expected for c in counts.values())
    assert chi2 < 110  # 54 degrees of freedom; p ~ 1e-5


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=3, max_value=40), st.integers(min_value=0, max_value=2**32))
def test_random_tree_is_valid(n, seed):
    t = random_tree(n, random.Random(seed))
    assert validate_tree(t.edges, n) == t


@pytest.mark.parametrize("n", [4, 5, 6])
def test_faces_tile_the_polygon(n):
    for t in enumerate_trees(n):
        fs = faces(t)
        diagonals = [e for e in t.edges if not is_hull_edge(e, n)]
        assert len(fs) == len(diagonals) + 1
        # each face misses exactly one hull edge, and every missing hull edge belongs to one face
        hull = [Chord(i, i + 1) for i in range(1, n)] + [Chord(1, n)]
        assert sorted(f.gap for f in fs) == sorted(e for e in hull if e not in t)


def test_subpolygon_restrict_and_lift():
    t = validate_tree([(1, 2), (2, 5), (3, 4), (4, 5), (5, 6)], 6)
    piece = SubPolygon(6, (2, 3, 4, 5))
    local = piece.restrict(t)
    assert set(local.edges) == {Chord(1, 4), Chord(2, 3), Chord(3, 4)}
    assert set(piece.lift_edges(local)) == {Chord(2, 5), Chord(3, 4), Chord(4, 5)}


def test_cyclic_shift_moves_gap():
    s = cyclic_shift(6, 3)
    assert s.vertices == (4, 5, 6, 1, 2, 3)
    assert s.to_local(Chord(3, 4)) == Chord(1, 6)
    assert cyclic_shift(5, 5).vertices == (1, 2, 3, 4, 5)
