import pytest

from flipforest.convex_core import Chord, enumerate_trees, hull_path, star, validate_tree
from flipforest.errors import InvariantViolation
from flipforest.linrep import (
    ConflictPair, CycleDetected, EdgeClass, PairClass, check_gap_bijection, check_short_wide, classify_snw,
    conflict_graph, gap_bijection, pair_class, pair_gapwise, relabel_for_common_hull_gap, shortest_covering,
    topmost_root, uncovered_edges,
)

C = Chord
S, N, W = EdgeClass.SHORT, EdgeClass.NEAR, EdgeClass.WIDE


def test_star_gap_map():
    bij = gap_bijection(star(4, 1))
    assert bij.edge_of_gap == (C(1, 2), C(1, 3), C(1, 4))
    assert [bij.edge_class(g) for g in (1, 2, 3)] == [S, N, N]


def test_star_short_near_wide():
    snw = classify_snw(star(4, 1))
    assert snw.short == (C(1, 2),) and snw.near == (C(1, 3), C(1, 4)) and snw.wide == ()
    assert snw.uncovered == 1


def test_wide_edge():
    t = validate_tree([(1, 2), (1, 4), (3, 4)], 4)
    bij = gap_bijection(t)
    assert bij.edge(2) == C(1, 4) and bij.edge_class(2) is W
    assert uncovered_edges(t.edges) == [C(1, 4)]
    assert classify_snw(t).wide == (C(1, 4),)


@pytest.mark.parametrize("n", [3, 4, 5, 6, 7])
def test_gap_map_is_a_bijection(n):
    for t in enumerate_trees(n):
        bij = gap_bijection(t)
        assert set(bij.edge_of_gap) == set(t.edges)
        assert bij.gap_of_edge[bij.edge(1)] == 1


def test_checks_hold():
    for n in (4, 5, 6):
        assert check_gap_bijection(n).verdict == "HoldsExhaustively"
        assert check_short_wide(n).verdict == "HoldsExhaustively"


def test_shortest_covering_ties_are_errors():
    assert shortest_covering([C(1, 4), C(2, 3)], 2) == C(2, 3)
    assert shortest_covering([C(3, 4)], 1) is None
    with pytest.raises(InvariantViolation):
        shortest_covering([C(1, 3), C(2, 4)], 2)


def test_path_to_star_pairing():
    pairing = pair_gapwise(hull_path(4), star(4, 1))
    kinds = [p.kind for p in pairing.pairs]
    assert kinds == [PairClass.EQ, PairClass.REST, PairClass.REST]
    assert (pairing.pairs[1].e, pairing.pairs[1].e2) == (C(2, 3), C(1, 3))
    assert (pairing.pairs[2].e, pairing.pairs[2].e2) == (C(3, 4), C(1, 4))
    assert pairing.pairs[1].shorts == 1
    assert pairing.to_tsv().splitlines()[0].startswith("gap\t")


def test_pair_classes():
    assert pair_class(2, C(2, 4), C(1, 3)) is PairClass.CROSSING
    assert pair_class(2, C(2, 5), C(2, 4)) is PairClass.ABOVE
    assert pair_class(2, C(2, 4), C(2, 5)) is PairClass.BELOW
    assert pair_class(2, C(2, 3), C(1, 3)) is PairClass.REST


def test_common_hull_gap():
    a = validate_tree([(1, 2), (2, 3), (2, 4)], 4)
    b = validate_tree([(1, 2), (2, 3), (1, 4)], 4)
    shift = relabel_for_common_hull_gap(a, b)
    assert shift is not None and shift.to_local(C(3, 4)) == C(1, 4)
    assert relabel_for_common_hull_gap(hull_path(4), validate_tree([(1, 2), (2, 3), (1, 4)], 4)) is None
    assert relabel_for_common_hull_gap(hull_path(5), star(5, 2)).vertices == tuple(range(1, 6))


def test_nested_crossing_pairs_order():
    p1 = ConflictPair(3, C(2, 5), C(3, 6))
    p2 = ConflictPair(3, C(3, 4), C(1, 4))
    graph = conflict_graph([p2, p1], "crossing")
    assert graph.arcs == ((1, 0),)
    assert graph.order == (1, 0)
    assert graph.successors(1) == [0]


def test_cycle_detected():
    p = ConflictPair(2, C(1, 3), C(3, 6))
    q = ConflictPair(4, C(2, 5), C(2, 4))
    with pytest.raises(CycleDetected):
        conflict_graph([p, q], "crossing")
    with pytest.raises(ValueError):
        conflict_graph([p], "other")


@pytest.mark.parametrize("n", [4, 5, 6])
def test_crossing_pairs_are_acyclic(n):
    trees = [t for t in enumerate_trees(n) if C(1, n) not in t]
    for a in trees:
        for b in trees:
            cs = [ConflictPair(p.gap, p.e, p.e2) for p in pair_gapwise(a, b).of(PairClass.CROSSING)]
            conflict_graph(cs, "crossing")
            if cs:
                assert topmost_root(cs) in cs
