"""Acceptance suite: one group of tests per criterion, summarized at the end of the run.

The exhaustive sweeps take a while (about 40 minutes in total on one core,
dominated by the rotation sweep at n = 7).
"""

from fractions import Fraction

import numpy as np
import pytest

import brute
from flipforest import compat_bound, oracle, rot_bound
from flipforest.convex_core import Tree, enumerate_trees, tree_codes, tree_count
from flipforest.flip_ops import MAIN_KINDS, FlipKind, FlipSequence, apply
from flipforest.fpt import contract, fpt_distance_compatible, fpt_distance_unrestricted
from flipforest.happy import (
    check_parking, check_perfect_flip_property, load_fixture, normalize_parking, parking_edges,
    parking_sample, perfect_flips, replay, strong_happy_by_counting, strong_happy_by_enumeration,
    verify_strong_happy,
)
from flipforest.linrep import check_gap_bijection, check_short_wide, gap_bijection
from flipforest.symmetry import orbit_pairs, orbit_representatives, random_pairs

U, C, R = FlipKind.UNRESTRICTED, FlipKind.COMPATIBLE, FlipKind.ROTATION


def crit(number, title):
    return pytest.mark.criterion(number, title)


def edge_set(tree: Tree) -> frozenset:
    return frozenset(tuple(e) for e in tree.edges)


# ---------------------------------------------------------------- 1


@crit(1, "tree counts 3/12/55/273 match a subset-filter brute force")
@pytest.mark.parametrize("n,count", [(3, 3), (4, 12), (5, 55), (6, 273)])
def test_enumeration_counts(n, count):
    ours = {edge_set(t) for t in enumerate_trees(n)}
    assert tree_count(n) == count
    assert len(ours) == count
    assert ours == set(brute.all_trees(n))


# ---------------------------------------------------------------- 2


@crit(2, "radius n-2 for n=4..7 under unrestricted, compatible, rotation")
@pytest.mark.parametrize("kind", MAIN_KINDS, ids=lambda k: k.label)
@pytest.mark.parametrize("n", [4, 5, 6, 7])
def test_radius(n, kind):
    _, radius, _ = oracle.diameter_radius(n, kind)
    assert radius == n - 2
    # second route: hand-written BFS from a central tree
    dm = oracle.distance_matrix(n, kind)
    center = int(np.argmin(dm.max(axis=1)))
    dist = oracle.bfs_distances(oracle.build_flip_graph(n, kind), center)
    assert min(dist) >= 0 and max(dist) == n - 2


# ---------------------------------------------------------------- 3


@crit(3, "diameters in [n-2, 2n-4] for n=4..8, unrestricted >= floor(3n/2)-5")
@pytest.mark.parametrize("n", [4, 5, 6, 7, 8])
def test_diameter_sandwich(n):
    for kind in MAIN_KINDS:
        diam, _, (s, t) = oracle.diameter_radius(n, kind)
        assert n - 2 <= diam <= 2 * n - 4, (kind.label, diam)
        if kind == U:
            assert diam >= (3 * n) // 2 - 5
        # the diametral pair, re-measured by the single-pair search
        assert oracle.distance(s, t, kind).distance == diam


# ---------------------------------------------------------------- 4


def _assert_holds(verdict, covered=None):
    assert verdict.holds, verdict.to_json()
    if covered is not None:
        assert verdict.stats["pairsCovered"] == covered


@crit(4, "compatible sequences within 5/3 d + 2/3 b + c - 1/3")
@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_compatible_bound_every_ordered_pair(n):
    # no symmetry reduction here
    trees = [Tree(n, c) for c in tree_codes(n)]
    for a in trees:
        for b in trees:
            seq = compat_bound.compatible_sequence(a, b, canonical=False)
            assert seq.start == a and apply(seq) == b
            assert all(s.kind <= C for s in seq.steps)
            assert Fraction(len(seq)) <= compat_bound.length_bound(a, b)


@crit(4, "compatible sequences within 5/3 d + 2/3 b + c - 1/3")
@pytest.mark.parametrize("n", [3, 4, 5, 6, 7])
def test_compatible_bound_orbits(n):
    _assert_holds(compat_bound.check_bound(n, orbit_pairs(n, "dihedral", True)), tree_count(n) ** 2)


@crit(4, "compatible sequences within 5/3 d + 2/3 b + c - 1/3")
@pytest.mark.parametrize("n", [10, 15, 20])
def test_compatible_bound_random(n):
    _assert_holds(compat_bound.check_bound(n, random_pairs(n, 10_000, 1000 + n), exhaustive=False), 10_000)


# ---------------------------------------------------------------- 5


@crit(5, "rotation sequences within 2(n-1) - max(|L|,|R|,|J|,|D|)")
@pytest.mark.parametrize("n", [3, 4, 5, 6, 7])
def test_rotation_bound_exhaustive(n):
    # one pair per {a, b}: rotation_sequence builds (a, b) and (b, a) from the same run
    _assert_holds(rot_bound.check_bound(n, orbit_pairs(n, "identity", True)), tree_count(n) ** 2)


@crit(5, "rotation sequences within 2(n-1) - max(|L|,|R|,|J|,|D|)")
@pytest.mark.parametrize("n", [4, 5])
def test_rotation_bound_both_orders(n):
    trees = [Tree(n, c) for c in tree_codes(n)]
    for a in trees:
        for b in trees:
            res = rot_bound.rotation_sequence(a, b)
            assert apply(res.sequence) == b and len(res.sequence) <= res.bound
            assert all(s.kind == R for s in res.sequence.steps)
            for s in res.sequence.steps:
                assert set(s.removed) & set(s.added)


@crit(5, "rotation sequences within 2(n-1) - max(|L|,|R|,|J|,|D|)")
@pytest.mark.parametrize("n", [10, 15, 20])
def test_rotation_bound_random(n):
    _assert_holds(rot_bound.check_bound(n, random_pairs(n, 10_000, 2000 + n), exhaustive=False), 10_000)


# ---------------------------------------------------------------- 6


@crit(6, "no compatible geodesic removes a shared edge, n <= 6")
@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_strong_happy_compatible(n):
    verdict = verify_strong_happy(n, C)
    assert verdict.holds, verdict.to_json()
    bad_count, total = strong_happy_by_counting(n, C)
    bad_walk, walked = strong_happy_by_enumeration(n, C, cap=10**6)
    assert bad_count == 0 and bad_walk == 0
    assert total == walked


# ---------------------------------------------------------------- 7


@crit(7, "rotation happy-edge counterexample: ascending search and fixture")
def test_rotation_happy_search():
    hit = oracle.find_happy_violation(7, R)
    assert hit is not None
    a, b = hit
    n = a.n
    assert oracle.find_happy_violation(n - 1, R) is None  # minimal
    shared = edge_set(a) & edge_set(b)
    d = brute.distance(n, edge_set(a), edge_set(b), "rotation")
    kept = brute.preserving_distance(n, edge_set(a), edge_set(b), "rotation", shared)
    assert kept is None or kept > d


@crit(7, "rotation happy-edge counterexample: ascending search and fixture")
def test_rotation_happy_fixture():
    fx = load_fixture("rotation_happy_trap")
    a, b = edge_set(fx["in"]), edge_set(fx["tar"])
    assert brute.distance(6, a, b, "rotation") == 3
    assert brute.preserving_distance(6, a, b, "rotation", a & b) == 4


# ---------------------------------------------------------------- 8


@crit(8, "perfect flips can lead away from every geodesic")
def test_perfect_flip_fixture():
    fx = load_fixture("perfect_flip_trap")
    line: FlipSequence = fx["line"]
    t_in, t_tar = fx["in"], fx["tar"]
    assert line.start == t_in
    for step in line.steps:
        assert step.removed not in t_tar and step.added in t_tar
    stuck = apply(line)
    assert perfect_flips(stuck, t_tar, C) == []
    a, b, s = edge_set(t_in), edge_set(t_tar), edge_set(stuck)
    # brute-force: no compatible flip from the stuck tree is perfect either
    assert not [x for x in brute.neighbours(6, s, "compatible") if len(x & b) > len(s & b)]
    best_u, best_c = brute.distance(6, a, b, "unrestricted"), brute.distance(6, a, b, "compatible")
    left_u, left_c = brute.distance(6, s, b, "unrestricted"), brute.distance(6, s, b, "compatible")
    assert (best_u, best_c, left_u, left_c) == (4, 4, 3, 4)
    assert len(line) + left_u > best_u and len(line) + left_c > best_c


@crit(8, "perfect flips can lead away from every geodesic")
@pytest.mark.parametrize("kind", [U, C], ids=lambda k: k.label)
def test_perfect_flip_search(kind):
    for n in range(3, 8):
        verdict = check_perfect_flip_property(n, kind)
        if not verdict.holds:
            break
    assert not verdict.holds
    assert replay(verdict)
    ce = verdict.counterexample
    step = ce.evidence["flip"]
    a, b = edge_set(ce.t_in), edge_set(ce.t_tar)
    after = (a - {tuple(step["remove"])}) | {tuple(step["add"])}
    label = kind.label
    assert brute.distance(n, after, b, label) >= brute.distance(n, a, b, label)


# ---------------------------------------------------------------- 9


@crit(9, "parking normalization on 1000 random compatible sequences, n <= 8")
def test_parking_normalization():
    verdict = check_parking(8, 1000, seed=7)
    assert verdict.holds, verdict.to_json()
    # the same sample, re-checked here line by line
    for seq, geodesic in parking_sample(8, 1000, seed=7):
        n = seq.start.n
        out = normalize_parking(seq)
        assert out.start == seq.start and apply(out) == apply(seq)
        assert all(s.kind <= C for s in out.steps)
        ends = edge_set(out.start) | edge_set(apply(out))
        parked = {tuple(e) for t in out.trees() for e in t.edges} - ends
        assert parked == {tuple(e) for e in parking_edges(out)}
        assert all(b - a == 1 or (a, b) == (1, n) for a, b in parked)
        if geodesic:
            assert len(out) == len(seq)
        else:
            assert len(out) <= len(seq)
            if len(out) < len(seq):
                assert len(seq) > oracle.distance(seq.start, apply(seq), C).distance


# ---------------------------------------------------------------- 10


def _fpt_sweep(n, pairs, kind):
    dm = oracle.distance_matrix(n, kind)
    index = {c: i for i, c in enumerate(tree_codes(n))}
    solver = fpt_distance_unrestricted if kind == U else fpt_distance_compatible
    reduced_dm = {}
    for a, b in pairs:
        d = int(dm[index[a.code], index[b.code]])
        red = contract(a, b)
        if red.m not in reduced_dm:
            reduced_dm[red.m] = (oracle.distance_matrix(red.m, kind), {c: i for i, c in enumerate(tree_codes(red.m))})
        rdm, ridx = reduced_dm[red.m]
        assert int(rdm[ridx[red.t_in.code], ridx[red.t_tar.code]]) == d, ("contraction", a, b)
        yes = solver(a, b, d)
        assert yes.found and len(yes.sequence) <= d and apply(yes.sequence) == b, (a, b, d)
        if d > 0:
            assert not solver(a, b, d - 1).found, (a, b, d)


@crit(10, "FPT answers at k=d and k=d-1 agree with the oracle; contraction keeps distances")
@pytest.mark.parametrize("kind", [U, C], ids=lambda k: k.label)
@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_fpt_every_pair(n, kind):
    trees = [Tree(n, c) for c in tree_codes(n)]
    _fpt_sweep(n, ((a, b) for a in trees for b in trees), kind)


@crit(10, "FPT answers at k=d and k=d-1 agree with the oracle; contraction keeps distances")
@pytest.mark.parametrize("kind", [U, C], ids=lambda k: k.label)
def test_fpt_n7_orbits(kind):
    n = 7
    _, _, sizes = orbit_representatives(n, "dihedral", False)
    assert int(sizes.sum()) == tree_count(n) ** 2
    _fpt_sweep(n, ((a, b) for a, b, _ in orbit_pairs(n, "dihedral", False)), kind)


# ---------------------------------------------------------------- 11


def _uncovered(edges):
    return [e for e in edges if not any(f != e and f[0] <= e[0] and e[1] <= f[1] for f in edges)]


@crit(11, "gap and rooted vertex bijections, short/wide counts on every tree, n <= 7")
@pytest.mark.parametrize("n", [3, 4, 5, 6, 7])
def test_gap_bijection_and_counts(n):
    assert check_gap_bijection(n).holds
    assert check_short_wide(n).holds
    for tree in enumerate_trees(n):
        edges = [tuple(e) for e in tree.edges]
        # recomputed from scratch: shortest edge over each gap
        image = []
        for gap in range(1, n):
            over = [e for e in edges if e[0] <= gap and gap + 1 <= e[1]]
            image.append(min(over, key=lambda e: e[1] - e[0]))
        assert sorted(image) == sorted(edges)
        assert [tuple(e) for e in gap_bijection(tree).edge_of_gap] == image
        shared = [len(set(e) & {g, g + 1}) for g, e in enumerate(image, start=1)]
        s, w = shared.count(2), shared.count(0)
        k = len(_uncovered(edges))
        assert s >= k and w <= s - k


@crit(11, "gap and rooted vertex bijections, short/wide counts on every tree, n <= 7")
@pytest.mark.parametrize("n", [4, 5, 6])
def test_gap_map_fails_off_trees(n):
    # non-crossing edge sets of size n-1 that are not trees never give a bijection
    from itertools import combinations
    for subset in combinations(brute.chords(n), n - 1):
        if brute.is_plane_tree(n, subset) or any(brute.cross(e, f) for e, f in combinations(subset, 2)):
            continue
        image = set()
        for gap in range(1, n):
            over = [e for e in subset if e[0] <= gap and gap + 1 <= e[1]]
            if over:
                image.add(min(over, key=lambda e: e[1] - e[0]))
        assert len(image) < n - 1 or image != set(subset)



@crit(11, "gap and rooted vertex bijections, short/wide counts on every tree, n <= 7")
@pytest.mark.parametrize("n", [3, 4, 5, 6, 7])
def test_rooted_vertex_edge_bijection(n):
    for tree in enumerate_trees(n):
        for root in range(1, n + 1):
            image = rot_bound.rho(tree, root)
            assert sorted(image) == [v for v in range(1, n + 1) if v != root]
            assert sorted(image.values()) == sorted(tree.edges)
            # each vertex gets the edge towards the root: parent pointers reach the root
            for v in image:
                seen = 0
                while v != root:
                    e = image[v]
                    assert v in e
                    v = e[0] if e[1] == v else e[1]
                    seen += 1
                    assert seen < n
