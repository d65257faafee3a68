"""Command line front end.  Every command writes JSON lines (``export`` writes DOT).

Exit status: 0 success, 1 invalid input, 2 a budget was exceeded,
3 an internal guarantee failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Iterator, TextIO

from . import compat_bound, happy, linrep, oracle, rot_bound
from .convex_core import Tree, TreeError, tree_codes, tree_count
from .errors import BudgetExceeded, InvariantViolation
from .flip_ops import MAIN_KINDS, FlipKind
from .fpt import DEFAULT_NODE_CAP, fpt_distance, fpt_distance_compatible, fpt_distance_unrestricted
from .symmetry import orbit_representatives, random_pairs
from .verdicts import PropertyVerdict

EXIT_INPUT, EXIT_BUDGET, EXIT_INVARIANT = 1, 2, 3


def _emit(out: TextIO, obj) -> None:
    out.write(json.dumps(obj, sort_keys=True) + "\n")
    out.flush()


def _read_tree(path: str) -> Tree:
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict) or "n" not in data or "edges" not in data:
        raise ValueError(f"{path}: expected an object with 'n' and 'edges'")
    return Tree.from_json(data)


def _pair(args) -> tuple[Tree, Tree]:
    a, b = _read_tree(args.a), _read_tree(args.b)
    if a.n != b.n:
        raise ValueError(f"trees have {a.n} and {b.n} points")
    return a, b


# ---------------------------------------------------------------- commands


def cmd_enumerate(args, out: TextIO) -> int:
    codes = tree_codes(args.n)
    _emit(out, tree_count(args.n))
    if args.trees:
        for c in codes:
            _emit(out, Tree(args.n, c).to_json())
    return 0


def cmd_distance(args, out: TextIO) -> int:
    a, b = _pair(args)
    rep = oracle.distance(a, b, args.kind, node_budget=args.node_budget, count_geodesics=args.count_geodesics)
    _emit(out, {"kind": args.kind.label, **rep.to_json()})
    return 0


def cmd_sequence(args, out: TextIO) -> int:
    a, b = _pair(args)
    truth = oracle.distance(a, b, args.kind).distance if args.oracle else None
    if args.kind == FlipKind.COMPATIBLE:
        if args.strategy:
            raise ValueError("--strategy only applies to rotation sequences")
        seq = compat_bound.compatible_sequence(a, b)
        report = compat_bound.bound_report(a, b, seq, truth)
    elif args.kind == FlipKind.ROTATION:
        res = rot_bound.rotation_sequence(a, b, args.strategy)
        seq = res.sequence
        report = res.report()
        if truth is not None:
            report["oracle"] = truth
    else:
        raise ValueError("sequence needs --kind compatible or rotation")
    _emit(out, {"sequence": seq.to_json(), "report": report})
    return 0


def cmd_diameter(args, out: TextIO) -> int:
    for kind in args.kind or MAIN_KINDS:
        diam, radius, (s, t) = oracle.diameter_radius(args.n, kind)
        _emit(out, {"n": args.n, "kind": kind.label, "diameter": diam, "radius": radius,
                    "pair": [s.to_json(), t.to_json()]})
    return 0


def cmd_fpt(args, out: TextIO) -> int:
    a, b = _pair(args)
    if args.kind not in (FlipKind.UNRESTRICTED, FlipKind.COMPATIBLE):
        raise ValueError("fpt supports --kind unrestricted or compatible")
    if args.k is None:
        options = {"node_cap": args.node_cap}
        if args.kind == FlipKind.COMPATIBLE:
            options["epsilon"] = args.epsilon
        elif args.conjecture_mode:
            options["conjecture_mode"] = True
        res = fpt_distance(a, b, args.kind, **options)
    elif args.kind == FlipKind.UNRESTRICTED:
        res = fpt_distance_unrestricted(a, b, args.k, args.node_cap, args.conjecture_mode)
    else:
        res = fpt_distance_compatible(a, b, args.k, args.epsilon, args.node_cap)
    _emit(out, {"kind": args.kind.label, "k": args.k, **res.to_json()})
    return 0


def cmd_export(args, out: TextIO) -> int:
    graph = oracle.build_flip_graph(args.n, args.kind, args.node_budget)
    for line in oracle.to_dot(graph):
        out.write(line)
    return 0


# ---------------------------------------------------------------- verify

# properties whose failure means a bug rather than an expected counterexample
def _guaranteed(prop: str, kind: FlipKind | None) -> bool:
    if prop == "strong-happy":
        return kind == FlipKind.COMPATIBLE
    return prop in ("parking", "lemma7", "bijection", "bounds")


def _bound_chunk(job: tuple[str, int, list[tuple[int, int, int]], bool]) -> PropertyVerdict:
    kind, n, items, exhaustive = job
    check = compat_bound.check_bound if kind == "compatible" else rot_bound.check_bound
    return check(n, ((Tree(n, a), Tree(n, b), w) for a, b, w in items), exhaustive)


def _merge(parts: list[PropertyVerdict]) -> PropertyVerdict:
    for p in parts:
        if not p.holds:
            return p
    stats: dict = {}
    for p in parts:
        for key, val in p.stats.items():
            if isinstance(val, dict):
                inner = stats.setdefault(key, {})
                for k2, v2 in val.items():
                    inner[k2] = inner.get(k2, 0) + v2
            else:
                stats[key] = stats.get(key, 0) + val
    first = parts[0]
    return PropertyVerdict(first.prop, first.kind, first.n, None, stats, first.exhaustive)


def _map(fn: Callable, jobs: list, workers: int) -> list:
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))  # map keeps submission order


def _bound_verdicts(args) -> Iterator[PropertyVerdict]:
    if args.kind not in (FlipKind.COMPATIBLE, FlipKind.ROTATION):
        raise ValueError("verify bounds needs --kind compatible or rotation")
    label = args.kind.label
    for n in range(args.n_min, args.n_max + 1):
        if args.samples:
            items = [(a.code, b.code, w) for a, b, w in random_pairs(n, args.samples, args.seed + n)]
            exhaustive = False
        else:
            codes = tree_codes(n)
            # the compatible bound is invariant under dihedral maps and swapping; rotation only under swapping
            group = "dihedral" if args.kind == FlipKind.COMPATIBLE else "identity"
            first, second, sizes = orbit_representatives(n, group, True)
            items = [(codes[i], codes[j], w) for i, j, w in zip(first.tolist(), second.tolist(), sizes.tolist())]
            exhaustive = True
        parts = max(1, args.workers) * 4
        size = -(-len(items) // parts) or 1
        jobs = [(label, n, items[i:i + size], exhaustive) for i in range(0, len(items), size)]
        yield _merge(_map(_bound_chunk, jobs, args.workers))


def _verdicts(args) -> Iterable[PropertyVerdict]:
    prop = args.property
    ns = range(args.n_min, args.n_max + 1)
    if prop == "strong-happy":
        return (happy.verify_strong_happy(n, args.kind) for n in ns)
    if prop == "weak-happy":
        return (happy.verify_weak_happy(n, args.kind) for n in ns)
    if prop == "perfect-flip":
        return (happy.check_perfect_flip_property(n, args.kind) for n in ns)
    if prop == "parking":
        return [happy.check_parking(args.n_max, args.samples or 1000, args.seed)]
    if prop == "lemma7":
        return (linrep.check_short_wide(n) for n in ns)
    if prop == "bijection":
        return (linrep.check_gap_bijection(n) for n in ns)
    return _bound_verdicts(args)


def cmd_verify(args, out: TextIO) -> int:
    if args.kind is None:
        args.kind = FlipKind.COMPATIBLE
    status = 0
    for v in _verdicts(args):
        _emit(out, v.to_json())
        if not v.holds and _guaranteed(args.property, v.kind):
            status = EXIT_INVARIANT
    return status


# ---------------------------------------------------------------- parser


def _kind(text: str) -> FlipKind:
    try:
        return FlipKind.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


class _Parser(argparse.ArgumentParser):
    # usage errors are invalid input; exit 2 is reserved for budgets
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="flipforest", description="Flip distances between plane spanning trees in convex position.")
    p.add_argument("--output", "-o", help="write to this file instead of stdout")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("enumerate", help="count (and optionally list) the trees on n points")
    s.add_argument("n", type=int)
    s.add_argument("--trees", action="store_true", help="also stream every tree")
    s.set_defaults(func=cmd_enumerate)

    def pair_args(s):
        s.add_argument("a", help="initial tree (JSON file)")
        s.add_argument("b", help="target tree (JSON file)")

    s = sub.add_parser("distance", help="exact flip distance with a witness")
    pair_args(s)
    s.add_argument("--kind", type=_kind, default=FlipKind.UNRESTRICTED)
    s.add_argument("--count-geodesics", action="store_true")
    s.add_argument("--node-budget", type=int, default=oracle.DEFAULT_NODE_BUDGET)
    s.set_defaults(func=cmd_distance)

    s = sub.add_parser("sequence", help="constructive compatible or rotation sequence with its bound")
    pair_args(s)
    s.add_argument("--kind", type=_kind, default=FlipKind.COMPATIBLE)
    s.add_argument("--strategy", choices=["L", "R", "J", "D"], help="force a rotation strategy")
    s.add_argument("--oracle", action="store_true", help="also report the exact distance")
    s.set_defaults(func=cmd_sequence)

    s = sub.add_parser("diameter", help="diameter and radius of the flip graph")
    s.add_argument("n", type=int)
    s.add_argument("--kind", type=_kind, action="append", help="repeatable; default: unrestricted, compatible, rotation")
    s.set_defaults(func=cmd_diameter)

    s = sub.add_parser("verify", help="exhaustive or sampled property checks")
    s.add_argument("property", choices=["strong-happy", "weak-happy", "perfect-flip", "parking", "lemma7",
                                        "bijection", "bounds"])
    s.add_argument("--kind", type=_kind, default=None, help="default: compatible")
    s.add_argument("--n-min", type=int, default=3)
    s.add_argument("--n-max", type=int, required=True)
    s.add_argument("--samples", type=int, default=0, help="random pairs per n (bounds) or sequences (parking)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("fpt", help="parameterized flip distance search")
    pair_args(s)
    s.add_argument("--k", type=int, help="decide distance <= k; without it, find the smallest accepted k")
    s.add_argument("--kind", type=_kind, default=FlipKind.UNRESTRICTED)
    s.add_argument("--epsilon", type=float, default=0.5)
    s.add_argument("--conjecture-mode", action="store_true", help="freeze every shared edge (unrestricted only)")
    s.add_argument("--node-cap", type=int, default=DEFAULT_NODE_CAP)
    s.set_defaults(func=cmd_fpt)

    s = sub.add_parser("export", help="write the flip graph")
    s.add_argument("n", type=int)
    s.add_argument("--kind", type=_kind, default=FlipKind.UNRESTRICTED)
    s.add_argument("--dot", action="store_true", default=True, help="DOT format (the only one)")
    s.add_argument("--node-budget", type=int, default=oracle.DEFAULT_NODE_BUDGET)
    s.set_defaults(func=cmd_export)
    return p


def _fail(code: int, exc: BaseException) -> int:
    sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
    return code


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    out = open(args.output, "w") if args.output else sys.stdout
    try:
        return args.func(args, out)
    except InvariantViolation as exc:
        return _fail(EXIT_INVARIANT, exc)
    except BudgetExceeded as exc:
        return _fail(EXIT_BUDGET, exc)
    except (TreeError, ValueError, KeyError, OSError) as exc:
        return _fail(EXIT_INPUT, exc)
    finally:
        if out is not sys.stdout:
            out.close()


if __name__ == "__main__":
    sys.exit(main())
