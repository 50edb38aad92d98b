"""Command-line entry point: ``egh-lab {gh,check,borsuk,norms,scenario}``.

Exit codes: 0 success (verdicts match), 1 verdict mismatch, 2 input error.
Reports are JSON on stdout (or ``--out``); tables go to ``--csv``.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .metric import DomainError, FiniteMetricSpace, StructureError

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT = 0, 1, 2
DEFAULT_SEED = 0


@dataclass
class RunReport:
    command: list
    input_digests: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)
    wall_time: float = 0.0
    version: str = __version__

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True, default=_default)

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        return cls(**json.loads(text))


def _default(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (set, frozenset, tuple)):
        return sorted(x, key=repr) if isinstance(x, (set, frozenset)) else list(x)
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return repr(x)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("EGH_LAB_THREADS", "1")))
    except ValueError:
        return 1


def _pmap(fn, items):
    n = _threads()
    if n == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _write_atomic(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".egh-")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _emit(report: RunReport, args) -> None:
    text = report.to_json()
    if getattr(args, "out", None):
        _write_atomic(args.out, text + "\n")
    else:
        print(text)


def _write_csv(path: str, header, rows) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".egh-", suffix=".csv")
    with os.fdopen(fd, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    os.replace(tmp, path)


def _digest(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


# ---------------------------------------------------------------------------
# gh


def _load_triple(path: str):
    from .gh import MetricTriple

    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise StructureError(f"{path}: expected a JSON object")
    if "space" in data:
        return MetricTriple.from_dict(data)
    return MetricTriple(FiniteMetricSpace.from_dict(data))


def cmd_gh(args) -> int:
    from .gh import equivariant_gh, pointed_gh

    t0 = time.perf_counter()
    tX, tY = _load_triple(args.files[0]), _load_triple(args.files[1])
    if args.equivariant:
        res = equivariant_gh(tX, tY)
    else:
        res = pointed_gh(tX.space, tY.space)
    out = res.to_dict()
    if res.mode == "bounds":
        out["note"] = "inputs exceed the exact-search limits; value is an upper bound"
    exact_within = res.upper - res.lower <= args.tol
    rep = RunReport(
        sys.argv[1:] if args.argv is None else args.argv,
        {p: _digest(p) for p in args.files},
        {"gh": out},
        {"mode": res.mode, "gap_within_tol": exact_within},
    )
    if args.witness and res.correspondence is not None:
        _write_atomic(args.witness, json.dumps(out.get("witness", {}), indent=2) + "\n")
    rep.wall_time = time.perf_counter() - t0
    _emit(rep, args)
    return EXIT_OK


# ---------------------------------------------------------------------------
# check


def _parse_indices(text, default):
    if not text:
        return list(default)
    out = []
    for part in text.split(","):
        if "-" in part or ".." in part:
            a, b = part.replace("..", "-").split("-")
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(part))
    return out


def _check_map(name, i, delta, nmax, seed):
    from .goodapprox import check_one
    from .scenarios import scenario_map

    r = check_one(scenario_map(name, i), delta, nmax, index=i, seed=seed)
    return r.to_dict()


def _check_hexagon(i, delta, nmax, seed):
    from .goodapprox import check_one, detect_small, localize, maximal_small
    from .groups import SymmetricSubset
    from .scenarios import HEX_BC, hexagon_graph, hexagon_maps

    t = hexagon_graph(i)
    a = hexagon_maps([i])[0]
    loc = localize(a, SymmetricSubset(a.target, frozenset({a.target.identity})))
    ms = maximal_small([loc], delta)[0]
    v = detect_small([(t, [t.group.identity, HEX_BC])], delta, float(i))[0]
    return {
        "order": t.group.order,
        "conditions": check_one(a, delta, nmax, index=i, seed=seed).to_dict(),
        "maximal_small": sorted(list(g) for g in ms.subgroup),
        "small": v.small,
        "maximal": ms.maximal,
        "normal": ms.normal_in_group,
    }


def _check_torus(i, delta, nmax, seed):
    from .gh import equivariant_gh
    from .goodapprox import localize, maximal_small, quotient_sequence
    from .groups import SymmetricSubset
    from .scenarios import circle_triple, cyclic_subgroups, second_factor, torus_collapse, torus_map

    a = torus_map(i)
    loc = localize(a, SymmetricSubset(a.target, frozenset({a.target.identity})))
    ms = maximal_small([loc], delta, subgroups_fn=cyclic_subgroups)[0]
    t = torus_collapse(i)
    q = quotient_sequence([t], [second_factor(t, 16)])[0]
    g = equivariant_gh(q, circle_triple(16))
    return {"maximal_order": len(ms.subgroup), "maximal": ms.maximal, "normal": ms.normal_in_group,
            "quotient_points": q.space.n, "quotient_gh": g.value}


def _check_tower(i, delta, nmax, seed):
    from .goodapprox import maximal_small_sweep
    from .scenarios import cyclic_tower, tower_radii

    rep = maximal_small_sweep(cyclic_tower(2, i), tower_radii(2, i))
    return rep.to_dict()


def _check_sphere(i, delta, nmax, seed):
    from .gh import equivariant_gh
    from .scenarios import collapsing_sphere, point_triple

    g = equivariant_gh(collapsing_sphere(i), point_triple())
    return {"gh_to_point": g.value, "mode": g.mode}


def cmd_check(args) -> int:
    from .scenarios import SCENARIOS

    if args.scenario not in SCENARIOS:
        raise DomainError(f"unknown scenario {args.scenario!r}; choose from {sorted(SCENARIOS)}")
    sc = SCENARIOS[args.scenario]
    t0 = time.perf_counter()
    idx = _parse_indices(args.indices, sc.indices)
    name = sc.name
    if name == "hexagon":
        fn = _check_hexagon
    elif name == "torus_collapse":
        fn = _check_torus
    elif name == "cyclic_tower":
        fn = _check_tower
    elif name == "collapsing_sphere":
        fn = _check_sphere
    else:
        fn = lambda i, d, n, s: _check_map(name, i, d, n, s)  # noqa: E731
    rows = _pmap(lambda i: fn(i, args.delta, args.nmax, args.seed), idx)
    per = dict(zip(map(str, idx), rows))
    mismatches = _compare(name, sc.expected, idx, rows)
    rep = RunReport(sys.argv[1:] if args.argv is None else args.argv, {}, per,
                    {"expected": sc.expected, "mismatches": mismatches, "match": not mismatches})
    rep.wall_time = time.perf_counter() - t0
    if args.csv:
        _write_csv(args.csv, ["index", "key", "value"],
                   [(i, k, json.dumps(v, default=_default)) for i, r in per.items() for k, v in r.items()])
    _emit(rep, args)
    return EXIT_OK if not mismatches else EXIT_MISMATCH


def _compare(name, expected, idx, rows) -> list:
    out = []
    for i, r in zip(idx, rows):
        if "failing" in expected:
            failing = [c for c, ok in (r.get("conditions", r)["passed"]).items() if not ok]
            if failing != expected["failing"]:
                out.append(f"index {i}: failing {failing}, expected {expected['failing']}")
        if name == "hexagon":
            if r["order"] != expected["order"] or r["maximal_small"] != sorted(
                [list(range(6))] + expected["small"]
            ) or r["normal"] != expected["normal"] or not r["small"] or not r["maximal"]:
                out.append(f"index {i}: hexagon verdicts differ")
        if name == "torus_collapse":
            if r["maximal_order"] != expected["maximal_order"] or r["normal"] != expected["normal"]:
                out.append(f"index {i}: torus verdicts differ")
        if name == "cyclic_tower" and len(r["radii"]) > 1 and r["stable"] != expected["stable"]:
            out.append(f"index {i}: tower stability differs")
    if name == "collapsing_sphere":
        vals = [r["gh_to_point"] for r in rows]
        if any(b > a + 1e-12 for a, b in zip(vals, vals[1:])):
            out.append("distance to the point is not monotone")
    return out


# ---------------------------------------------------------------------------
# borsuk


def cmd_borsuk(args) -> int:
    from .borsuk import (
        OddMapSample, build_triangulation, continuity_modulus, find_near_zero, odd_sample, random_odd_sample,
    )

    t0 = time.perf_counter()
    digests = {}
    if args.map:
        with open(args.map) as fh:
            data = json.load(fh)
        digests[args.map] = _digest(args.map)
        n, s = int(data["n"]), int(data.get("s", args.s))
        if "matrix" in data:
            M = np.asarray(data["matrix"], dtype=float)
            k = M.shape[0]
        else:
            k = int(data["k"])
    else:
        n, k, s = args.n, args.k, args.s
    if n - 1 < k:
        raise DomainError(f"need n > k for an odd map S^{n - 1} -> R^{k} to vanish (got n={n}, k={k})")
    tri = build_triangulation(n, s)
    if args.map:
        if "matrix" in data:
            sample = odd_sample(tri, lambda x: M @ x)
        else:
            sample = OddMapSample(tri, np.asarray(data["values"], dtype=float))
    else:
        sample = random_odd_sample(tri, k, np.random.default_rng(args.seed))
    w = find_near_zero(sample)
    eps, dl = continuity_modulus(sample)
    ok = w.vertex_norm <= 2 * eps
    rep = RunReport(sys.argv[1:] if args.argv is None else args.argv, digests,
                    {"witness": w.to_dict(), "eps_est": eps, "delta_est": dl, "mesh": tri.mesh,
                     "simplices": len(tri.simplices)},
                    {"within_2eps": ok})
    rep.wall_time = time.perf_counter() - t0
    _emit(rep, args)
    return EXIT_OK if ok else EXIT_MISMATCH


# ---------------------------------------------------------------------------
# norms


NORM_SCENARIOS = ("hexagon", "torus_collapse", "cyclic_tower", "euclidean", "circle_arc", "torus_cross", "so3")


def _norms_finite(name, i, radii):
    from .escape import EscapeNormContext, all_words, estimate_gleason_constant, norm_table, zero_set
    from .goodapprox import localize
    from .groups import BallSubset, SymmetricSubset
    from .scenarios import cyclic_tower, hexagon_maps, torus_map

    if name == "hexagon":
        a = hexagon_maps([i])[0]
    elif name == "torus_collapse":
        a = torus_map(i)
    else:
        a = cyclic_tower(2, i)
    res, rows, words_rows = {}, [], []
    targets = [("e", SymmetricSubset(a.target, frozenset({a.target.identity})))]
    if radii:
        targets = [(f"r={r}", BallSubset(a.target, r)) for r in radii]
    for tag, B in targets:
        loc = localize(a, B)
        ctx = EscapeNormContext(a.source, loc.A_src)
        Z = zero_set(ctx)
        elems = sorted(loc.A_src.members)
        words = all_words(elems, 2) if len(elems) <= 64 else ((g,) for g in elems)
        est = estimate_gleason_constant(ctx, words)
        res[tag] = {"B_size": len(elems), "zero_set": sorted(list(g) if isinstance(g, tuple) else [g] for g in Z),
                    "c0_estimate": est.c0, "closure_violations": len(est.violations)}
        rows.extend((tag, repr(g), n) for g, n in norm_table(ctx, elems))
        if est.worst_word is not None:
            words_rows.append((tag, repr(est.worst_word), est.c0))
    return res, rows, words_rows


def _norms_algebra(name, seed, count=100):
    from .escape import AlgebraDirection, check_sandwich, convex_hull_norm, tau_and_algebra_norm
    from .groups import BallSubset, CircleGroup, LatticeGroup, SO3Group, VectorGroup
    from .scenarios import torus_cross

    rng = np.random.default_rng(seed)
    out, tau_rows = {}, []
    if name == "euclidean":
        from .escape import EscapeNormContext, estimate_gleason_constant

        # the escape norm is a step function, so the ratio exceeds 1 at coarse
        # scale and tends to 1 as the words shrink
        L = LatticeGroup(2, 0.001)
        ctx = EscapeNormContext(L, BallSubset(L, 1.0))
        by_scale = {}
        for M in (0.3, 0.1, 0.03):
            elems = [g for g in L.net(M) if g != L.identity]
            pick = rng.integers(len(elems), size=(400, 2))
            words = [(elems[a], elems[b]) for a, b in pick]
            by_scale[str(M)] = estimate_gleason_constant(ctx, words).c0
        out["c0_by_scale"] = by_scale
        G, B, k = VectorGroup(2), BallSubset(VectorGroup(2), 1.0), 2
    elif name == "circle_arc":
        G, B, k = CircleGroup(), BallSubset(CircleGroup(), 1.0), 1
    elif name == "torus_cross":
        (G, B), k = torus_cross(), 2
    else:
        G, B, k = SO3Group(), BallSubset(SO3Group(), 0.5), 3
    dirs = rng.normal(size=(count, k))
    norm = lambda v: tau_and_algebra_norm(AlgebraDirection(v), G, B).norm  # noqa: E731
    for u in dirs[:20]:
        r = tau_and_algebra_norm(AlgebraDirection(u), G, B)
        tau_rows.append((json.dumps(u.tolist()), r.tau, r.norm))
    hn = convex_hull_norm(dirs, norm)
    sw = check_sandwich(hn, norm, dirs)
    out.update({"c0_hull": hn.c0, "sandwich_ok": sw.ok, "lower_slack": sw.lower_slack,
                "upper_slack": sw.upper_slack, "directions": sw.count})
    return out, tau_rows


def cmd_norms(args) -> int:
    if args.scenario not in NORM_SCENARIOS:
        raise DomainError(f"unknown norms scenario {args.scenario!r}; choose from {list(NORM_SCENARIOS)}")
    t0 = time.perf_counter()
    radii = [float(r) for r in args.r_sweep.split(",")] if args.r_sweep else []
    verdicts = {}
    if args.scenario in ("hexagon", "torus_collapse", "cyclic_tower"):
        res, rows, wrows = _norms_finite(args.scenario, args.index, radii)
        header, table = ["B", "element", "norm"], rows
        verdicts["closure_ok"] = all(v["closure_violations"] == 0 for v in res.values())
    else:
        res, trows = _norms_algebra(args.scenario, args.seed)
        header, table = ["direction", "tau", "norm"], trows
        verdicts["sandwich_ok"] = res["sandwich_ok"]
    rep = RunReport(sys.argv[1:] if args.argv is None else args.argv, {}, {"norms": res}, verdicts)
    rep.wall_time = time.perf_counter() - t0
    if args.csv:
        _write_csv(args.csv, header, table)
    _emit(rep, args)
    return EXIT_OK if all(verdicts.values()) else EXIT_MISMATCH


# ---------------------------------------------------------------------------
# scenario export


def cmd_scenario(args) -> int:
    from .scenarios import export

    t0 = time.perf_counter()
    data = export(args.name, args.index)
    text = json.dumps(data, default=_default)
    if args.out:
        _write_atomic(args.out, text + "\n")
    else:
        print(text)
    del t0
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="egh-lab", description="Finite-scale equivariant GH laboratory.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gh", help="pointed or equivariant GH distance between two triple files")
    g.add_argument("files", nargs=2)
    g.add_argument("--equivariant", action="store_true")
    g.add_argument("--tol", type=float, default=1e-6)
    g.add_argument("--witness", help="write the witness relation to this file")
    g.add_argument("--out")
    g.set_defaults(fn=cmd_gh)

    c = sub.add_parser("check", help="run the good-approximation checks on a scenario")
    c.add_argument("scenario")
    c.add_argument("--indices", help="comma list or range a-b")
    c.add_argument("--delta", type=float, default=0.05)
    c.add_argument("--nmax", type=int, default=3)
    c.add_argument("--seed", type=int, default=DEFAULT_SEED)
    c.add_argument("--csv")
    c.add_argument("--out")
    c.set_defaults(fn=cmd_check)

    b = sub.add_parser("borsuk", help="find a near zero of an odd map on a triangulated sphere")
    b.add_argument("--map", help="JSON with n, s and either matrix or values")
    b.add_argument("--random", dest="seed", type=int, default=DEFAULT_SEED, help="seed for a random odd sample")
    b.add_argument("--n", type=int, default=3)
    b.add_argument("--k", type=int, default=1)
    b.add_argument("--s", type=int, default=3)
    b.add_argument("--out")
    b.set_defaults(fn=cmd_borsuk)

    n = sub.add_parser("norms", help="escape-norm tables, C0 estimates and hull-norm checks")
    n.add_argument("scenario")
    n.add_argument("--index", type=int, default=1)
    n.add_argument("--r-sweep", help="comma list of localization radii")
    n.add_argument("--seed", type=int, default=DEFAULT_SEED)
    n.add_argument("--csv")
    n.add_argument("--out")
    n.set_defaults(fn=cmd_norms)

    s = sub.add_parser("scenario", help="scenario utilities")
    ssub = s.add_subparsers(dest="action", required=True)
    e = ssub.add_parser("export", help="write a scenario index as JSON")
    e.add_argument("name")
    e.add_argument("index", type=int)
    e.add_argument("--out")
    e.set_defaults(fn=cmd_scenario)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    args.argv = list(argv) if argv is not None else None
    try:
        return args.fn(args)
    except (StructureError, DomainError, json.JSONDecodeError, KeyError, OSError, ValueError) as exc:
        print(f"egh-lab: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
