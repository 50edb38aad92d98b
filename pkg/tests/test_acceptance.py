"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Runtime limits are asserted inside each test with a wall clock.
"""

import itertools
import math
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from egh_lab.borsuk import build_triangulation, continuity_modulus, find_near_zero, random_odd_sample
from egh_lab.escape import (
    AlgebraDirection,
    EscapeNormContext,
    check_hypothesis,
    check_limsup_formula,
    check_norm_continuity_bound,
    check_sandwich,
    convex_hull_norm,
    escape_norm,
    tau_and_algebra_norm,
    zero_set,
)
from egh_lab.gh import MetricTriple, almost_morphism_slacks, equivariant_gh, pointed_gh, validate_approximation
from egh_lab.goodapprox import (
    auto_scale,
    blowup,
    check_conditions,
    check_one,
    detect_small,
    displacement_curve,
    localize,
    maximal_small,
    maximal_small_sweep,
    preimage_smallness,
    quotient_sequence,
    verify_blowup_bounds,
)
from egh_lab.groups import BallSubset, CircleGroup, ComplementSubset, CyclicGroup, SO3Group, SymmetricSubset, VectorGroup
from egh_lab.isometry import IsometryGroup, dp_distance, full_isometry_group, quotient_group, subgroups
from egh_lab.metric import FiniteMetricSpace, hausdorff_distance, validate_metric
from egh_lab.scenarios import (
    COUNTEREXAMPLES,
    HEX_BC,
    circle_triple,
    collapsing_sphere,
    counterexample,
    cyclic_subgroups,
    cyclic_tower,
    fine_torus_map,
    hexagon_graph,
    hexagon_maps,
    point_triple,
    second_factor,
    sphere_mesh_spacing,
    torus_collapse,
    torus_cross,
    torus_map,
    tower_radii,
)
from oracles import cyclic_escape_oracle, equivariant_oracle, pointed_oracle, pointed_spaces


def _triples(spaces, max_order=4):
    out = []
    for m in spaces:
        for H in subgroups(full_isometry_group(m)):
            if len(H) <= max_order:
                out.append(MetricTriple(m, IsometryGroup(m, tuple(H))))
    return out


@pytest.mark.criterion(1, "hexagon: order 6, (b c) small, maximal, not normal")
def test_c01_hexagon():
    t0 = time.perf_counter()
    for i in (1, 2, 4, 8):
        t = hexagon_graph(i)
        assert t.group.order == 6
        H = [t.group.identity, HEX_BC]
        v = detect_small([(t, H)], 0.0, float(i), radii=range(1, i + 1))[0]
        assert v.small and v.curve == (0.0,) * i
        # every other nontrivial subgroup moves the basepoint by exactly 3i
        for K in subgroups(t.group):
            if len(K) > 1 and not K <= set(H):
                assert displacement_curve(t, K, [float(i)]) == [3.0 * i]
        a = hexagon_maps([i])[0]
        loc = localize(a, SymmetricSubset(a.target, frozenset({a.target.identity})))
        rep = maximal_small([loc], 0.05)[0]
        assert rep.subgroup == frozenset(H)
        assert rep.maximal and not rep.normal_in_group
    assert time.perf_counter() - t0 < 1.0


@pytest.mark.criterion(2, "counterexample matrix at delta 0.05: each fails exactly its own condition")
def test_c02_counterexamples():
    t0 = time.perf_counter()
    for which in COUNTEREXAMPLES:
        for i in (10, 20):
            rep = check_one(counterexample(which, i), 0.05, 3, index=i)
            assert rep.failing() == [which], (which, i, rep.failing())
    assert time.perf_counter() - t0 < 30.0


@pytest.mark.criterion(3, "GH searches agree with the exhaustive oracles")
def test_c03_gh_oracles():
    t0 = time.perf_counter()
    for scale in (1.0, 0.1):
        spaces = pointed_spaces(4, scale=scale)
        for a, b in itertools.combinations_with_replacement(spaces, 2):
            r = pointed_gh(a, b)
            assert r.mode == "exact"
            assert abs(r.value - pointed_oracle(a, b)) <= 1e-6
    triples = _triples(pointed_spaces(4, scale=0.1))
    small = [t for t in triples if t.space.n <= 3]
    big = [t for t in triples if t.space.n == 4]
    pairs = [(a, b) for a in small for b in small]
    pairs += [(a, a) for a in big]
    pairs += [(a, b) for a in big for b in small]
    rng = random.Random(0)
    pairs += [(rng.choice(big), rng.choice(big)) for _ in range(300)]
    for a, b in pairs:
        r = equivariant_gh(a, b)
        assert r.mode == "exact"
        assert abs(r.value - equivariant_oracle(a, b)) <= 1e-6
    assert time.perf_counter() - t0 < 600.0


@pytest.mark.criterion(4, "collapsing circles approach the point, monotone, within pi/i + mesh")
def test_c04_collapsing_spheres():
    t0 = time.perf_counter()
    vals = []
    for i in (1, 2, 4, 8):
        r = equivariant_gh(collapsing_sphere(i), point_triple())
        assert r.value <= math.pi / i + sphere_mesh_spacing(i) + 1e-6
        vals.append(r.value)
    assert all(b <= a + 1e-6 for a, b in zip(vals, vals[1:]))
    assert time.perf_counter() - t0 < 60.0


@pytest.mark.criterion(5, "escape norms on Z/n match the closed form; complement-of-a-point example")
def test_c05_escape_exact():
    t0 = time.perf_counter()
    for n in range(1, 65):
        G = CyclicGroup(n, "word")
        for b in range(n // 2 + 1):
            A = SymmetricSubset(G, frozenset(x % n for x in range(-b, b + 1)))
            ctx = EscapeNormContext(G, A)
            for s in range(n):
                assert escape_norm(ctx, s) == cyclic_escape_oracle(n, b, s), (n, b, s)
    C = CircleGroup()
    half = Fraction(1, 2)
    ctx = EscapeNormContext(C, ComplementSubset(C, half))
    seq = [Fraction(j, 2 * j + 1) for j in range(1, 200)]
    assert escape_norm(ctx, half) == 1.0
    assert all(escape_norm(ctx, g) == 0.0 for g in seq)
    rep = check_norm_continuity_bound(ctx, half, seq)
    assert not rep.hypothesis_holds and rep.hypothesis_witness == half and not rep.bound_holds
    assert check_hypothesis(ctx) == half
    assert time.perf_counter() - t0 < 10.0


@pytest.mark.criterion(6, "limsup of escape norm over t recovers |v|_B on R^1 and circle arcs")
def test_c06_limsup():
    t0 = time.perf_counter()
    ms = range(1, 1001)
    R = VectorGroup(1)
    rep = check_limsup_formula(AlgebraDirection([1.0]), R, BallSubset(R, 1.0), ms, tau=Fraction(1))
    assert rep.max_error == 0.0 and rep.within_bound
    for n in (4096, 65536):
        C = CyclicGroup(n, "arc")
        for v in (0.5, 1.0, 2.0):
            rep = check_limsup_formula(AlgebraDirection([v]), C, BallSubset(C, 1.0), ms, grid=2 * math.pi / n)
            assert rep.upper_ok and rep.lower_ok and rep.within_bound, (n, v)
    assert time.perf_counter() - t0 < 10.0


@pytest.mark.criterion(7, "convex-hull gauge sandwich on R^2, the torus cross and SO(3)")
def test_c07_sandwich():
    t0 = time.perf_counter()
    R2 = VectorGroup(2)
    T, cross = torus_cross()
    S = SO3Group()
    cases = [(R2, BallSubset(R2, 1.0), 2), (T, cross, 2), (S, BallSubset(S, 0.5), 3)]
    for seed, (G, B, k) in enumerate(cases):
        dirs = np.random.default_rng(seed).normal(size=(100, k))

        def norm(v, G=G, B=B):
            return tau_and_algebra_norm(AlgebraDirection(v), G, B).norm

        hn = convex_hull_norm(dirs, norm)
        rep = check_sandwich(hn, norm, dirs)
        assert rep.ok and rep.count == 100
        for v in dirs:
            assert norm(v) <= hn(v) * (1 + 1e-9) and hn(v) <= 2 * hn.c0 * norm(v) * (1 + 1e-9)
    assert time.perf_counter() - t0 < 30.0


@pytest.mark.criterion(8, "Borsuk-Ulam: near zeros for 100 odd samples on S^2 -> R and S^3 -> R^2")
def test_c08_borsuk():
    t0 = time.perf_counter()
    for n, k in ((3, 1), (4, 2)):
        tri = build_triangulation(n, 3)
        rng = np.random.default_rng(n)
        for _ in range(100):
            sample = random_odd_sample(tri, k, rng)
            w = find_near_zero(sample)
            eps, _ = continuity_modulus(sample)
            assert w.value_norm <= 1e-9 and w.vertex_norm <= 2 * eps
    tri = build_triangulation(2, 3)
    from egh_lab.metric import DomainError

    with pytest.raises(DomainError):
        find_near_zero(random_odd_sample(tri, 2, np.random.default_rng(0)))
    assert time.perf_counter() - t0 < 120.0


@pytest.mark.criterion(9, "torus collapse: normal maximal H, circle quotients, blow-up passes")
def test_c09_torus_pipeline():
    t0 = time.perf_counter()
    limit = circle_triple(16)
    gh = []
    for i in (2, 4, 8):
        a = torus_map(i)
        loc = localize(a, SymmetricSubset(a.target, frozenset({a.target.identity})))
        rep = maximal_small([loc], 0.1, subgroups_fn=cyclic_subgroups)[0]
        t = torus_collapse(i)
        H = second_factor(t, 16)
        assert rep.subgroup == frozenset(H.elements) and rep.maximal and rep.normal_in_group
        q = quotient_sequence([t], [H])[0]
        assert q.space.n == 16
        gh.append(equivariant_gh(q, limit).value)
    assert all(b <= a + 1e-12 for a, b in zip(gh, gh[1:]))
    seq = [fine_torus_map(i) for i in (2, 4, 8)]
    blown = blowup(seq, 1, lambda _, a: auto_scale(a))
    assert all(r.ok for r in check_conditions(blown, 0.1))
    assert all(r.ok for r in verify_blowup_bounds(blown, 0.25))
    assert time.perf_counter() - t0 < 120.0


@pytest.mark.criterion(10, "cyclic 2-adic towers have no stable maximal small subgroup")
def test_c10_towers():
    t0 = time.perf_counter()
    for i in range(1, 6):
        rep = maximal_small_sweep(cyclic_tower(2, i), tower_radii(2, i))
        assert not rep.stable
        assert len(rep.larger_small_exists) == i and all(rep.larger_small_exists)
        assert rep.orders == tuple(2 ** (i - k) for k in range(i + 1))
    assert time.perf_counter() - t0 < 10.0


def _small_spaces():
    out = [hexagon_graph(1).space, collapsing_sphere(1, mesh=12).space, circle_triple(8).space]
    rng = np.random.default_rng(11)
    while len(out) < 8:
        n = int(rng.integers(2, 6))
        d = np.triu(rng.integers(1, 4, size=(n, n)), 1).astype(float)
        d = d + d.T
        if not validate_metric(d):
            out.append(FiniteMetricSpace(d, 0))
    return out


@pytest.mark.criterion(11, "invariant suites: d_p, Hausdorff axioms, escape norms, preimages, 7-epsilon slack")
def test_c11_invariants():
    t0 = time.perf_counter()
    # d_p is left-invariant, exhaustively on groups of order at most 24
    groups = [hexagon_graph(2).group, collapsing_sphere(1, mesh=12).group, circle_triple(12).group]
    groups += [full_isometry_group(m) for m in _small_spaces()]
    for G in groups:
        assert G.order <= 24
        els = G.elements
        D = {(g, h): dp_distance(G, g, h) for g in els for h in els}
        for k in els:
            for (g, h), val in D.items():
                assert D[G.mul(k, g), G.mul(k, h)] == val
    # Hausdorff distance is a metric on the non-empty subsets
    for m in _small_spaces():
        if m.n > 5:
            m = FiniteMetricSpace(m.dist[:5, :5], 0)
        subs = [s for r in range(1, m.n + 1) for s in itertools.combinations(range(m.n), r)]
        H = np.array([[hausdorff_distance(m, a, b) for b in subs] for a in subs])
        assert np.all(np.diag(H) == 0) and np.array_equal(H, H.T)
        assert np.all(H[~np.eye(len(subs), dtype=bool)] > 0)
        assert np.all(H[:, None, :] <= H[:, :, None] + H[None, :, :] + 1e-12)
    # escape norms: symmetric, and the zero set is closed under powers
    for n in range(1, 13):
        G = CyclicGroup(n, "word")
        half = [s for s in range(1, n) if s <= n - s]
        for bits in itertools.product((0, 1), repeat=len(half)):
            mem = {0} | {x for s, on in zip(half, bits) if on for x in (s, n - s)}
            ctx = EscapeNormContext(G, SymmetricSubset(G, frozenset(mem)))
            Z = zero_set(ctx)
            for g in range(n):
                assert escape_norm(ctx, g) == escape_norm(ctx, G.inv(g))
            assert all(G.power(z, j) in Z for z in Z for j in range(n))
    # the preimage of a small subgroup downstairs is small upstairs
    for i in (2, 4, 8):
        t = torus_collapse(i, grid=8)
        H = second_factor(t, 8)
        Q = quotient_group(t.group, H)
        for K in subgroups(Q.image()):
            idx = [Q.action.index(k) for k in K]
            for R in (0.5, 1.0, 2.0):
                holds, _, _ = preimage_smallness(t, H, idx, R)
                assert holds
    # every witness produced by the equivariant search is a valid approximation with 7-eps slack
    witnesses = []
    triples = _triples(pointed_spaces(3, scale=0.1))
    for a in triples:
        for b in triples:
            r = equivariant_gh(a, b)
            if r.witness is not None:
                witnesses.append(r.witness)
    for i in (1, 2, 4, 8):
        r = equivariant_gh(collapsing_sphere(i), point_triple())
        if r.witness is not None:
            witnesses.append(r.witness)
    assert witnesses
    for w in witnesses:
        assert validate_approximation(w) == []
        assert min(almost_morphism_slacks(w), default=0.0) >= 0
    assert time.perf_counter() - t0 < 300.0
