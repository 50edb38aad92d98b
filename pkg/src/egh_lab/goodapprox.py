"""Finite-scale checks of the good-approximation conditions I-V and the
constructions built on them.

"For i large enough" is replaced throughout by a tolerance ``delta``: a
condition passes at index i when its worst defect is at most ``delta``.
Products ``A^n`` are enumerated exactly when they fit in ``budget`` and are
otherwise sampled with a fixed-seed generator, so reports are reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .groups import BallSubset, SymmetricSubset, VectorGroup, _sort_key
from .isometry import ResourceError, enumerate_subgroups
from .metric import DomainError

CONDITIONS = ("I", "II", "III", "IV", "V")
N_MAX = 3
BUDGET = 200_000
SAMPLE = 20_000
NET_SPACING = 0.025
NEIGHBOR_FACTOR = 1.5


@dataclass(frozen=True, eq=False)
class ApproximationMap:
    """One index of a sequence ``phi_i : G_i -> G`` with neighbourhoods ``A_i``, ``A``.

    ``phi`` may be a callable or a dict on the source elements.
    """

    source: object
    target: object
    phi: object
    A_src: SymmetricSubset
    A_tgt: object
    label: str = ""

    def __post_init__(self):
        if isinstance(self.phi, dict):
            table = self.phi
            object.__setattr__(self, "phi", table.__getitem__)
        if not isinstance(self.A_src, SymmetricSubset):
            raise DomainError("source neighbourhood must be a finite SymmetricSubset")

    def __call__(self, g):
        return self.phi(g)


@dataclass(frozen=True)
class ConditionReport:
    index: int
    delta: float
    n_max: int
    passed: dict
    slack: dict
    witness: dict
    exact: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.passed.values())

    def failing(self) -> list:
        return [c for c in CONDITIONS if not self.passed[c]]

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "delta": self.delta,
            "n_max": self.n_max,
            "passed": dict(self.passed),
            "slack": {k: _finite(v) for k, v in self.slack.items()},
            "witness": {k: (None if v is None else repr(v)) for k, v in self.witness.items()},
            "exact": dict(self.exact),
        }


def _finite(x):
    if x is None or math.isfinite(x):
        return x
    return "inf" if x > 0 else "-inf"


# ---------------------------------------------------------------------------
# products of subsets


def _products(G, left, right, budget, rng):
    """``{a b}`` exactly if ``|left||right| <= budget``, else a random sample."""
    left, right = list(left), list(right)
    if len(left) * len(right) <= budget:
        return list({G.mul(a, b) for a in left for b in right}), True
    out = set()
    for _ in range(SAMPLE):
        out.add(G.mul(left[rng.integers(len(left))], right[rng.integers(len(right))]))
    return list(out), False


def power_sets(G, members, n_max=N_MAX, budget=BUDGET, seed=0):
    """``{k: (elements of A^k, exact)}`` for ``k = 1..n_max``."""
    rng = np.random.default_rng(seed)
    A = sorted(members, key=_sort_key)
    out = {1: (A, True)}
    cur, exact = A, True
    for k in range(2, n_max + 1):
        cur, ex = _products(G, cur, A, budget, rng)
        exact = exact and ex
        cur = sorted(cur, key=_sort_key)
        out[k] = (cur, exact)
    return out


def _pairs(elems, budget, rng):
    n = len(elems)
    if n * n <= budget:
        return [(a, b) for a in elems for b in elems], True
    idx = rng.integers(n, size=(SAMPLE, 2))
    return [(elems[i], elems[j]) for i, j in idx], False


def _neighbors(G, g, rho, pool):
    if hasattr(G, "neighbors_of"):
        return [h for h in G.neighbors_of(g, rho) if h in pool]
    return [h for h in pool if G.dist(g, h) < rho]


# ---------------------------------------------------------------------------
# conditions I-V


def check_one(a: ApproximationMap, delta: float, n_max: int = N_MAX, index: int = 0,
              net_spacing: float = NET_SPACING, budget: int = BUDGET, seed: int = 0) -> ConditionReport:
    if delta <= 0:
        raise DomainError("delta must be positive")
    S, T = a.source, a.target
    A = a.A_src.members
    A_list = sorted(A, key=_sort_key)
    imgs = [a.phi(g) for g in A_list]
    passed, slack, witness, exact = {}, {}, {}, {}
    rng = np.random.default_rng(seed)

    # I: every net point of the target neighbourhood is close to the image
    worst, wit = 0.0, None
    distinct = set(imgs)
    for c in a.A_tgt.net(net_spacing):
        d = min(T.dist(y, c) for y in distinct)
        if d > worst:
            worst, wit = d, c
    passed["I"] = worst < delta
    slack["I"] = delta - worst
    witness["I"] = None if passed["I"] else wit
    exact["I"] = True

    # II: the image stays in the delta-thickening of the closure of A
    worst, wit = 0.0, None
    for g, y in zip(A_list, imgs):
        d = a.A_tgt.dist_to(y)
        if d > worst:
            worst, wit = d, g
    passed["II"] = worst <= delta
    slack["II"] = delta - worst
    witness["II"] = None if passed["II"] else wit
    exact["II"] = True

    powers = power_sets(S, A, n_max, budget, seed)

    # III: almost multiplicative on A^n
    top, top_exact = powers[n_max]
    pairs, pairs_exact = _pairs(top, budget, rng)
    worst, wit = 0.0, None
    for g, h in pairs:
        d = T.dist(a.phi(S.mul(g, h)), T.mul(a.phi(g), a.phi(h)))
        if d > worst:
            worst, wit = d, (g, h)
    passed["III"] = worst <= delta
    slack["III"] = delta - worst
    witness["III"] = None if passed["III"] else wit
    exact["III"] = top_exact and pairs_exact

    # IV: products landing in the compact core of A come from A_i
    worst_depth, wit = -math.inf, None
    for k in range(2, n_max + 1):
        for g in powers[k][0]:
            if g in A:
                continue
            dep = a.A_tgt.depth(a.phi(g))
            if dep > worst_depth:
                worst_depth, wit = dep, g
    passed["IV"] = not (worst_depth >= delta)
    slack["IV"] = delta - worst_depth if worst_depth > -math.inf else math.inf
    witness["IV"] = None if passed["IV"] else wit
    exact["IV"] = powers[n_max][1]

    # V: the smallest open sets of the source around preimages of the core map near
    rho = NEIGHBOR_FACTOR * getattr(S, "resolution", 0.0)
    worst, wit = 0.0, None
    if rho > 0:
        for g, y in zip(A_list, imgs):
            if a.A_tgt.depth(y) < 2 * delta:
                continue
            for h in _neighbors(S, g, rho, A):
                d = T.dist(a.phi(h), y)
                if d > worst:
                    worst, wit = d, (g, h)
    passed["V"] = worst <= delta
    slack["V"] = delta - worst
    witness["V"] = None if passed["V"] else wit
    exact["V"] = True

    return ConditionReport(index, delta, n_max, passed, slack, witness, exact)


def check_conditions(seq, delta: float, n_max: int = N_MAX, **kw) -> list:
    """One :class:`ConditionReport` per index of ``seq``."""
    return [check_one(a, delta, n_max, index=i, **kw) for i, a in enumerate(seq)]


# ---------------------------------------------------------------------------
# symmetrization and localization


def symmetrize(a: ApproximationMap) -> ApproximationMap:
    """ψ = φ on a transversal ``W`` of inversion, ``ψ(g) = φ(g⁻¹)⁻¹`` off it.

    ``W`` holds the elements whose sort key is not larger than their
    inverse's, so involutions are in ``W`` and keep their value.
    """
    S, T, phi = a.source, a.target, a.phi

    def psi(g):
        gi = S.inv(g)
        if _sort_key(g) <= _sort_key(gi):
            return phi(g)
        return T.inv(phi(gi))

    return ApproximationMap(S, T, psi, a.A_src, a.A_tgt, a.label)


def inverse_defect(a: ApproximationMap, elements=None) -> float:
    """``max d(φ(g⁻¹) φ(g), e)`` over the given elements (default ``A_i``)."""
    S, T = a.source, a.target
    elems = a.A_src.members if elements is None else elements
    return max(T.dist(T.mul(a.phi(S.inv(g)), a.phi(g)), T.identity) for g in elems)


def _subset_of(B, A) -> bool:
    if isinstance(B, BallSubset) and isinstance(A, BallSubset):
        return B.radius <= A.radius + 1e-12
    if isinstance(B, SymmetricSubset):
        return all(A.contains(b) for b in B.members)
    pts = B.net(NET_SPACING)
    return all(A.contains(b) for b in pts)


def localize(a: ApproximationMap, B_tgt) -> ApproximationMap:
    """Shrink the neighbourhoods to ``B_tgt`` and its symmetric preimage in ``A_i``."""
    if not _subset_of(B_tgt, a.A_tgt):
        raise DomainError("B_tgt must be contained in the target neighbourhood")
    S = a.source
    pre = {g for g in a.A_src.members if B_tgt.contains(a.phi(g))}
    sym = frozenset(g for g in pre if S.inv(g) in pre) | {S.identity}
    return ApproximationMap(S, a.target, a.phi, SymmetricSubset(S, sym), B_tgt, a.label)


def check_iv_prime(original: ApproximationMap, local: ApproximationMap, delta: float,
                   n_max: int = N_MAX, budget: int = BUDGET, seed: int = 0):
    """Elements of ``A_i^n`` whose image lies in the ``delta``-core of ``B`` but
    which miss ``B_i``; an empty list means IV' holds."""
    S = original.source
    bad = []
    powers = power_sets(S, original.A_src.members, n_max, budget, seed)
    for k in range(1, n_max + 1):
        for g in powers[k][0]:
            if local.A_tgt.in_core(local.phi(g), delta) and g not in local.A_src.members:
                bad.append(g)
    return bad


# ---------------------------------------------------------------------------
# small subgroups


@dataclass(frozen=True)
class SmallSubgroupVerdict:
    subgroup: frozenset
    radii: tuple
    curve: tuple
    delta: float
    radius: float
    small: bool

    def to_dict(self) -> dict:
        return {"order": len(self.subgroup), "radii": list(self.radii), "curve": list(self.curve),
                "delta": self.delta, "radius": self.radius, "small": self.small}


def displacement_curve(triple, H, radii) -> list:
    """``sup_{h in H} sup_{x in B_r(p)} d(hx, x)`` for each radius (open balls)."""
    m = triple.space
    row = m.dist[m.basepoint]
    H = [np.asarray(h) for h in H]
    pts = np.arange(m.n)
    out = []
    for r in radii:
        ball = pts[row < r]
        out.append(max(float(m.dist[h[ball], ball].max()) if len(ball) else 0.0 for h in H))
    return out


def detect_small(seq, delta: float, radius: float, radii=None) -> list:
    """Verdict per index for pairs ``(triple, H)``: small iff curve(radius) <= delta."""
    out = []
    for triple, H in seq:
        H = frozenset(tuple(h) for h in H)
        rs = tuple(radii) if radii is not None else (radius,)
        curve = displacement_curve(triple, H, rs)
        at_R = displacement_curve(triple, H, [radius])[0]
        out.append(SmallSubgroupVerdict(H, rs, tuple(curve), delta, radius, at_R <= delta))
    return out


def curve_trend(verdicts, radius_index: int = -1) -> str:
    vals = [v.curve[radius_index] for v in verdicts]
    if all(b <= a + 1e-12 for a, b in zip(vals, vals[1:])):
        return "nonincreasing"
    return "not monotone"


def is_small_wrt(a: ApproximationMap, H, delta: float) -> bool:
    """Small for the pair ``(φ, A)`` at tolerance delta: ``H ⊂ A`` and ``d(φ(h), e) <= delta``."""
    T = a.target
    return all(h in a.A_src.members for h in H) and all(T.dist(a.phi(h), T.identity) <= delta for h in H)


@dataclass(frozen=True)
class MaximalSmallReport:
    index: int
    subgroup: frozenset
    is_subgroup: bool
    small: bool
    maximal: bool
    counterexample: frozenset | None
    normal_in_generated: bool
    normal_in_group: bool
    subgroups_checked: int

    def to_dict(self) -> dict:
        return {
            "index": self.index, "order": len(self.subgroup), "is_subgroup": self.is_subgroup,
            "small": self.small, "maximal": self.maximal,
            "counterexample_order": None if self.counterexample is None else len(self.counterexample),
            "normal_in_generated": self.normal_in_generated, "normal_in_group": self.normal_in_group,
            "subgroups_checked": self.subgroups_checked,
        }


def _closed(G, S) -> bool:
    return all(G.mul(a, b) in S for a in S for b in S)


def _generated(G, gens, cap=100_000) -> frozenset:
    seen = {G.identity}
    frontier = [G.identity]
    gens = list(gens)
    while frontier:
        nxt = []
        for a in frontier:
            for s in gens:
                b = G.mul(a, s)
                if b not in seen:
                    seen.add(b)
                    nxt.append(b)
                    if len(seen) > cap:
                        raise ResourceError("generated subgroup exceeds cap")
        frontier = nxt
    return frozenset(seen)


def is_normal_in(G, H, ambient) -> bool:
    return all(G.mul(G.mul(g, h), G.inv(g)) in H for g in ambient for h in H)


def maximal_small(local_seq, delta: float, subgroups_fn=None, cap: int = 4096) -> list:
    """Per index: the escape-norm zero set of the localized ``B_i`` and its audit.

    The candidate is checked to be a subgroup, small for ``(φ, B_i)`` at
    ``delta``, to contain every subgroup of ``G_i`` that is small at the same
    tolerance (all subgroups enumerated, or supplied by ``subgroups_fn``), and
    to be normal in ``<B_i>`` and in ``G_i``.
    """
    from .escape import EscapeNormContext, zero_set

    out = []
    for i, a in enumerate(local_seq):
        G = a.source
        ctx = EscapeNormContext(G, a.A_src)
        H = zero_set(ctx)
        sub = _closed(G, H)
        small = is_small_wrt(a, H, delta)
        if subgroups_fn is not None:
            subs = subgroups_fn(G)
        else:
            subs = enumerate_subgroups(G.elements, G.identity, G.mul, cap=cap)
        counter = None
        for K in subs:
            if is_small_wrt(a, K, delta) and not K <= H:
                counter = frozenset(K)
                break
        gen = _generated(G, a.A_src.members)
        out.append(MaximalSmallReport(
            i, H, sub, small, counter is None, counter,
            is_normal_in(G, H, gen), is_normal_in(G, H, G.elements), len(subs),
        ))
    return out


@dataclass(frozen=True)
class TowerReport:
    radii: tuple
    orders: tuple
    stable: bool
    larger_small_exists: tuple

    def to_dict(self) -> dict:
        return {"radii": list(self.radii), "orders": list(self.orders), "stable": self.stable,
                "larger_small_exists": list(self.larger_small_exists)}


def maximal_small_sweep(a: ApproximationMap, radii) -> TowerReport:
    """Zero sets of the escape norm on the localized ``B(r)`` for decreasing ``r``.

    Radii act as tolerance levels. The candidate maximum at level ``k`` is
    beaten when the zero set at the next coarser level is a strictly larger
    subgroup that is small at that level's tolerance. The family is stable
    when every level gives the same subgroup.
    """
    from .escape import EscapeNormContext, zero_set

    radii = sorted(radii, reverse=True)
    T = a.target
    Hs = []
    for r in radii:
        loc = localize(a, BallSubset(T, r))
        Hs.append(zero_set(EscapeNormContext(a.source, loc.A_src)))
    beaten = []
    for k in range(1, len(radii)):
        coarse, fine = Hs[k - 1], Hs[k]
        loc = localize(a, BallSubset(T, radii[k - 1]))
        beaten.append(fine < coarse and is_small_wrt(loc, coarse, radii[k - 1]))
    stable = all(H == Hs[0] for H in Hs)
    return TowerReport(tuple(radii), tuple(len(H) for H in Hs), stable, tuple(beaten))


# ---------------------------------------------------------------------------
# quotients


def quotient_sequence(triples, H_seq, delta: float | None = None, radius: float | None = None) -> list:
    """Quotient triples ``(X_i/H_i, G_i/H_i, [p_i])`` with the faithful image group.

    Raises a domain error naming the first non-normal index. When ``delta``
    and ``radius`` are given, each ``H_i`` must also be metrically small.
    """
    from .gh import MetricTriple
    from .isometry import IsometryGroup, quotient_group

    out = []
    for i, (t, H) in enumerate(zip(triples, H_seq)):
        Hg = H if isinstance(H, IsometryGroup) else IsometryGroup(t.space, tuple(H))
        if delta is not None:
            curve = displacement_curve(t, Hg.elements, [radius])[0]
            if curve > delta:
                raise DomainError(f"index {i}: subgroup is not small (displacement {curve} > {delta})")
        try:
            Q = quotient_group(t.group, Hg)
        except DomainError as exc:
            raise DomainError(f"index {i}: {exc}") from exc
        out.append(MetricTriple(Q.space, Q.image()))
    return out


def preimage_smallness(triple, H, K_down, radius: float) -> tuple:
    """Check ``curve_up(preimage, R) <= curve_down(K, R) + curve(H, R)``.

    ``K_down`` is a set of coset indices of ``G/H`` (from
    :func:`~egh_lab.isometry.quotient_group`). Returns
    ``(holds, upstairs, bound)``; the bound follows from the definition of
    the quotient metric, so it holds for every subgroup.
    """
    from .gh import MetricTriple
    from .isometry import IsometryGroup, quotient_group

    Hg = H if isinstance(H, IsometryGroup) else IsometryGroup(triple.space, tuple(H))
    Q = quotient_group(triple.group, Hg)
    pre = set()
    for j in K_down:
        pre |= Q.cosets[j]
    down_triple = MetricTriple(Q.space, Q.image())
    up = displacement_curve(triple, pre, [radius])[0]
    down = displacement_curve(down_triple, [Q.action[j] for j in K_down], [radius])[0]
    h = displacement_curve(triple, Hg.elements, [radius])[0]
    bound = down + h
    return up <= bound + 1e-12, up, bound


# ---------------------------------------------------------------------------
# blow-up into R^k


@dataclass(frozen=True, eq=False)
class BlownMap(ApproximationMap):
    m: int = 0
    parent: object = None


BULLETS = ("identity", "density", "continuity", "multiplicativity", "chart")


def blowup_bullets(a: ApproximationMap, m: int, budget: int = BUDGET, seed: int = 0) -> dict:
    """Worst defect of each bullet at scale ``m`` (each must be ``<= 1/m^2``)."""
    S, T = a.source, a.target
    tol = 1.0 / m**2
    rng = np.random.default_rng(seed)
    A = a.A_src.members
    imgs = {g: a.phi(g) for g in A}
    out = {"identity": T.dist(a.phi(S.identity), T.identity)}
    worst = 0.0
    distinct = set(imgs.values())
    for c in T.net(2.0 / m, tol):
        worst = max(worst, min(T.dist(y, c) for y in distinct))
        if worst > tol:
            break
    out["density"] = worst
    A2, _ = _products(S, A, A, budget, rng)
    rho = NEIGHBOR_FACTOR * getattr(S, "resolution", 0.0)
    worst = 0.0
    if rho > 0:
        A2set = set(A2)
        probe = A2 if len(A2) <= 4000 else [A2[k] for k in rng.integers(len(A2), size=4000)]
        for g in probe:
            y = a.phi(g)
            for h in _neighbors(S, g, rho, A2set):
                worst = max(worst, T.dist(a.phi(h), y))
    out["continuity"] = worst
    pairs, _ = _pairs(A2, budget, rng)
    out["multiplicativity"] = max(T.dist(a.phi(S.mul(g, h)), T.mul(a.phi(g), a.phi(h))) for g, h in pairs)
    # B_{1/m}(e) must sit inside A: report how far it sticks out
    out["chart"] = max(0.0, 1.0 / m - a.A_tgt.depth(T.identity))
    return out


def bullets_ok(bullets: dict, m: int) -> str | None:
    """Name of the first failing bullet, or None."""
    tol = 1.0 / m**2
    for name in BULLETS:
        limit = 0.0 if name == "chart" else tol
        if bullets[name] > limit + 1e-15:
            return name
    return None


def auto_scale(a: ApproximationMap, m_max: int = 200, **kw) -> int:
    """Largest ``m <= m_max`` at which every bullet holds (0 if none does)."""
    lo, hi = 0, m_max
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if bullets_ok(blowup_bullets(a, mid, **kw), mid) is None:
            lo = mid
        else:
            hi = mid - 1
    return lo


def blowup(seq, k: int, schedule, **kw) -> list:
    """ψ_i = m·log∘φ_i into R^k with ``B_i = A_i ∩ φ_i⁻¹(B_{1/m}(e))`` and ``B = B_1(0)``.

    ``schedule`` is a list of scales, one per index, or a callable
    ``(index, approximation) -> m``. A scale at which a bullet fails raises a
    domain error naming the first failing bullet.
    """
    out = []
    R = VectorGroup(k)
    unit = BallSubset(R, 1.0)
    for i, a in enumerate(seq):
        m = schedule(i, a) if callable(schedule) else schedule[i]
        if m < 1:
            raise DomainError(f"index {i}: no feasible blow-up scale")
        bad = bullets_ok(blowup_bullets(a, m, **kw), m)
        if bad is not None:
            raise DomainError(f"index {i}: scale m={m} fails the {bad} bullet")
        S, T = a.source, a.target
        pre = {g for g in a.A_src.members if T.norm(a.phi(g)) < 1.0 / m}
        B_i = frozenset(g for g in pre if S.inv(g) in pre) | {S.identity}
        phi = a.phi

        def psi(g, phi=phi, m=m, T=T):
            v = T.log(phi(g))
            if v is None:
                return (0.0,) * k
            return tuple(float(m * x) for x in np.atleast_1d(v))

        out.append(BlownMap(S, R, psi, SymmetricSubset(S, B_i), unit, a.label, m=m, parent=a))
    return out


def smallness_transfer(blown: BlownMap, H, delta: float) -> tuple:
    """``(small for (ψ, B_i), small for (φ, A_i))`` at the same tolerance."""
    return is_small_wrt(blown, H, delta), is_small_wrt(blown.parent, H, delta)


@dataclass(frozen=True)
class BlowupBoundsReport:
    index: int
    small_worst: float
    large_worst: float
    samples: int

    @property
    def ok(self) -> bool:
        return self.small_worst >= 0 and self.large_worst >= 0


def verify_blowup_bounds(blown_seq, delta: float, n_dirs: int = 16, n_scales: int = 40, seed: int = 0) -> list:
    """Check ``|v|_i <= delta ⇒ |ψ(exp v)| <= 3δ/2`` and
    ``|v|_i ∈ [δ, 1/δ] ⇒ |ψ(exp v)| >= δ/4`` on sampled algebra vectors.

    ``|v|_i = 1/τ(v)`` with τ the exit time of ``exp(t v)`` from ``B_i``;
    the source group must provide ``exp``. Slacks are positive when a bound
    holds.
    """
    from .escape import AlgebraDirection, tau_and_algebra_norm

    rng = np.random.default_rng(seed)
    out = []
    for i, b in enumerate(blown_seq):
        S = b.source
        dim = S.dim
        dirs = rng.normal(size=(n_dirs, dim))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        small_worst = large_worst = math.inf
        count = 0
        for u in dirs:
            res = tau_and_algebra_norm(AlgebraDirection(u), S, b.A_src, h=_algebra_step(S))
            if res.escapes is False:
                vals = [0.0]
                scales = np.linspace(0, 1 / delta, n_scales) * 4.0
            else:
                scales = np.linspace(0, 1 / delta, n_scales) * res.tau
            for s in scales:
                v = s * u
                norm_v = s / res.tau if res.escapes else 0.0
                y = np.linalg.norm(b.phi(S.exp(v)))
                count += 1
                if norm_v <= delta:
                    small_worst = min(small_worst, 1.5 * delta - y)
                if delta <= norm_v <= 1 / delta:
                    large_worst = min(large_worst, y - delta / 4)
        out.append(BlowupBoundsReport(i, small_worst, large_worst, count))
    return out


def _algebra_step(S) -> float:
    return getattr(S, "algebra_step", 1e-3)


# ---------------------------------------------------------------------------
# ε-continuity


@dataclass(frozen=True)
class ContinuityReport:
    eps: float
    rho: float
    worst_modulus: float
    witness: object
    passed: bool


def check_eps_continuity(a: ApproximationMap, n: int, eps: float, budget: int = BUDGET, seed: int = 0) -> ContinuityReport:
    """For every ``p`` in ``A_i^n``: the largest ``r`` such that points of
    ``A_i^n`` within ``r`` of ``p`` map within ``eps`` of ``φ(p)``.

    Passes when every modulus exceeds the radius ``rho`` of the source's
    smallest open sets (``1.5 * resolution``; any positive value for a
    discrete source).
    """
    S, T = a.source, a.target
    pts = power_sets(S, a.A_src.members, n, budget, seed)[n][0]
    imgs = [a.phi(g) for g in pts]
    rho = NEIGHBOR_FACTOR * getattr(S, "resolution", 0.0)
    worst, wit = math.inf, None
    for p, y in zip(pts, imgs):
        mod = math.inf
        for x, z in zip(pts, imgs):
            if T.dist(z, y) >= eps:
                mod = min(mod, S.dist(x, p))
        if mod < worst:
            worst, wit = mod, p
    passed = worst > rho if rho > 0 else worst > 0
    return ContinuityReport(eps, rho, worst, wit, passed)
