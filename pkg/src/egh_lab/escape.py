"""Escape norms ``‖g‖_A``, the algebra quantity ``|v|_B = 1/τ(v)``, and the
convex-hull norm built from it.

``‖g‖_A = 1/(m+1)`` for the largest ``m`` with ``g^0, ..., g^m`` all in
``A``; it is 0 when the powers never leave ``A``. Groups that define
``power(g, j)`` are evaluated with it (exact for integer, ``Fraction`` and
cyclic elements); otherwise powers are accumulated with ``mul``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .metric import DomainError

M_CAP = 1_000_000
TAU_RTOL = 1e-6
TAU_STEP = 1e-3
TAU_HORIZON = 10.0
SANDWICH_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class EscapeNormContext:
    group: object
    A: object
    m_cap: int = M_CAP

    def __post_init__(self):
        if self.m_cap < 1:
            raise DomainError("m_cap must be at least 1")


def _same(x, y) -> bool:
    if isinstance(x, np.ndarray) or isinstance(y, np.ndarray):
        return bool(np.array_equal(x, y))
    return x == y


def escape_run(ctx: EscapeNormContext, g):
    """Largest ``m`` with ``g^j ∈ A`` for ``j <= m``; ``None`` if the powers never leave."""
    G, A = ctx.group, ctx.A
    e = G.identity
    power = getattr(G, "power", None)
    x = e
    for j in range(1, ctx.m_cap + 1):
        x = power(g, j) if power is not None else G.mul(x, g)
        if not A.contains(x):
            return j - 1
        if _same(x, e):
            return None
    return None


def escape_norm(ctx: EscapeNormContext, g) -> float:
    run = escape_run(ctx, g)
    return 0.0 if run is None else 1.0 / (run + 1)


def norm_table(ctx: EscapeNormContext, elements=None) -> list:
    """``(element, norm)`` rows over ``elements`` (default: every group element)."""
    elems = ctx.group.elements if elements is None else elements
    return [(g, escape_norm(ctx, g)) for g in elems]


def zero_set(ctx: EscapeNormContext) -> frozenset:
    """Elements of norm zero (only members of ``A`` can qualify)."""
    pool = getattr(ctx.A, "members", None)
    if pool is None:
        pool = ctx.group.elements
    if pool is None:
        raise DomainError("zero_set needs a finite group or finite subset")
    return frozenset(g for g in pool if escape_run(ctx, g) is None)


def zero_set_anomaly(ctx: EscapeNormContext, Z=None):
    """First pair of zero-norm elements whose product has positive norm, or None."""
    Z = zero_set(ctx) if Z is None else Z
    G = ctx.group
    for a in Z:
        for b in Z:
            if G.mul(a, b) not in Z:
                return a, b
    return None


# ---------------------------------------------------------------------------
# algebra directions and exit times


@dataclass(frozen=True)
class AlgebraDirection:
    v: tuple

    def __post_init__(self):
        v = tuple(float(a) for a in np.atleast_1d(self.v))
        if not all(math.isfinite(a) for a in v):
            raise DomainError("direction must have finite coordinates")
        object.__setattr__(self, "v", v)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.v)


@dataclass(frozen=True)
class TauResult:
    tau: float
    escapes: bool
    norm: float


def tau_and_algebra_norm(direction: AlgebraDirection, group, B, h: float = TAU_STEP,
                         horizon: float = TAU_HORIZON, rtol: float = TAU_RTOL) -> TauResult:
    """Exit time of ``t -> exp(t v)`` from ``B`` and ``|v|_B = 1/τ``.

    Walks ``t = h, 2h, ...`` up to ``horizon`` (both measured in arc length
    ``t|v|``, so ``τ(λv) = τ(v)/λ`` up to ``rtol``) and bisects the first
    bracket to relative width ``rtol``. No exit within the horizon gives ``τ = inf``
    with ``escapes = False`` and norm 0.
    """
    v = direction.array
    if not np.any(v):
        return TauResult(math.inf, False, 0.0)
    speed = float(np.linalg.norm(v))
    h, horizon = h / speed, horizon / speed
    inside = lambda t: B.contains(group.exp(t * v))  # noqa: E731
    lo = 0.0
    steps = int(math.ceil(horizon / h))
    hi = None
    for k in range(1, steps + 1):
        t = k * h
        if not inside(t):
            hi = t
            break
        lo = t
    if hi is None:
        return TauResult(math.inf, False, 0.0)
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if inside(mid):
            lo = mid
        else:
            hi = mid
    tau = hi
    return TauResult(tau, True, 1.0 / tau)


def algebra_norm(group, B, v, **kw) -> float:
    return tau_and_algebra_norm(AlgebraDirection(v), group, B, **kw).norm


@dataclass(frozen=True)
class LimsupReport:
    target: float
    rows: tuple  # (m, t, escape norm, ratio)
    max_error: float
    upper_ok: bool
    lower_ok: bool
    within_bound: bool


def check_limsup_formula(direction: AlgebraDirection, group, B, ms, tau: float | None = None,
                         grid: float = 0.0, tol: float = 1e-12, **kw) -> LimsupReport:
    """Compare ``‖exp(t v)‖_B / t`` with ``|v|_B`` along ``t = τ/m``.

    ``t`` is the realized parameter ``|log exp(t v)| / |v|`` when the group
    has a chart, so grid groups are measured at the grid point they actually
    reach. Checks the two one-sided bounds
    ``|v|_B · m/(m+1) <= ratio <= |v|_B`` (up to ``grid`` times the target)
    and that every error is at most ``max(1/m, grid)`` times the target.
    """
    res = tau_and_algebra_norm(direction, group, B, **kw) if tau is None else TauResult(tau, True, 1.0 / tau)
    ctx = EscapeNormContext(group, B)
    v = direction.array
    vnorm = float(np.linalg.norm(v))
    rows = []
    if not res.escapes:
        for m in ms:
            t = 1.0 / m
            rows.append((m, t, escape_norm(ctx, group.exp(t * v)), 0.0))
        worst = max((abs(r[3]) for r in rows), default=0.0)
        ok = all(r[2] == 0.0 for r in rows)
        return LimsupReport(0.0, tuple(rows), worst, ok, ok, ok)
    target = res.norm
    upper = lower = within = True
    worst = 0.0
    for m in ms:
        t = res.tau / m
        # a Fraction τ keeps exact coordinates for groups whose exp allows it
        g = group.exp([t * Fraction(a) for a in direction.v] if isinstance(t, Fraction) else t * v)
        lg = group.log(g) if hasattr(group, "log") else None
        t_real = float(np.linalg.norm(lg)) / vnorm if lg is not None else t
        nrm = escape_norm(ctx, g)
        ratio = nrm / t_real
        err = abs(ratio - target)
        worst = max(worst, err)
        slack = target * (grid + tol)
        upper &= ratio <= target + slack
        lower &= ratio >= target * m / (m + 1) - slack
        within &= err <= target * (max(1.0 / m, grid) + tol)
        rows.append((m, t_real, nrm, ratio))
    return LimsupReport(target, tuple(rows), worst, upper, lower, within)


# ---------------------------------------------------------------------------
# Gleason constant and quasi-norm


@dataclass(frozen=True)
class GleasonEstimate:
    c0: float
    samples: int
    violations: tuple  # words with zero denominator and nonzero numerator
    worst_word: tuple | None


def estimate_gleason_constant(ctx: EscapeNormContext, words) -> GleasonEstimate:
    """``max ‖g_1⋯g_m‖ / Σ‖g_j‖`` over the words: a lower bound for any valid C₀."""
    G = ctx.group
    best, arg, bad, count = 0.0, None, [], 0
    for w in words:
        w = tuple(w)
        prod = G.identity
        for g in w:
            prod = G.mul(prod, g)
        num = escape_norm(ctx, prod)
        den = sum(escape_norm(ctx, g) for g in w)
        if den == 0:
            if num > 0:
                bad.append(w)
            continue
        count += 1
        if num / den > best:
            best, arg = num / den, w
    return GleasonEstimate(best, count, tuple(bad), arg)


def all_words(elements, max_len: int):
    for k in range(1, max_len + 1):
        yield from product(elements, repeat=k)


@dataclass(frozen=True)
class QuasinormReport:
    c0: float
    min_slack: float
    tuples: int
    ok: bool


def check_quasinorm(norm, tuples, c0: float) -> QuasinormReport:
    """``|Σ v_j| <= 2 C₀ Σ |v_j|`` for each tuple; ``norm`` evaluates ``|·|``."""
    worst, count = math.inf, 0
    for tup in tuples:
        vs = [np.atleast_1d(np.asarray(v, dtype=float)) for v in tup]
        lhs = norm(np.sum(vs, axis=0))
        rhs = 2 * c0 * sum(norm(v) for v in vs)
        worst = min(worst, rhs - lhs)
        count += 1
    return QuasinormReport(c0, worst, count, worst >= -SANDWICH_RTOL * max(1.0, abs(worst)))


def quasinorm_constant(norm, tuples) -> float:
    """Smallest ``C₀`` making ``|Σ v_j| <= 2 C₀ Σ |v_j|`` hold on the tuples."""
    best = 0.0
    for tup in tuples:
        vs = [np.atleast_1d(np.asarray(v, dtype=float)) for v in tup]
        den = sum(norm(v) for v in vs)
        if den > 0:
            best = max(best, norm(np.sum(vs, axis=0)) / (2 * den))
    return best


# ---------------------------------------------------------------------------
# convex-hull norm


@dataclass(frozen=True, eq=False)
class ConvexHullNorm:
    """``2 C₀`` times the Minkowski gauge of the hull of sampled unit-set points.

    ``points`` are ``u/|u|`` for the sampled directions with ``|u| > 0``; the
    gauge of their convex hull is at most ``|·|`` on those directions, and
    scaling by ``2 C₀`` gives the sandwich ``|v| <= ‖v‖ <= 2 C₀ |v|``.
    """

    points: np.ndarray
    c0: float
    equations: np.ndarray = field(repr=False)

    def gauge(self, v) -> float:
        v = np.atleast_1d(np.asarray(v, dtype=float))
        if self.equations.shape[1] == 2 and self.points.shape[1] == 1:
            lo, hi = self.equations[0, 0], self.equations[0, 1]
            x = v[0]
            return x / hi if x >= 0 else x / lo
        normal, offset = self.equations[:, :-1], self.equations[:, -1]
        return float(max(0.0, np.max(normal @ v / -offset)))

    def __call__(self, v) -> float:
        return 2 * self.c0 * self.gauge(v)

    def caratheodory_tuple(self, v):
        """Hull vertices and convex weights writing ``v / gauge(v)`` (for C₀ audits)."""
        v = np.atleast_1d(np.asarray(v, dtype=float))
        g = self.gauge(v)
        w = v / g
        from scipy.optimize import nnls

        M = np.vstack([self.points.T, np.ones(len(self.points))])
        lam, _ = nnls(M, np.append(w, 1.0))
        keep = lam > 1e-12
        return self.points[keep], lam[keep]


def _hull_equations(points: np.ndarray) -> np.ndarray:
    k = points.shape[1]
    if k == 1:
        x = points[:, 0]
        lo, hi = float(x.min()), float(x.max())
        if not (lo < 0 < hi):
            raise DomainError("degenerate hull: the unit set does not surround 0 on the line")
        return np.array([[lo, hi]])
    _, s, vt = np.linalg.svd(points - points.mean(axis=0))
    if s[-1] <= 1e-12 * max(1.0, s[0]):
        raise DomainError(f"degenerate hull: no extent along {np.round(vt[-1], 6).tolist()}")
    try:
        hull = ConvexHull(points)
    except QhullError as exc:  # pragma: no cover - guarded by the rank test above
        raise DomainError(f"degenerate hull: {exc}") from exc
    eq = hull.equations
    if np.any(eq[:, -1] >= 0):
        raise DomainError("degenerate hull: origin is not interior")
    return eq


def convex_hull_norm(directions, norm, c0: float | None = None) -> ConvexHullNorm:
    """Build the hull norm from sampled directions and the evaluator ``norm = |·|``.

    Directions with ``|u| = 0`` (unbounded unit set) are rejected. When
    ``c0`` is omitted it is the smallest value for which the sandwich holds
    on the sampled directions, i.e. the quasi-norm ratio of their
    Carathéodory tuples.
    """
    dirs = [np.atleast_1d(np.asarray(u, dtype=float)) for u in directions]
    pts = []
    for u in dirs:
        n = norm(u)
        if n <= 0:
            raise DomainError(f"direction {u.tolist()} never escapes; the unit set is unbounded")
        pts.append(u / n)
    pts = np.array(pts)
    eq = _hull_equations(pts)
    probe = ConvexHullNorm(pts, 1.0, eq)
    if c0 is None:
        c0 = max(0.5, max(norm(u) / (2 * probe.gauge(u)) for u in dirs))
    return ConvexHullNorm(pts, float(c0), eq)


@dataclass(frozen=True)
class SandwichReport:
    c0: float
    lower_slack: float  # min ‖v‖ - |v|
    upper_slack: float  # min 2C₀|v| - ‖v‖
    count: int
    ok: bool


def check_sandwich(hn: ConvexHullNorm, norm, directions) -> SandwichReport:
    lo = hi = math.inf
    count = 0
    for u in directions:
        u = np.atleast_1d(np.asarray(u, dtype=float))
        a, b = norm(u), hn(u)
        tol = SANDWICH_RTOL * max(1.0, a)
        lo = min(lo, b - a + tol)
        hi = min(hi, 2 * hn.c0 * a - b + tol)
        count += 1
    return SandwichReport(hn.c0, lo, hi, count, bool(lo >= 0 and hi >= 0))


# ---------------------------------------------------------------------------
# the factor-2 continuity bound


@dataclass(frozen=True)
class ContinuityBoundReport:
    hypothesis_holds: bool
    hypothesis_witness: object
    norm_g: float
    tail_liminf: float
    bound_holds: bool


def check_hypothesis(ctx: EscapeNormContext, candidates=None):
    """First ``h ∈ cl(A)^3 \\ A`` with ``h^2 ∈ cl(A)``, or None.

    Candidates default to the subset's ``outside()`` points, or to ``A^3``
    for finite subsets. For balls, candidates of norm above three radii are
    skipped (they lie outside ``cl(A)^3`` in the groups used here).
    """
    G, A = ctx.group, ctx.A
    if candidates is None:
        if hasattr(A, "outside"):
            candidates = A.outside()
        elif getattr(A, "members", None) is not None:
            mem = list(A.members)
            candidates = {G.mul(G.mul(a, b), c) for a in mem for b in mem for c in mem}
        else:
            raise DomainError("supply candidate elements for an infinite subset")
    radius = getattr(A, "radius", None)
    for h in candidates:
        if A.contains(h):
            continue
        if radius is not None and G.norm(h) > 3 * radius:
            continue
        if A.closure_contains(G.mul(h, h)):
            return h
    return None


def check_norm_continuity_bound(ctx: EscapeNormContext, g, g_seq, tail: int | None = None,
                                candidates=None) -> ContinuityBoundReport:
    """``‖g‖ <= 2 liminf ‖g_j‖`` with the liminf read off the last ``tail`` terms."""
    wit = check_hypothesis(ctx, candidates)
    seq = list(g_seq)
    tail = max(1, len(seq) // 2) if tail is None else tail
    ng = escape_norm(ctx, g)
    lim = min(escape_norm(ctx, x) for x in seq[-tail:])
    return ContinuityBoundReport(wit is None, wit, ng, lim, ng <= 2 * lim)
