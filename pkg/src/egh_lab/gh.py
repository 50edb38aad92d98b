"""Pointed and equivariant Gromov-Hausdorff distances between finite triples.

Feasibility of an ε-approximation is decided exactly for one family of
cross metrics: given a relation ``R`` between the balls ``B_{1/ε}(p)`` and
``B_{1/ε}(q)``, glue ``X`` and ``Y`` by

    d̄(x, y) = r + min over (x', y') in R of d(x, x') + d(y', y),

with ``r = dis(R)/2`` (or any small positive ``r`` when ``dis(R) = 0``).
The displacement bullet does not depend on ``r``, so for fixed ``R`` the
feasible ε form a union of half-open intervals whose left ends are
computable. Feasibility is not monotone in ε (the ball radii shrink as ε
grows), so instead of bisecting we scan the finitely many intervals on
which every ball and every admissible group element is constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .isometry import IsometryGroup, compose, identity_perm, inverse
from .metric import DomainError, FiniteMetricSpace, StructureError, validate_metric

EPS_CAP = 0.2
WITNESS_STEP = 1e-6
POINTED_EXACT_MAX = 8
EQUIVARIANT_EXACT_MAX = 6
EQUIVARIANT_GROUP_MAX = 24


@dataclass(frozen=True, eq=False)
class MetricTriple:
    """A pointed finite space with a group of isometries (trivial by default)."""

    space: FiniteMetricSpace
    group: IsometryGroup | None = None

    def __post_init__(self):
        G = self.group
        if G is None:
            G = IsometryGroup(self.space, (identity_perm(self.space.n),))
        elif G.space.n != self.space.n:
            raise StructureError("group acts on a space of different size")
        object.__setattr__(self, "group", G)

    @property
    def basepoint(self) -> int:
        return self.space.basepoint

    def to_dict(self) -> dict:
        return {"space": self.space.to_dict(), "group": self.group.to_dict()}

    @classmethod
    def from_dict(cls, data: dict) -> "MetricTriple":
        from .isometry import group_from_json

        if "space" not in data:
            raise StructureError("triple record needs a 'space' entry")
        m = FiniteMetricSpace.from_dict(data["space"])
        g = data.get("group")
        return cls(m, group_from_json(m, g) if g else None)


@dataclass(frozen=True)
class Correspondence:
    """A relation between two finite spaces with its cached distortion."""

    relation: frozenset
    distortion: float

    @classmethod
    def from_pairs(cls, mX: FiniteMetricSpace, mY: FiniteMetricSpace, pairs) -> "Correspondence":
        pairs = frozenset((int(x), int(y)) for x, y in pairs)
        if not pairs:
            raise DomainError("empty relation")
        return cls(pairs, relation_distortion(mX, mY, pairs))

    def covers(self, xs, ys) -> bool:
        return set(xs) <= {x for x, _ in self.relation} and set(ys) <= {y for _, y in self.relation}


@dataclass(frozen=True, eq=False)
class EpsApproximation:
    """An ε-approximation: cross distances ``cross[x, y] = d̄(x, y)`` and maps φ, ψ."""

    eps: float
    source: MetricTriple
    target: MetricTriple
    cross: np.ndarray
    phi: dict
    psi: dict
    relation: frozenset = field(default=frozenset())

    def union_metric(self) -> np.ndarray:
        dX, dY = self.source.space.dist, self.target.space.dist
        return np.block([[dX, self.cross], [self.cross.T, dY]])


@dataclass(frozen=True, eq=False)
class GHResult:
    value: float
    mode: str  # "exact" or "bounds"
    lower: float
    upper: float
    witness: EpsApproximation | None = None
    correspondence: Correspondence | None = None

    def to_dict(self) -> dict:
        out = {"eps": self.value, "mode": self.mode, "lower": self.lower, "upper": self.upper}
        if self.correspondence is not None:
            out["witness"] = {
                "relation": sorted(list(p) for p in self.correspondence.relation),
                "distortion": self.correspondence.distortion,
            }
            if self.witness is not None:
                out["witness"]["eps"] = self.witness.eps
        return out


def relation_distortion(mX, mY, pairs) -> float:
    pairs = list(pairs)
    xs = np.array([x for x, _ in pairs])
    ys = np.array([y for _, y in pairs])
    return float(np.abs(mX.dist[np.ix_(xs, xs)] - mY.dist[np.ix_(ys, ys)]).max())


def chain_matrix(mX, mY, pairs) -> np.ndarray:
    """``D[x, y] = min over (x', y') in pairs of d(x, x') + d(y', y)``."""
    pairs = list(pairs)
    xs = [x for x, _ in pairs]
    ys = [y for _, y in pairs]
    return (mX.dist[:, xs][:, None, :] + mY.dist[ys, :].T[None, :, :]).min(axis=2)


def cross_metric(mX, mY, pairs, r: float) -> np.ndarray:
    if r <= 0:
        raise DomainError("gluing constant must be positive")
    return r + chain_matrix(mX, mY, pairs)


def _open_ball(m: FiniteMetricSpace, center: int, r: float) -> np.ndarray:
    return np.nonzero(m.dist[center] < r)[0]


# ---------------------------------------------------------------------------
# validation of the definition


def validate_approximation(appr: EpsApproximation, tol: float = 0.0) -> list:
    """Every failed bullet of the definition, as human-readable strings."""
    eps = appr.eps
    out = []
    if not 0 < eps <= EPS_CAP:
        out.append(f"eps={eps} outside (0, 1/5]")
        return out
    mX, mY = appr.source.space, appr.target.space
    p, q = mX.basepoint, mY.basepoint
    cross = appr.cross
    bad = validate_metric(appr.union_metric())
    if bad:
        out.append(f"d̄ is not a metric: {bad[0]}")
    BX, BY = _open_ball(mX, p, 1 / eps), _open_ball(mY, q, 1 / eps)
    sub = cross[np.ix_(BX, BY)]
    miss_x = BX[sub.min(axis=1) >= eps - tol]
    miss_y = BY[sub.min(axis=0) >= eps - tol]
    if len(miss_x):
        out.append(f"point {int(miss_x[0])} of X has no partner within eps")
    if len(miss_y):
        out.append(f"point {int(miss_y[0])} of Y has no partner within eps")
    if cross[p, q] >= eps - tol:
        out.append(f"d̄(p, q) = {cross[p, q]} is not below eps")
    G, H = appr.source.group, appr.target.group
    SX, SY = _open_ball(mX, p, 1 / (3 * eps)), _open_ball(mY, q, 1 / (3 * eps))
    base = cross[np.ix_(SX, SY)]
    for g in G.elements:
        if mX.dist[g[p], p] < 1 / (3 * eps):
            h = appr.phi[g]
            gap = np.abs(base - cross[np.ix_(np.asarray(g)[SX], np.asarray(h)[SY])]).max()
            if gap >= eps - tol:
                out.append(f"phi fails the displacement bound at g={g} (gap {gap:.6g})")
                break
    for h in H.elements:
        if mY.dist[h[q], q] < 1 / (3 * eps):
            g = appr.psi[h]
            gap = np.abs(base - cross[np.ix_(np.asarray(g)[SX], np.asarray(h)[SY])]).max()
            if gap >= eps - tol:
                out.append(f"psi fails the displacement bound at h={h} (gap {gap:.6g})")
                break
    return out


def check_almost_morphism(appr: EpsApproximation, g1, g2, y: int) -> float:
    """``7ε - d(φ(g1 g2) y, φ(g1) φ(g2) y)``; non-negative for valid approximations."""
    eps = appr.eps
    mX, mY = appr.source.space, appr.target.space
    p, q = mX.basepoint, mY.basepoint
    g1, g2 = tuple(g1), tuple(g2)
    G = appr.source.group
    if g1 not in G or g2 not in G:
        raise DomainError("g1 and g2 must belong to the source group")
    lim = 1 / (6 * eps)
    if not (mX.dist[g1[p], p] < lim and mX.dist[g2[p], p] < lim):
        raise DomainError("g1 and g2 must displace the basepoint by less than 1/(6 eps)")
    if not mY.dist[y, q] < 1 / (12 * eps):
        raise DomainError("y must lie in the ball of radius 1/(12 eps) about q")
    phi = appr.phi
    a = phi[compose(g1, g2)][y]
    b = compose(phi[g1], phi[g2])[y]
    return 7 * eps - float(mY.dist[a, b])


def almost_morphism_slacks(appr: EpsApproximation) -> list:
    """Slack of every admissible ``(g1, g2, y)``."""
    eps = appr.eps
    mX, mY = appr.source.space, appr.target.space
    p, q = mX.basepoint, mY.basepoint
    adm = [g for g in appr.source.group.elements if mX.dist[g[p], p] < 1 / (6 * eps)]
    ys = _open_ball(mY, q, 1 / (12 * eps))
    return [check_almost_morphism(appr, a, b, int(y)) for a in adm for b in adm for y in ys]


# ---------------------------------------------------------------------------
# interval structure


def _critical_eps(values) -> list:
    out = {1.0 / v for v in values if v > 0 and 1.0 / v < EPS_CAP}
    return sorted(out)


def _intervals(cuts, lo: float = 0.0, hi: float = EPS_CAP) -> list:
    pts = [lo] + [c for c in sorted(set(cuts)) if lo < c < hi] + [hi]
    return list(zip(pts[:-1], pts[1:]))


def _ball_mid(m: FiniteMetricSpace, a: float, b: float, scale: float = 1.0) -> list:
    eps = (a + b) / 2 if a > 0 else b / 2
    row = m.dist[m.basepoint]
    return [int(x) for x in np.argsort(row, kind="stable") if row[x] < 1.0 / (scale * eps)]


def _admissible(G: IsometryGroup, a: float, b: float) -> list:
    eps = (a + b) / 2 if a > 0 else b / 2
    m = G.space
    p = m.basepoint
    return [g for g in G.elements if m.dist[g[p], p] < 1.0 / (3 * eps)]


# ---------------------------------------------------------------------------
# relation search


def _map_pair_relations(mX, mY, BX, BY, limit):
    """Yield ``(pairs, dis)`` for every relation ``{(p,q)} ∪ graph(f) ∪ graph(g)^T``
    between the balls with distortion strictly below ``limit()``.

    ``limit`` is re-read at every node so callers can tighten it while
    iterating (branch and bound).
    """
    dX, dY = mX.dist, mY.dist
    p, q = mX.basepoint, mY.basepoint
    rowX, rowY = dX[p], dY[q]
    xs, ys = list(BX), list(BY)
    cand_x = {x: sorted(BY, key=lambda y: (abs(rowX[x] - rowY[y]), y)) for x in xs}
    cand_y = {y: sorted(BX, key=lambda x: (abs(rowX[x] - rowY[y]), x)) for y in ys}
    seen = set()

    pairs = [(p, q)]
    members = {(p, q)}

    def step(i, dis):
        if dis >= limit():
            return
        if i == len(xs) + len(ys):
            key = frozenset(members)
            if key not in seen:
                seen.add(key)
                yield key, dis
            return
        if i < len(xs):
            x = xs[i]
            options = [(x, y) for y in cand_x[x]]
        else:
            y = ys[i - len(xs)]
            options = [(x, y) for x in cand_y[y]]
        for x, y in options:
            if (x, y) in members:
                yield from step(i + 1, dis)
                continue
            inc = max(abs(dX[x, a] - dY[y, b]) for a, b in pairs)
            nd = max(dis, inc)
            if nd >= limit():
                continue
            pairs.append((x, y))
            members.add((x, y))
            yield from step(i + 1, nd)
            pairs.pop()
            members.discard((x, y))

    yield from step(0, 0.0)


def _mismatch(D, G_elems, H_elems, SX, SY):
    """``M[g, h] = max over x in SX, y in SY of |D[x,y] - D[gx, hy]|``."""
    gx = np.array([np.asarray(g)[SX] for g in G_elems])  # |G| x |SX|
    hy = np.array([np.asarray(h)[SY] for h in H_elems])  # |H| x |SY|
    base = D[np.ix_(SX, SY)]
    moved = D[gx[:, None, :, None], hy[None, :, None, :]]  # |G| x |H| x |SX| x |SY|
    return np.abs(moved - base[None, None]).max(axis=(2, 3))


def _equivariant_defect(D, tX, tY, adm_g, adm_h, SX, SY):
    """Least Δ over choices of φ, ψ, together with the maps attaining it."""
    G, H = tX.group.elements, tY.group.elements
    M = _mismatch(D, G, H, SX, SY)
    gi = {g: k for k, g in enumerate(G)}
    hi = {h: k for k, h in enumerate(H)}
    delta = 0.0
    phi, psi = {}, {}
    for g in adm_g:
        row = M[gi[g]]
        k = int(np.argmin(row))
        phi[g] = H[k]
        delta = max(delta, float(row[k]))
    for h in adm_h:
        col = M[:, hi[h]]
        k = int(np.argmin(col))
        psi[h] = G[k]
        delta = max(delta, float(col[k]))
    return delta, phi, psi


def _eq_subintervals(tX, tY, a, b):
    """Split ``[a, b)`` where the ``1/(3ε)`` balls or admissible sets change."""
    mX, mY = tX.space, tY.space
    vals = list(mX.dist[mX.basepoint]) + list(mY.dist[mY.basepoint])
    vals += [mX.dist[g[mX.basepoint], mX.basepoint] for g in tX.group.elements]
    vals += [mY.dist[h[mY.basepoint], mY.basepoint] for h in tY.group.elements]
    cuts = {1.0 / (3 * v) for v in vals if v > 0}
    return _intervals([c for c in cuts if a < c < b], a, b)


def _find_pointed_isometry(mX, mY, tol=1e-9):
    """A basepoint-preserving isometry ``X -> Y`` as a list, or None."""
    if mX.n != mY.n:
        return None
    dX, dY = mX.dist, mY.dist
    prof_x = [np.sort(dX[i]) for i in range(mX.n)]
    prof_y = [np.sort(dY[i]) for i in range(mY.n)]
    order = [mX.basepoint] + [x for x in np.argsort(dX[mX.basepoint], kind="stable") if x != mX.basepoint]
    img = {}
    used = set()

    def place(k):
        if k == len(order):
            return True
        x = order[k]
        cands = [mY.basepoint] if k == 0 else range(mY.n)
        for y in cands:
            if y in used or np.abs(prof_x[x] - prof_y[y]).max() > tol:
                continue
            if any(abs(dX[x, w] - dY[y, img[w]]) > tol for w in img):
                continue
            img[x] = y
            used.add(y)
            if place(k + 1):
                return True
            del img[x]
            used.discard(y)
        return False

    if not place(0):
        return None
    return [img[x] for x in range(mX.n)]


def _conjugating_isometry(tX, tY):
    """An isometry σ with σ G σ⁻¹ = H, searched among all pointed isometries."""
    mX, mY = tX.space, tY.space
    sigma = _find_pointed_isometry(mX, mY)
    if sigma is None or tX.group.order != tY.group.order:
        return None
    # try every pointed isometry X -> Y: sigma composed with stabiliser elements of Iso(X)
    from .isometry import full_isometry_group

    iso = full_isometry_group(mX)
    Hset = set(tY.group.elements)
    p = mX.basepoint
    for k in iso.elements:
        if k[p] != p:
            continue
        s = tuple(compose(tuple(sigma), k))
        si = inverse(s)
        if all(compose(compose(s, g), si) in Hset for g in tX.group.elements):
            return s
    return None


def _isometric_witness(tX, tY, s) -> EpsApproximation:
    eps = WITNESS_STEP
    mX, mY = tX.space, tY.space
    pairs = frozenset((x, s[x]) for x in range(mX.n))
    cross = cross_metric(mX, mY, pairs, eps / 2)
    si = inverse(s)
    phi = {g: compose(compose(s, g), si) for g in tX.group.elements}
    psi = {h: compose(compose(si, h), s) for h in tY.group.elements}
    return EpsApproximation(eps, tX, tY, cross, phi, psi, pairs)


def _build_witness(tX, tY, pairs, dis, eps, phi=None, psi=None) -> EpsApproximation:
    mX, mY = tX.space, tY.space
    r = dis / 2 if dis > 0 else eps / 2
    cross = cross_metric(mX, mY, pairs, r)
    if phi is None:
        phi = {}
    if psi is None:
        psi = {}
    eH, eG = tY.group.identity, tX.group.identity
    phi = {g: phi.get(g, eH) for g in tX.group.elements}
    psi = {h: psi.get(h, eG) for h in tY.group.elements}
    return EpsApproximation(eps, tX, tY, cross, phi, psi, frozenset(pairs))


def _witness_eps(inf, lo, hi, strict_ok):
    """A feasible ε in the interval whose infimum is ``inf``."""
    if strict_ok:
        return inf
    return inf + min((hi - inf) / 2, WITNESS_STEP)


def _search(tX: MetricTriple, tY: MetricTriple, equivariant: bool):
    """Exact least ε over the map-pair family; returns (value, witness, corr)."""
    mX, mY = tX.space, tY.space
    crit = _critical_eps(list(mX.dist[mX.basepoint]) + list(mY.dist[mY.basepoint]))
    best = [EPS_CAP]
    found = None
    for a, b in _intervals(crit):
        if a >= best[0]:
            break
        BX, BY = _ball_mid(mX, a, b), _ball_mid(mY, a, b)
        if not equivariant:
            for pairs, dis in _map_pair_relations(mX, mY, BX, BY, lambda: 2 * min(best[0], b)):
                val = max(a, dis / 2)
                if val < best[0] and val < b:
                    best[0] = val
                    found = (pairs, dis, a, b, a > dis / 2 and a > 0, None, None)
            continue
        subs = [(lo, hi, _ball_mid(mX, lo, hi, 3), _ball_mid(mY, lo, hi, 3),
                 _admissible(tX.group, lo, hi), _admissible(tY.group, lo, hi)) for lo, hi in _eq_subintervals(tX, tY, a, b)]
        for pairs, dis in _map_pair_relations(mX, mY, BX, BY, lambda: 2 * min(best[0], b)):
            D = chain_matrix(mX, mY, pairs)
            for lo, hi, SX, SY, ag, ah in subs:
                if max(lo, dis / 2) >= min(best[0], hi):
                    continue
                delta, phi, psi = _equivariant_defect(D, tX, tY, ag, ah, SX, SY)
                val = max(lo, dis / 2, delta)
                if val < best[0] and val < hi:
                    best[0] = val
                    strict = lo > 0 and lo > dis / 2 and lo > delta
                    found = (pairs, dis, lo, hi, strict, phi, psi)
    if found is None:
        return EPS_CAP, None, None
    pairs, dis, lo, hi, strict, phi, psi = found
    eps_w = _witness_eps(best[0], lo, hi, strict)
    witness = _build_witness(tX, tY, pairs, dis, eps_w, phi, psi)
    return best[0], witness, Correspondence(frozenset(pairs), dis)


# ---------------------------------------------------------------------------
# bounds beyond the exact regime


def _radial_lower(mX, mY) -> float:
    """Lower bound: any relation must match radial profiles within the distortion."""
    crit = _critical_eps(list(mX.dist[mX.basepoint]) + list(mY.dist[mY.basepoint]))
    rowX, rowY = mX.dist[mX.basepoint], mY.dist[mY.basepoint]
    best = EPS_CAP
    for a, b in _intervals(crit):
        BX, BY = _ball_mid(mX, a, b), _ball_mid(mY, a, b)
        gap = np.abs(rowX[BX][:, None] - rowY[BY][None, :])
        need = max(gap.min(axis=1).max(), gap.min(axis=0).max()) / 2
        if need < b:
            best = min(best, max(a, need))
    return best


def _relation_value(tX, tY, pairs, equivariant) -> float:
    """Least ε in ``(0, 1/5)`` at which this fixed relation works, else 1/5."""
    mX, mY = tX.space, tY.space
    dis = relation_distortion(mX, mY, pairs)
    xs = {x for x, _ in pairs}
    ys = {y for _, y in pairs}
    crit = _critical_eps(list(mX.dist[mX.basepoint]) + list(mY.dist[mY.basepoint]))
    D = chain_matrix(mX, mY, pairs) if equivariant else None
    for a, b in _intervals(crit):
        BX, BY = _ball_mid(mX, a, b), _ball_mid(mY, a, b)
        if not (set(BX) <= xs and set(BY) <= ys):
            continue
        if not equivariant:
            if dis / 2 < b:
                return max(a, dis / 2)
            continue
        for lo, hi in _eq_subintervals(tX, tY, a, b):
            SX, SY = _ball_mid(mX, lo, hi, 3), _ball_mid(mY, lo, hi, 3)
            delta, _, _ = _equivariant_defect(D, tX, tY, _admissible(tX.group, lo, hi), _admissible(tY.group, lo, hi), SX, SY)
            val = max(lo, dis / 2, delta)
            if val < hi:
                return val
    return EPS_CAP


def _local_search_upper(tX, tY, equivariant, seed=0, iters=200) -> float:
    mX, mY = tX.space, tY.space
    rng = np.random.default_rng(seed)
    rowX, rowY = mX.dist[mX.basepoint], mY.dist[mY.basepoint]
    f = np.argmin(np.abs(rowX[:, None] - rowY[None, :]), axis=1)
    g = np.argmin(np.abs(rowX[:, None] - rowY[None, :]), axis=0)

    def value(f, g):
        pairs = {(mX.basepoint, mY.basepoint)} | {(x, int(f[x])) for x in range(mX.n)} | {(int(g[y]), y) for y in range(mY.n)}
        return _relation_value(tX, tY, pairs, equivariant)

    best = value(f, g)
    for _ in range(iters):
        f2, g2 = f.copy(), g.copy()
        if rng.random() < 0.5:
            f2[rng.integers(mX.n)] = rng.integers(mY.n)
        else:
            g2[rng.integers(mY.n)] = rng.integers(mX.n)
        v = value(f2, g2)
        if v <= best:
            best, f, g = v, f2, g2
    return best


# ---------------------------------------------------------------------------
# public entry points


def pointed_gh(mX: FiniteMetricSpace, mY: FiniteMetricSpace, exact_max: int = POINTED_EXACT_MAX) -> GHResult:
    tX, tY = MetricTriple(mX), MetricTriple(mY)
    s = _find_pointed_isometry(mX, mY)
    if s is not None:
        w = _isometric_witness(tX, tY, tuple(s))
        return GHResult(0.0, "exact", 0.0, 0.0, w, Correspondence(w.relation, 0.0))
    if max(mX.n, mY.n) <= exact_max or min(mX.n, mY.n) == 1:
        value, w, corr = _search(tX, tY, equivariant=False)
        value = float(value)
        return GHResult(value, "exact", value, value, w, corr)
    lo = _radial_lower(mX, mY)
    hi = _local_search_upper(tX, tY, False)
    return GHResult(hi, "bounds", min(lo, hi), hi)


def equivariant_gh(tX: MetricTriple, tY: MetricTriple, exact_max: int = EQUIVARIANT_EXACT_MAX,
                   group_max: int = EQUIVARIANT_GROUP_MAX) -> GHResult:
    s = _conjugating_isometry(tX, tY)
    if s is not None:
        w = _isometric_witness(tX, tY, s)
        return GHResult(0.0, "exact", 0.0, 0.0, w, Correspondence(w.relation, 0.0))
    small = max(tX.space.n, tY.space.n) <= exact_max and max(tX.group.order, tY.group.order) <= group_max
    if small or min(tX.space.n, tY.space.n) == 1:
        value, w, corr = _search(tX, tY, equivariant=True)
        value = float(value)
        return GHResult(value, "exact", value, value, w, corr)
    lo = _radial_lower(tX.space, tY.space)
    hi = _local_search_upper(tX, tY, True)
    return GHResult(hi, "bounds", min(lo, hi), hi)


# ---------------------------------------------------------------------------
# from approximations to good-approximation data


def displacement_spectrum(triple: MetricTriple) -> list:
    m = triple.space
    p = m.basepoint
    return sorted({float(m.dist[g[p], p]) for g in triple.group.elements})


def regular_radius(triple: MetricTriple, candidates) -> float:
    """Candidate farthest (in r) from every jump of ``r -> {g : d(gp,p) <= r}``.

    Jumps sit at the positive displacement values; when the family is not
    constant, 0 counts as a boundary too. Ties go to the smaller candidate;
    a constant family returns the first candidate.
    """
    candidates = list(candidates)
    if not candidates:
        raise DomainError("need at least one candidate radius")
    jumps = [s for s in displacement_spectrum(triple) if s > 0]
    if not jumps:
        return candidates[0]
    marks = np.array([0.0] + jumps)
    score = [(-float(np.abs(marks - r).min()), r) for r in candidates]
    return min(score)[1]


def displacement_subset(triple: MetricTriple, r0: float):
    from .groups import SymmetricSubset

    m = triple.space
    p = m.basepoint
    return SymmetricSubset(triple.group, frozenset(g for g in triple.group.elements if m.dist[g[p], p] < r0))


def induce_approximation(seq, r0: float) -> list:
    """ApproximationMap per index from ε-approximations into a common limit triple."""
    from .goodapprox import ApproximationMap

    eps = [a.eps for a in seq]
    if any(b > a + 1e-15 for a, b in zip(eps, eps[1:])):
        raise DomainError("eps values must be non-increasing along the sequence")
    out = []
    for appr in seq:
        A_src = displacement_subset(appr.source, r0)
        A_tgt = displacement_subset(appr.target, r0)
        out.append(ApproximationMap(appr.source.group, appr.target.group, dict(appr.phi), A_src, A_tgt))
    return out


def induce_from_maps(sources, limit: MetricTriple, phis, r0: float) -> list:
    """Same as :func:`induce_approximation` with explicitly supplied maps."""
    from .goodapprox import ApproximationMap

    A_tgt = displacement_subset(limit, r0)
    out = []
    for t, phi in zip(sources, phis):
        table = {g: phi(g) for g in t.group.elements} if callable(phi) else dict(phi)
        out.append(ApproximationMap(t.group, limit.group, table, displacement_subset(t, r0), A_tgt))
    return out


def dp_discrepancy(a) -> float:
    """``max |d_{p_i}(g, h) - d_p(φ(g), φ(h))|`` over ``g, h`` in the source neighbourhood."""
    elems = sorted(a.A_src.members)
    worst = 0.0
    for g in elems:
        for h in elems:
            worst = max(worst, abs(a.source.dist(g, h) - a.target.dist(a.phi(g), a.phi(h))))
    return worst
