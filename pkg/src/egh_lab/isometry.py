"""Isometries of finite metric spaces as permutation tuples.

A permutation ``g`` sends point ``x`` to ``g[x]``; composition is
``(g * h)[x] = g[h[x]]`` so that ``g * h`` acts by ``h`` first.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .metric import TAU_METRIC, DomainError, FiniteMetricSpace, StructureError, validate_metric

GROUP_CAP = 10080


class ResourceError(RuntimeError):
    """A search or closure exceeded its configured size cap."""


def identity_perm(n: int) -> tuple:
    return tuple(range(n))


def compose(g: tuple, h: tuple) -> tuple:
    return tuple(g[x] for x in h)


def inverse(g: tuple) -> tuple:
    out = [0] * len(g)
    for x, gx in enumerate(g):
        out[gx] = x
    return tuple(out)


def is_isometry(m: FiniteMetricSpace, perm, tol: float = TAU_METRIC) -> bool:
    perm = tuple(perm)
    if sorted(perm) != list(range(m.n)):
        return False
    idx = np.asarray(perm)
    return bool(np.abs(m.dist[np.ix_(idx, idx)] - m.dist).max() <= tol)


def displacement(m: FiniteMetricSpace, g: tuple, x: int | None = None) -> float:
    """``d(gx, x)``; the basepoint is used when ``x`` is omitted."""
    x = m.basepoint if x is None else x
    return float(m.dist[g[x], x])


def dp_distance_perm(m: FiniteMetricSpace, g: tuple, h: tuple) -> float:
    """Exact ``inf_r (1/r + sup_{x in B_r(p)} d(gx, hx))`` for permutations of ``m``.

    For ``r`` in ``(rho_k, rho_{k+1}]`` the open ball is the closed ball of
    radius ``rho_k``, so each interval contributes ``1/rho_{k+1} + s_k``; the
    tail ``r -> inf`` contributes ``s_K`` without being attained.
    """
    if g == h:
        return 0.0
    row = m.dist[m.basepoint]
    disp = m.dist[np.asarray(g), np.asarray(h)]
    radii = np.unique(row)
    best = np.inf
    s = 0.0
    for k, rho in enumerate(radii):
        s = max(s, float(disp[row == rho].max()))
        if k + 1 < len(radii):
            best = min(best, 1.0 / radii[k + 1] + s)
    return float(min(best, s))


@dataclass(frozen=True, eq=False)
class IsometryGroup:
    """A finite group of isometries, stored as its full element list.

    Also implements the abstract group interface used by the approximation
    checker: ``identity``, ``mul``, ``inv``, ``dist`` (the d_p metric) and
    ``resolution`` (the neighbourhood radius used by condition V; 0 turns
    that check off).
    """

    space: FiniteMetricSpace
    elements: tuple
    generators: tuple = field(default=())
    resolution: float = 0.0

    def __post_init__(self):
        elems = tuple(sorted(set(tuple(g) for g in self.elements)))
        e = identity_perm(self.space.n)
        if e not in elems:
            raise DomainError("group must contain the identity")
        elems = (e,) + tuple(g for g in elems if g != e)
        object.__setattr__(self, "elements", elems)
        object.__setattr__(self, "generators", tuple(tuple(g) for g in self.generators))
        object.__setattr__(self, "_index", {g: i for i, g in enumerate(elems)})

    # container protocol
    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, g):
        return tuple(g) in self._index

    @property
    def order(self) -> int:
        return len(self.elements)

    # group interface
    @property
    def identity(self) -> tuple:
        return self.elements[0]

    def mul(self, g, h):
        return compose(g, h)

    def inv(self, g):
        return inverse(g)

    def dist(self, g, h) -> float:
        return dp_distance_perm(self.space, g, h)

    def norm(self, g) -> float:
        return self.dist(g, self.identity)

    def key(self, g):
        return self._index[tuple(g)]

    def displacement(self, g) -> float:
        return displacement(self.space, g)

    def net(self, radius, spacing=None):
        return [g for g in self.elements if self.norm(g) < radius]

    def neighbors(self, g, rho, within=None):
        pool = self.elements if within is None else within
        return [h for h in pool if self.dist(g, h) < rho]

    def is_closed(self) -> bool:
        return all(compose(g, h) in self._index for g in self.elements for h in self.elements)

    def to_dict(self) -> dict:
        gens = self.generators or self.elements[1:]
        return {"gens": [list(g) for g in gens], "elements": [list(g) for g in self.elements]}


def full_isometry_group(m: FiniteMetricSpace, cap: int = GROUP_CAP, tol: float = TAU_METRIC) -> IsometryGroup:
    """All distance-preserving permutations, by backtracking.

    Candidates for the image of ``x`` must share its sorted distance profile
    and match distances to every already-placed point.
    """
    n = m.n
    d = m.dist
    profiles = [np.sort(d[i]) for i in range(n)]
    same = [[y for y in range(n) if np.abs(profiles[x] - profiles[y]).max() <= tol] for x in range(n)]
    found = []
    img = [-1] * n
    used = [False] * n

    def place(x):
        if x == n:
            found.append(tuple(img))
            if len(found) > cap:
                raise ResourceError(f"isometry group exceeds cap {cap}")
            return
        for y in same[x]:
            if used[y]:
                continue
            if any(abs(d[y, img[w]] - d[x, w]) > tol for w in range(x)):
                continue
            img[x] = y
            used[y] = True
            place(x + 1)
            used[y] = False
        img[x] = -1

    place(0)
    return IsometryGroup(m, tuple(found), generators=tuple(g for g in found if g != identity_perm(n)))


def closure(m: FiniteMetricSpace, gens, cap: int = GROUP_CAP) -> IsometryGroup:
    """Smallest group containing ``gens`` (breadth-first products)."""
    gens = [tuple(g) for g in gens]
    for g in gens:
        if not is_isometry(m, g):
            raise DomainError(f"generator {g} is not an isometry")
    e = identity_perm(m.n)
    seen = {e}
    queue = deque([e])
    while queue:
        g = queue.popleft()
        for s in gens:
            h = compose(s, g)
            if h not in seen:
                seen.add(h)
                if len(seen) > cap:
                    raise ResourceError(f"closure exceeds cap {cap}")
                queue.append(h)
    return IsometryGroup(m, tuple(seen), generators=tuple(gens))


def dp_distance(G: IsometryGroup, g, h) -> float:
    if g not in G or h not in G:
        raise DomainError("elements must belong to the group")
    return dp_distance_perm(G.space, tuple(g), tuple(h))


def orbit(G: IsometryGroup, x: int) -> frozenset:
    return frozenset(g[x] for g in G.elements)


def orbits(G: IsometryGroup) -> list:
    """Orbits ordered by their smallest point."""
    out, seen = [], set()
    for x in range(G.space.n):
        if x not in seen:
            o = orbit(G, x)
            seen |= o
            out.append(tuple(sorted(o)))
    return out


def quotient(m: FiniteMetricSpace, G: IsometryGroup) -> FiniteMetricSpace:
    """Orbit space with ``d([x],[y]) = min`` over orbit representatives."""
    orbs = orbits(G)
    k = len(orbs)
    d = np.zeros((k, k))
    for a in range(k):
        for b in range(a + 1, k):
            d[a, b] = d[b, a] = m.dist[np.ix_(orbs[a], orbs[b])].min()
    base = next(a for a, o in enumerate(orbs) if m.basepoint in o)
    labels = ["{" + ",".join(m.label(x) for x in o) + "}" for o in orbs]
    q = FiniteMetricSpace(d, base, labels)
    bad = validate_metric(q)
    if bad:
        raise DomainError(f"quotient is not a metric: {bad[0]}")
    return q


@dataclass(frozen=True, eq=False)
class QuotientGroup:
    """``G/H`` as cosets, each acting on the orbit space ``X/H``.

    ``cosets[j]`` is a frozenset of permutations of X and ``action[j]`` the
    permutation it induces on orbits. The coset group may act non-faithfully;
    :meth:`image` gives the faithful isometry group of ``X/H``.
    """

    space: FiniteMetricSpace
    cosets: tuple
    action: tuple

    @property
    def order(self) -> int:
        return len(self.cosets)

    def image(self) -> IsometryGroup:
        return IsometryGroup(self.space, tuple(set(self.action)))


def normality_violation(G: IsometryGroup, H: IsometryGroup):
    """First ``(g, h, g h g^-1)`` with the conjugate outside H, or None."""
    gens_g = G.generators or G.elements
    gens_h = H.generators or H.elements
    for g in gens_g:
        gi = inverse(g)
        for h in gens_h:
            c = compose(compose(g, h), gi)
            if c not in H:
                return g, h, c
    return None


def is_normal(G: IsometryGroup, H: IsometryGroup) -> bool:
    return normality_violation(G, H) is None


def quotient_group(G: IsometryGroup, H: IsometryGroup) -> QuotientGroup:
    if any(h not in G for h in H.elements):
        raise DomainError("H is not a subgroup of G")
    bad = normality_violation(G, H)
    if bad is not None:
        g, h, c = bad
        raise DomainError(f"H is not normal in G: conjugating {h} by {g} gives {c}, which is not in H")
    orbs = orbits(H)
    where = {x: a for a, o in enumerate(orbs) for x in o}
    q = quotient(G.space, H)
    cosets, action, seen = [], [], set()
    for g in G.elements:
        if g in seen:
            continue
        coset = frozenset(compose(g, h) for h in H.elements)
        seen |= coset
        cosets.append(coset)
        action.append(tuple(where[g[o[0]]] for o in orbs))
    return QuotientGroup(q, tuple(cosets), tuple(action))


def subgroups(G: IsometryGroup, cap: int = 4096) -> list:
    """Every subgroup of a small group, as frozensets of elements.

    Grows subgroups by adjoining one element at a time to already-found
    subgroups; exhaustive because every subgroup is generated by a chain of
    such adjunctions.
    """
    return enumerate_subgroups(G.elements, G.identity, G.mul, cap=cap)


def enumerate_subgroups(elements, identity, mul, cap: int = 4096) -> list:
    elements = list(elements)

    def gen(base, extra):
        seen = set(base) | {identity}
        frontier = list(seen | {extra})
        seen.add(extra)
        gens = [extra] + list(base)
        queue = deque(frontier)
        while queue:
            a = queue.popleft()
            for s in gens:
                b = mul(a, s)
                if b not in seen:
                    seen.add(b)
                    queue.append(b)
        return frozenset(seen)

    found = {frozenset([identity])}
    frontier = [frozenset([identity])]
    while frontier:
        nxt = []
        for S in frontier:
            for g in elements:
                if g in S:
                    continue
                T = gen(S, g)
                if T not in found:
                    found.add(T)
                    nxt.append(T)
                    if len(found) > cap:
                        raise ResourceError(f"more than {cap} subgroups")
        frontier = nxt
    return sorted(found, key=len)


def _as_perm(n: int, g) -> tuple:
    if not isinstance(g, (list, tuple)) or any(isinstance(v, bool) or not isinstance(v, int) for v in g):
        raise StructureError(f"group element {g!r} must be a list of integers")
    if sorted(g) != list(range(n)):
        raise StructureError(f"group element {list(g)} is not a permutation of 0..{n - 1}")
    return tuple(g)


def group_from_json(m: FiniteMetricSpace, data: dict) -> IsometryGroup:
    if not isinstance(data, dict):
        raise StructureError("group record must be an object")
    for key in ("elements", "gens"):
        for g in data.get(key) or []:
            _as_perm(m.n, g)
    try:
        if data.get("elements"):
            elems = [tuple(int(v) for v in g) for g in data["elements"]]
            for g in elems:
                if not is_isometry(m, g):
                    raise DomainError(f"{g} is not an isometry")
            G = IsometryGroup(m, tuple(elems), tuple(tuple(g) for g in data.get("gens", [])))
            if not G.is_closed():
                raise DomainError("listed elements are not closed under composition")
            return G
        return closure(m, data.get("gens", []))
    except (TypeError, ValueError, IndexError) as exc:
        if isinstance(exc, DomainError):
            raise
        raise StructureError(f"malformed group record: {exc}") from exc
