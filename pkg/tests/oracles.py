"""Independent brute-force oracles used to cross-check the library's searches.

They share no search code with the package: relations are enumerated as
bitmasks and feasibility is evaluated from the definition's bullets
directly.
"""

from __future__ import annotations

from itertools import combinations, permutations, product

import numpy as np

from egh_lab.metric import FiniteMetricSpace, validate_metric

CAP = 0.2


def pointed_spaces(max_points=4, values=(1, 2, 3), scale=1.0):
    """Every pointed metric space with at most ``max_points`` points and the
    given distance values, one representative per pointed isometry class."""
    out, seen = [], set()
    for n in range(1, max_points + 1):
        idx = list(combinations(range(n), 2))
        for choice in product(values, repeat=len(idx)):
            d = np.zeros((n, n))
            for (i, j), v in zip(idx, choice):
                d[i, j] = d[j, i] = v
            if validate_metric(d):
                continue
            for p in range(n):
                key = min(
                    tuple(d[np.ix_(perm, perm)].ravel())
                    for perm in permutations(range(n))
                    if perm[0] == p
                )
                if (n, key) in seen:
                    continue
                seen.add((n, key))
                out.append(FiniteMetricSpace(d * scale, p))
    return out


def _subset_max(values_by_bit, nbits):
    """``out[mask] = max over set bits k of values_by_bit[k]`` (-inf for 0)."""
    out = np.full(1 << nbits, -np.inf)
    for k in range(nbits):
        lo = 1 << k
        out[lo : 2 * lo] = np.maximum(out[:lo], values_by_bit[k])
    return out


def _subset_min(values_by_bit, nbits):
    out = np.full((1 << nbits,) + np.shape(values_by_bit[0]), np.inf)
    for k in range(nbits):
        lo = 1 << k
        out[lo : 2 * lo] = np.minimum(out[:lo], values_by_bit[k])
    return out


def _relation_tables(mX, mY):
    nX, nY = mX.n, mY.n
    pairs = [(x, y) for x in range(nX) for y in range(nY)]
    K = len(pairs)
    PD = np.array([[abs(mX.dist[a, c] - mY.dist[b, d]) for c, d in pairs] for a, b in pairs])
    # dis[mask] by adding the highest bit last
    dis = np.zeros(1 << K)
    for k in range(K):
        lo = 1 << k
        inc = _subset_max(PD[k, :k], k) if k else np.full(1, -np.inf)
        dis[lo : 2 * lo] = np.maximum(dis[:lo], np.maximum(inc, 0.0))
    # D[mask, x, y] = min over pairs in mask of d(x, x') + d(y', y)
    chains = [mX.dist[:, a][:, None] + mY.dist[b, :][None, :] for a, b in pairs]
    D = _subset_min(chains, K)
    return dis, D


def _critical(mX, mY):
    vals = list(mX.dist[mX.basepoint]) + list(mY.dist[mY.basepoint])
    cuts = sorted({1.0 / v for v in vals if v > 0 and 1.0 / v < CAP})
    pts = [0.0] + cuts + [CAP]
    return list(zip(pts[:-1], pts[1:]))


def pointed_oracle(mX: FiniteMetricSpace, mY: FiniteMetricSpace) -> float:
    """Least ε over every relation and its glued metric, capped at 1/5."""
    dis, D = _relation_tables(mX, mY)
    dis, D = dis[1:], D[1:]
    p, q = mX.basepoint, mY.basepoint
    best = CAP
    for a, b in _critical(mX, mY):
        e = b / 2 if a == 0 else (a + b) / 2
        BX = np.nonzero(mX.dist[p] < 1 / e)[0]
        BY = np.nonzero(mY.dist[q] < 1 / e)[0]
        sub = D[:, BX][:, :, BY]
        M = np.maximum(np.maximum(sub.min(axis=2).max(axis=1), sub.min(axis=1).max(axis=1)), D[:, p, q])
        need = dis / 2 + M
        ok = need < b
        if ok.any():
            best = min(best, max(a, float(need[ok].min())))
    return best


def _mismatch_all(D, G, H, SX, SY):
    """``out[r, g, h] = max over SX x SY of |D_r[x, y] - D_r[g x, h y]|``."""
    base = D[:, SX][:, :, SY]
    out = np.zeros((D.shape[0], len(G), len(H)))
    for i, g in enumerate(G):
        gx = np.asarray(g)[SX]
        for j, h in enumerate(H):
            hy = np.asarray(h)[SY]
            moved = D[:, gx][:, :, hy]
            out[:, i, j] = np.abs(moved - base).reshape(D.shape[0], -1).max(axis=1)
    return out


_MASKS = {}


def map_pair_masks(nX, nY, p, q):
    """Bitmasks of all relations ``{(p,q)} ∪ graph(f) ∪ graph(g)^T`` for maps
    ``f: X -> Y`` and ``g: Y -> X``; bit ``x * nY + y`` encodes ``(x, y)``."""
    key = (nX, nY, p, q)
    if key not in _MASKS:
        fs = np.array(list(product(range(nY), repeat=nX)), dtype=np.int64).reshape(-1, nX)
        gs = np.array(list(product(range(nX), repeat=nY)), dtype=np.int64).reshape(-1, nY)
        fm = np.bitwise_or.reduce(1 << (np.arange(nX) * nY + fs), axis=1)
        gm = np.bitwise_or.reduce(1 << (gs * nY + np.arange(nY)), axis=1)
        masks = (fm[:, None] | gm[None, :]).ravel() | (1 << (p * nY + q))
        _MASKS[key] = np.unique(masks)
    return _MASKS[key]


def equivariant_oracle(tX, tY, family="map_pairs") -> float:
    """Least ε over a relation family (glued metric) and every choice of φ, ψ.

    ``family="all"`` ranges over every non-empty relation; ``"map_pairs"``
    over relations built from a pair of maps plus the basepoint pair. Both
    assume every point lies in the ``1/(3ε)`` balls for ε below 1/5, which
    holds for spaces of diameter below 5/3.
    """
    mX, mY = tX.space, tY.space
    G, H = tX.group.elements, tY.group.elements
    dis, D = _relation_tables(mX, mY)
    if family == "all":
        dis, D = dis[1:], D[1:]
    else:
        masks = map_pair_masks(mX.n, mY.n, mX.basepoint, mY.basepoint)
        dis, D = dis[masks], D[masks]
    p, q = mX.basepoint, mY.basepoint
    vals = list(mX.dist[p]) + list(mY.dist[q])
    vals += [mX.dist[g[p], p] for g in G] + [mY.dist[h[q], q] for h in H]
    cuts = {1.0 / v for v in vals if v > 0} | {1.0 / (3 * v) for v in vals if v > 0}
    pts = [0.0] + sorted(c for c in cuts if c < CAP) + [CAP]
    best = CAP
    for a, b in zip(pts[:-1], pts[1:]):
        e = b / 2 if a == 0 else (a + b) / 2
        BX = np.nonzero(mX.dist[p] < 1 / e)[0]
        BY = np.nonzero(mY.dist[q] < 1 / e)[0]
        SX = np.nonzero(mX.dist[p] < 1 / (3 * e))[0]
        SY = np.nonzero(mY.dist[q] < 1 / (3 * e))[0]
        ag = [i for i, g in enumerate(G) if mX.dist[g[p], p] < 1 / (3 * e)]
        ah = [j for j, h in enumerate(H) if mY.dist[h[q], q] < 1 / (3 * e)]
        sub = D[:, BX][:, :, BY]
        M = np.maximum(np.maximum(sub.min(axis=2).max(axis=1), sub.min(axis=1).max(axis=1)), D[:, p, q])
        mis = _mismatch_all(D, G, H, SX, SY)
        delta = np.maximum(mis[:, ag, :].min(axis=2).max(axis=1), mis[:, :, ah].min(axis=1).max(axis=1))
        need = np.maximum(dis / 2 + M, delta)
        ok = need < b
        if ok.any():
            best = min(best, max(a, float(need[ok].min())))
    return best


def cyclic_escape_oracle(n: int, b: int, s: int) -> float:
    """Escape norm of ``s`` in ``Z/n`` for the interval ``A = {-b, ..., b}``.

    While ``|s| < n - 2b`` the first power outside ``A`` is ``⌊b/|s|⌋ + 1``
    (no wrap-around can land back in the interval); otherwise the powers
    are walked one by one until they leave ``A`` or return to 0.
    """
    s = s % n
    c = s - n if s > n // 2 else s
    if c == 0 or 2 * b + 1 >= n:
        return 0.0
    if abs(c) < n - 2 * b:
        return 1.0 / (b // abs(c) + 1)
    x = 0
    for j in range(1, n + 1):
        x = (x + s) % n
        if x == 0:
            return 0.0
        if min(x, n - x) > b:
            return 1.0 / j
    return 0.0
