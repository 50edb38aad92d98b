"""Antipodally symmetric triangulations of spheres and a zero finder for odd
piecewise-affine maps.

The sphere ``S^{n-1}`` is triangulated as the boundary of the cross-polytope
``{|x|_1 = 1}`` with each facet cut into ``N^{n-1}`` Freudenthal simplices,
``N = 2**s``. A vertex is stored by its integer key ``w`` with
``|w|_1 = N``; the antipode of ``w`` is ``-w``, so symmetry is exact.
Affine interpolation happens on the polytope and is carried to the round
sphere by radial projection.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations, permutations, product

import numpy as np
from scipy.optimize import nnls

from .metric import DomainError

ZERO_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class SymmetricTriangulation:
    n: int  # ambient dimension; the sphere is S^{n-1}
    N: int
    keys: np.ndarray  # integer vertex keys, |w|_1 = N
    simplices: np.ndarray  # (count, n) vertex indices
    antipode: np.ndarray

    @property
    def dim(self) -> int:
        return self.n - 1

    @property
    def vertices(self) -> np.ndarray:
        """Unit vectors on the round sphere."""
        k = self.keys.astype(float)
        return k / np.linalg.norm(k, axis=1, keepdims=True)

    @property
    def polytope_vertices(self) -> np.ndarray:
        return self.keys / self.N

    def _diam(self, pts) -> float:
        best = 0.0
        for a, b in combinations(range(self.n), 2):
            best = max(best, float(np.linalg.norm(pts[self.simplices[:, a]] - pts[self.simplices[:, b]], axis=1).max()))
        return best

    @property
    def mesh(self) -> float:
        """Largest chordal simplex diameter on the round sphere."""
        return self._diam(self.vertices)

    @property
    def polytope_mesh(self) -> float:
        return self._diam(self.polytope_vertices)

    def edges(self) -> np.ndarray:
        out = set()
        for a, b in combinations(range(self.n), 2):
            for u, v in zip(self.simplices[:, a], self.simplices[:, b]):
                out.add((min(u, v), max(u, v)))
        return np.array(sorted(out))

    def to_dict(self) -> dict:
        return {
            "vertices": self.vertices.tolist(),
            "keys": self.keys.tolist(),
            "simplices": self.simplices.tolist(),
            "antipode": self.antipode.tolist(),
        }


def _facet_cells(n: int, N: int) -> list:
    """Freudenthal simplices of ``{k >= 0, sum k = N}`` as lists of k-vectors."""
    if n == 1:
        return [[(N,)]]
    d = n - 1
    cells = []
    for base in product(range(N), repeat=d):
        for perm in permutations(range(d)):
            y = list(base)
            path = [tuple(y)]
            for j in perm:
                y[j] += 1
                path.append(tuple(y))
            if all(all(0 <= p[0] and all(p[j] <= p[j + 1] for j in range(d - 1)) and p[-1] <= N for p in [q]) for q in path):
                cells.append([_to_k(q, N) for q in path])
    return cells


def _to_k(y, N):
    k = [y[0]] + [y[j] - y[j - 1] for j in range(1, len(y))] + [N - y[-1]]
    return tuple(k)


def build_triangulation(n: int, subdivisions: int) -> SymmetricTriangulation:
    if n < 2 or subdivisions < 0:
        raise DomainError("need n >= 2 and subdivisions >= 0")
    N = 2**subdivisions
    cells = _facet_cells(n, N)
    index, keys, simplices = {}, [], []
    for sigma in product((1, -1), repeat=n):
        for cell in cells:
            idx = []
            for k in cell:
                w = tuple(s * a for s, a in zip(sigma, k))
                if w not in index:
                    index[w] = len(keys)
                    keys.append(w)
                idx.append(index[w])
            simplices.append(tuple(idx))
    # a lattice point with a zero coordinate is generated from several sign
    # vectors; duplicates collapse through the key index above
    simplices = sorted(set(simplices))
    keys_arr = np.array(keys, dtype=np.int64)
    anti = np.array([index[tuple(-a for a in w)] for w in keys], dtype=np.int64)
    tri = SymmetricTriangulation(n, N, keys_arr, np.array(simplices, dtype=np.int64), anti)
    return tri


def check_triangulation(tri: SymmetricTriangulation) -> list:
    """Problems with the complex; empty when it is a closed symmetric pseudomanifold."""
    out = []
    if not np.array_equal(tri.keys[tri.antipode], -tri.keys):
        out.append("antipode is not negation")
    simp = {tuple(sorted(s)) for s in tri.simplices.tolist()}
    anti = {tuple(sorted(tri.antipode[list(s)].tolist())) for s in simp}
    if anti != simp:
        out.append("simplex set is not closed under the antipode")
    faces = Counter()
    for s in simp:
        for f in combinations(s, tri.n - 1):
            faces[f] += 1
    bad = [f for f, c in faces.items() if c != 2]
    if bad:
        out.append(f"{len(bad)} codimension-one faces not shared by exactly two simplices")
    return out


# ---------------------------------------------------------------------------
# odd samples


@dataclass(frozen=True, eq=False)
class OddMapSample:
    tri: SymmetricTriangulation
    values: np.ndarray  # (vertices, k)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        if v.shape[0] != len(self.tri.keys):
            raise DomainError("one value per vertex is required")
        if not np.array_equal(v[self.tri.antipode], -v):
            raise DomainError("values are not odd: f(-x) != -f(x) at some vertex")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def k(self) -> int:
        return self.values.shape[1]


def _representatives(tri):
    """One vertex from each antipodal pair: the first nonzero key coordinate is positive."""
    keys = tri.keys
    first = keys[np.arange(len(keys)), np.argmax(keys != 0, axis=1)]
    return first > 0


def odd_sample(tri: SymmetricTriangulation, f) -> OddMapSample:
    """Sample ``f`` on representatives and negate onto antipodes (exactly odd)."""
    reps = _representatives(tri)
    pts = tri.vertices
    vals = np.array([np.atleast_1d(f(x)) for x in pts], dtype=float)
    vals[~reps] = -vals[tri.antipode[~reps]]
    return OddMapSample(tri, vals)


def random_odd_sample(tri: SymmetricTriangulation, k: int, rng, kind: str = "normal") -> OddMapSample:
    reps = _representatives(tri)
    m = len(tri.keys)
    if kind == "normal":
        vals = rng.normal(size=(m, k))
    elif kind == "sign":
        vals = rng.choice([-1.0, 1.0], size=(m, k))
    else:
        raise DomainError(f"unknown sample kind {kind!r}")
    vals[~reps] = -vals[tri.antipode[~reps]]
    return OddMapSample(tri, vals)


def continuity_modulus(sample: OddMapSample) -> tuple:
    """``(eps_est, delta_est)``: largest value jump along an edge, shortest edge."""
    e = sample.tri.edges()
    diff = np.linalg.norm(sample.values[e[:, 0]] - sample.values[e[:, 1]], axis=1)
    pts = sample.tri.vertices
    length = np.linalg.norm(pts[e[:, 0]] - pts[e[:, 1]], axis=1)
    return float(diff.max()), float(length.min())


# ---------------------------------------------------------------------------
# piecewise-affine extension


def locate(tri: SymmetricTriangulation, x):
    """Simplex row and barycentric weights of the polytope point over ``x``."""
    x = np.asarray(x, dtype=float)
    n, N = tri.n, tri.N
    sigma = np.where(x >= 0, 1, -1)
    a = np.abs(x) / np.abs(x).sum() * N
    if n == 1:
        raise DomainError("dimension must be at least 2")
    y = np.clip(np.cumsum(a)[:-1], 0.0, N)
    base = np.minimum(np.floor(y).astype(int), N - 1)
    frac = y - base
    # on ties step the later coordinate first so the path keeps y nondecreasing
    order = np.lexsort((-np.arange(len(frac)), -frac))
    path_y = [base.copy()]
    cur = base.copy()
    for j in order:
        cur = cur.copy()
        cur[j] += 1
        path_y.append(cur)
    # barycentric weights of the Kuhn simplex: differences of sorted fractions
    fs = np.concatenate([[1.0], frac[order], [0.0]])
    lam = fs[:-1] - fs[1:]
    keys = [tuple(int(s * c) for s, c in zip(sigma, _to_k(tuple(p), N))) for p in path_y]
    lookup = _key_index(tri)
    verts = [lookup[k] for k in keys]
    return verts, lam


_KEY_CACHE: dict = {}


def _key_index(tri):
    ident = id(tri)
    hit = _KEY_CACHE.get(ident)
    if hit is None or hit[0] is not tri:
        hit = (tri, {tuple(k): i for i, k in enumerate(tri.keys.tolist())})
        _KEY_CACHE.clear()
        _KEY_CACHE[ident] = hit
    return hit[1]


def evaluate(sample: OddMapSample, x) -> np.ndarray:
    """The piecewise-affine extension at sphere point ``x``."""
    verts, lam = locate(sample.tri, x)
    return lam @ sample.values[verts]


@dataclass(frozen=True)
class NearZeroWitness:
    x0: np.ndarray
    value: np.ndarray
    simplex: tuple
    weights: np.ndarray
    vertex: int
    vertex_value: np.ndarray
    eps_est: float

    @property
    def value_norm(self) -> float:
        return float(np.linalg.norm(self.value))

    @property
    def vertex_norm(self) -> float:
        return float(np.linalg.norm(self.vertex_value))

    def to_dict(self) -> dict:
        return {"x0": self.x0.tolist(), "value": self.value.tolist(), "simplex": list(self.simplex),
                "value_norm": self.value_norm, "vertex_norm": self.vertex_norm, "eps_est": self.eps_est}


class InvariantViolation(RuntimeError):
    """The complex admits an odd sample without a zero; it must be broken."""


def _candidates(sample: OddMapSample) -> np.ndarray:
    F = sample.values[sample.tri.simplices]  # (S, n, k)
    ok = np.all((F.min(axis=1) <= 0) & (F.max(axis=1) >= 0), axis=1)
    return np.nonzero(ok)[0]


def find_near_zero(sample: OddMapSample) -> NearZeroWitness:
    """A zero of the piecewise-affine extension, found simplex by simplex.

    Each candidate simplex is tested for ``λ >= 0, Σλ = 1, Σ λ_j f_j = 0``
    by non-negative least squares; the witness with the smallest residual
    is returned.
    """
    tri = sample.tri
    if tri.n - 1 < sample.k:
        raise DomainError(
            f"sphere dimension {tri.n - 1} is below target dimension {sample.k}; an odd map needs n > k to vanish"
        )
    eps, _ = continuity_modulus(sample)
    best = None
    scale = max(1.0, float(np.abs(sample.values).max()))
    for s in _candidates(sample):
        idx = tri.simplices[s]
        F = sample.values[idx]
        M = np.vstack([F.T / scale, np.ones(tri.n)])
        rhs = np.zeros(sample.k + 1)
        rhs[-1] = 1.0
        lam, _ = nnls(M, rhs)
        lam = lam / lam.sum()
        val = lam @ F
        r = float(np.linalg.norm(val))
        if best is None or r < best[0]:
            best = (r, s, lam, val)
            if r == 0.0:
                break
    if best is None or best[0] > ZERO_TOL:
        raise InvariantViolation("no simplex carries a zero of the odd extension")
    r, s, lam, val = best
    idx = tri.simplices[s]
    p = lam @ tri.polytope_vertices[idx]
    x0 = p / np.linalg.norm(p)
    v = int(idx[int(np.argmax(lam))])
    return NearZeroWitness(x0, val, tuple(int(i) for i in idx), lam, v, sample.values[v].copy(), eps)


def zero_simplices(sample: OddMapSample, tol: float = 1e-12) -> list:
    """Simplices whose affine piece vanishes at an interior point (``k = n - 1``)."""
    tri = sample.tri
    if sample.k != tri.n - 1:
        raise DomainError("zero counting needs k = n - 1")
    F = sample.values[tri.simplices]  # (S, n, k)
    S = F.shape[0]
    M = np.concatenate([np.transpose(F, (0, 2, 1)), np.ones((S, 1, tri.n))], axis=1)
    rhs = np.zeros((S, tri.n))
    rhs[:, -1] = 1.0
    det = np.linalg.det(M)
    good = np.abs(det) > tol
    lam = np.full((S, tri.n), -1.0)
    lam[good] = np.linalg.solve(M[good], rhs[good][..., None])[..., 0]
    return [int(s) for s in np.nonzero(np.all(lam > tol, axis=1))[0]]


def antipodal_zero_pairs(sample: OddMapSample) -> int:
    zs = zero_simplices(sample)
    tri = sample.tri
    keyset = {tuple(sorted(tri.simplices[s].tolist())) for s in zs}
    pairs = {frozenset([k, tuple(sorted(tri.antipode[list(k)].tolist()))]) for k in keyset}
    return len(pairs)


@dataclass(frozen=True)
class SmallImageVerdict:
    contradiction: bool
    min_vertex_norm: float
    eps_est: float
    rho: float
    zero_found: bool


def certify_no_small_image(sample: OddMapSample, rho: float) -> SmallImageVerdict:
    """Contradiction iff every vertex value exceeds ``rho`` in norm although a
    zero exists and ``2 eps_est < rho``."""
    eps, _ = continuity_modulus(sample)
    mn = float(np.linalg.norm(sample.values, axis=1).min())
    try:
        find_near_zero(sample)
        found = True
    except InvariantViolation:
        found = False
    return SmallImageVerdict(found and mn > rho and 2 * eps < rho, mn, eps, rho, found)
