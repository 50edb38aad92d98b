"""Deterministic scenario generators: the example families and the
discretized group sequences the checks run on.

Every generator is a pure function of its arguments. ``SCENARIOS`` maps a
name to a :class:`Scenario` with its default indices and declared verdicts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .gh import MetricTriple, displacement_subset, induce_from_maps
from .goodapprox import ApproximationMap
from .groups import (
    AbelianMod, BallSubset, CircleGroup, CyclicGroup, HeisenbergMod, IntegerGroup,
    LatticeGroup, ProductCyclic, SymmetricSubset, TorusGroup, VectorGroup,
)
from .isometry import IsometryGroup, full_isometry_group
from .metric import DomainError, FiniteMetricSpace, graph_metric

VERSION = 1
TWO_PI = 2 * math.pi

# ---------------------------------------------------------------------------
# hexagon graph

HEX_LABELS = ("a", "b", "c", "x", "y", "z")
HEX_EDGES = ((0, 3), (1, 4), (2, 5), (0, 1), (1, 2), (2, 0))
HEX_BC = (0, 2, 1, 3, 5, 4)  # the transposition (b c), which also swaps y and z
HEX_AB = (1, 0, 2, 4, 3, 5)
HEX_AC = (2, 1, 0, 5, 4, 3)
HEX_ROT = (1, 2, 0, 4, 5, 3)


def hexagon_graph(i: int) -> MetricTriple:
    """Triangle ``a b c`` with a pendant leaf on each corner, every edge of length ``i``,
    based at the leaf ``x`` and acted on by its full isometry group."""
    if i < 1:
        raise DomainError("i must be a positive integer")
    d = graph_metric(6, HEX_EDGES, [float(i)] * 6)
    m = FiniteMetricSpace(d, 3, HEX_LABELS)
    return MetricTriple(m, full_isometry_group(m))


def ray_triple(length: int, step: float = 1.0) -> MetricTriple:
    """Points ``0, step, ..., length*step`` of a half-line, based at 0, trivial group."""
    x = np.arange(length + 1) * step
    return MetricTriple(FiniteMetricSpace(np.abs(x[:, None] - x[None, :]), 0))


def hexagon_maps(indices, r0_factor: float = 1.0) -> list:
    """Trivial maps from the hexagon groups to the ray's trivial group, with
    ``A_i`` the elements moving the basepoint less than ``r0_factor * 3i``."""
    out = []
    for i in indices:
        t = hexagon_graph(i)
        limit = ray_triple(3)
        e = limit.group.identity
        out.extend(induce_from_maps([t], limit, [lambda g, e=e: e], r0_factor * 3 * i))
    return out


# ---------------------------------------------------------------------------
# collapsing spheres


def _dihedral_perms(k: int) -> list:
    rots = [tuple((x + s) % k for x in range(k)) for s in range(k)]
    refl = [tuple((s - x) % k for x in range(k)) for s in range(k)]
    return rots + refl


def _octahedral_rotations(keys: np.ndarray) -> list:
    """Signed permutation matrices of determinant 1, as permutations of ``keys``."""
    from itertools import permutations, product

    index = {tuple(k): j for j, k in enumerate(keys.tolist())}
    out = []
    for perm in permutations(range(3)):
        for signs in product((1, -1), repeat=3):
            M = np.zeros((3, 3), dtype=int)
            for r, c in enumerate(perm):
                M[r, c] = signs[r]
            if round(np.linalg.det(M)) != 1:
                continue
            img = keys @ M.T
            out.append(tuple(index[tuple(v)] for v in img.tolist()))
    return out


def _polygon_metric(k: int, radius: float) -> np.ndarray:
    """Arc distances on a regular k-gon, computed from the step count so
    that rotations and reflections preserve them exactly."""
    a = np.arange(k)
    steps = np.abs(a[:, None] - a[None, :])
    steps = np.minimum(steps, k - steps)
    table = TWO_PI * np.arange(k // 2 + 1) / k * radius
    return table[steps]


def collapsing_sphere(i: int, n: int = 1, mesh: int = 16) -> MetricTriple:
    """Symmetric sample of the round ``S^n`` of radius ``1/i`` with geodesic distances.

    ``n = 1``: the regular ``mesh``-gon with its dihedral group. ``n = 2``:
    the vertices of the cross-polytope triangulation with ``mesh`` segments
    per octahedron edge (a power of two), with the octahedral rotation group.
    """
    if i < 1:
        raise DomainError("i must be positive")
    if n == 1:
        if mesh < 3:
            raise DomainError("mesh must be at least 3")
        d = _polygon_metric(mesh, 1.0 / i)
        m = FiniteMetricSpace(d, 0)
        return MetricTriple(m, IsometryGroup(m, tuple(_dihedral_perms(mesh))))
    if n == 2:
        from .borsuk import build_triangulation

        if mesh < 1 or mesh & (mesh - 1):
            raise DomainError("for n = 2 the mesh must be a power of two")
        tri = build_triangulation(3, mesh.bit_length() - 1)
        pts = tri.vertices
        d = np.arccos(np.clip(pts @ pts.T, -1.0, 1.0)) / i
        np.fill_diagonal(d, 0.0)
        m = FiniteMetricSpace(d, 0)
        return MetricTriple(m, IsometryGroup(m, tuple(_octahedral_rotations(tri.keys))))
    raise DomainError("n must be 1 or 2")


def point_triple() -> MetricTriple:
    return MetricTriple(FiniteMetricSpace(np.zeros((1, 1)), 0))


def sphere_mesh_spacing(i: int, n: int = 1, mesh: int = 16) -> float:
    """Largest distance from a sample point to its nearest neighbour."""
    d = collapsing_sphere(i, n, mesh).space.dist.copy()
    np.fill_diagonal(d, np.inf)
    return float(d.min(axis=1).max())


# ---------------------------------------------------------------------------
# the five counterexamples


COUNTEREXAMPLES = ("I", "II", "III", "IV", "V")


def counterexample(which: str, i: int) -> ApproximationMap:
    """A finite or discretized sequence member failing exactly condition ``which``."""
    if i < 1:
        raise DomainError("i must be positive")
    if which == "I":
        # integers included in the line; the image {-1, 0, 1} misses most of (-1, 1)
        S, T = IntegerGroup(), VectorGroup(1)
        return ApproximationMap(S, T, lambda k: (float(k),), SymmetricSubset(S, frozenset({-1, 0, 1})),
                                BallSubset(T, 1.0), label=f"I:{i}")
    if which == "II":
        # identity of Z with A_i = {-i..i} but A = {-1, 0, 1}
        S = IntegerGroup()
        return ApproximationMap(S, S, lambda k: k, SymmetricSubset(S, frozenset(range(-i, i + 1))),
                                SymmetricSubset(S, frozenset({-1, 0, 1})), label=f"II:{i}")
    if which == "III":
        # the same triples read in a Heisenberg group and in an abelian group
        N = 2 * i + 1
        S, T = HeisenbergMod(N), AbelianMod(N)
        box = frozenset(tuple((x - 1) % N for x in v) for v in np.ndindex(3, 3, 3))
        return ApproximationMap(S, T, lambda g: g, SymmetricSubset(S, box), SymmetricSubset(T, box),
                                label=f"III:{i}")
    if which == "IV":
        # projection of a disk grid in the plane onto the first coordinate
        step = 1.0 / (4 * i)
        S, T = LatticeGroup(2, step), VectorGroup(1)
        disk = frozenset(S.net(1.0))
        return ApproximationMap(S, T, lambda g: (g[0] * step,), SymmetricSubset(S, disk), BallSubset(T, 1.0),
                                label=f"IV:{i}")
    if which == "V":
        # a sampled circle sent onto a rational circle by multiplication with n//2:
        # a homomorphism with dense image that tears every small neighbourhood apart
        n = 16 * i + 1
        q = 8 * i
        S = CyclicGroup(n, "arc", resolution=TWO_PI / n)
        T = CircleGroup()
        return ApproximationMap(S, T, lambda k: Fraction((q * k) % n, n), SymmetricSubset(S, frozenset(range(n))),
                                BallSubset(T, 4.0), label=f"V:{i}")
    raise DomainError(f"unknown counterexample {which!r}")


# ---------------------------------------------------------------------------
# cyclic towers


def cyclic_tower(p: int, i: int) -> ApproximationMap:
    """Identity of ``Z/p^i`` with the p-adic metric; every ``p^k Z`` is a ball."""
    if p < 2 or any(p % q == 0 for q in range(2, int(math.isqrt(p)) + 1)):
        raise DomainError("p must be prime")
    if i < 1:
        raise DomainError("i must be positive")
    G = CyclicGroup(p**i, "padic", p=p)
    return ApproximationMap(G, G, lambda g: g, SymmetricSubset(G, frozenset(G.elements)), BallSubset(G, 2.0),
                            label=f"tower:{p}^{i}")


def tower_radii(p: int, i: int) -> list:
    """Tolerance levels ``p^(1-k)``, ``k = 0..i``; the ball at level k is ``p^k Z``."""
    return [float(p) ** (1 - k) for k in range(0, i + 1)]


def tower_chain(p: int, i: int) -> list:
    """Orders of the subgroups ``p^k Z / p^i Z`` for ``k = i, ..., 0``."""
    return [p ** (i - k) for k in range(i, -1, -1)]


# ---------------------------------------------------------------------------
# torus collapse


def torus_collapse(i: int, grid: int = 16) -> MetricTriple:
    """Flat torus ``S^1(1) x S^1(1/i)`` on a ``grid x grid`` lattice with its translations.

    Point ``a * grid + b`` has angles ``(2 pi a/grid, 2 pi b/grid)``.
    """
    if grid < 8:
        raise DomainError("grid must be at least 8")
    a = np.arange(grid)
    da = np.abs(a[:, None] - a[None, :])
    arc = TWO_PI * np.minimum(da, grid - da) / grid
    # axes (a, b, a', b')
    d = np.sqrt(arc[:, None, :, None] ** 2 + (arc[None, :, None, :] / i) ** 2).reshape(grid * grid, grid * grid)
    m = FiniteMetricSpace(d, 0)
    elems = tuple(_torus_shift(grid, s, t) for s in range(grid) for t in range(grid))
    return MetricTriple(m, IsometryGroup(m, elems, generators=(_torus_shift(grid, 1, 0), _torus_shift(grid, 0, 1))))


def _torus_shift(grid: int, s: int, t: int) -> tuple:
    return tuple(((a + s) % grid) * grid + (b + t) % grid for a in range(grid) for b in range(grid))


def circle_triple(grid: int = 16, radius: float = 1.0) -> MetricTriple:
    """Regular ``grid``-gon on the circle of given radius with its rotations."""
    m = FiniteMetricSpace(_polygon_metric(grid, radius), 0)
    rots = tuple(tuple((x + s) % grid for x in range(grid)) for s in range(grid))
    return MetricTriple(m, IsometryGroup(m, rots, generators=(rots[1 % grid],)))


def second_factor(triple: MetricTriple, grid: int) -> IsometryGroup:
    return IsometryGroup(triple.space, tuple(_torus_shift(grid, 0, t) for t in range(grid)),
                         generators=(_torus_shift(grid, 0, 1),))


def torus_map(i: int, grid: int = 16, r0: float = 2.0) -> ApproximationMap:
    """Projection of the torus translations onto the circle rotations."""
    t = torus_collapse(i, grid)
    limit = circle_triple(grid)
    by_shift = {r[0]: r for r in limit.group.elements}

    def phi(g):
        return by_shift[g[0] // grid]

    return ApproximationMap(t.group, limit.group, phi, displacement_subset(t, r0), displacement_subset(limit, r0),
                            label=f"torus:{i}")


def cyclic_subgroups(G) -> list:
    """Subgroups generated by one element (enough to test maximality, since a
    subgroup of a small subgroup is small)."""
    out = set()
    for g in G.elements:
        H = {G.identity}
        x = g
        while x not in H:
            H.add(x)
            x = G.mul(x, g)
        out.add(frozenset(H))
    return sorted(out, key=len)


# ---------------------------------------------------------------------------
# fine groups for the blow-up


def rotation_map(i: int, base: int = 1024, arc: float = 1.0) -> ApproximationMap:
    """``Z/n -> S^1``, ``k -> k/n`` turns, ``n = base * i``; ``A_i`` the arc of half-angle ``arc``."""
    n = base * i
    S = CyclicGroup(n, "arc", resolution=TWO_PI / n)
    T = CircleGroup()
    A = frozenset(k for k in range(n) if S.norm(k) < arc)
    return ApproximationMap(S, T, lambda k: Fraction(k, n), SymmetricSubset(S, A), BallSubset(T, arc),
                            label=f"rotation:{i}")


def fine_torus_map(i: int, grid: int = 16, n1: int = 4096, arc: float = 1.0) -> ApproximationMap:
    """Projection ``Z/n1 x Z/grid -> S^1`` for the torus ``S^1(1) x S^1(1/i)``.

    The first factor is sampled finely (``n1`` points) so that the blow-up
    bullets hold at a useful scale; the second factor keeps the coarse grid.
    """
    unit1 = TWO_PI / n1
    unit2 = TWO_PI / grid / i

    def c(a, n):
        a %= n
        return a - n if a > n // 2 else a

    def metric(g, h):
        return math.hypot(unit1 * c(g[0] - h[0], n1), unit2 * c(g[1] - h[1], grid))

    def chart(g):
        return np.array([unit1 * c(g[0], n1), unit2 * c(g[1], grid)])

    def expmap(v):
        return (int(round(float(v[0]) / unit1)) % n1, int(round(float(v[1]) / unit2)) % grid)

    S = ProductCyclic(n1, grid, metric, chart, expmap, resolution=unit1)
    T = CircleGroup()
    A = frozenset((a, b) for a in range(n1) if unit1 * abs(c(a, n1)) < arc for b in range(grid))
    return ApproximationMap(S, T, lambda g: Fraction(g[0], n1), SymmetricSubset(S, A), BallSubset(T, arc),
                            label=f"fine-torus:{i}")


# ---------------------------------------------------------------------------
# algebra regions for the escape-norm checks


@dataclass(frozen=True, eq=False)
class RegionSubset:
    """Membership given by a predicate on the chart (``log``) coordinates."""

    group: object
    predicate: object = field(repr=False)
    label: str = ""

    def contains(self, g) -> bool:
        v = self.group.log(g)
        return v is not None and bool(self.predicate(np.asarray(v, dtype=float)))

    __contains__ = contains


def torus_cross(R: float = 1.0, r: float = 0.25) -> tuple:
    """``T^2`` with the non-convex plus-shaped region ``{|a|<R,|b|<r} ∪ {|a|<r,|b|<R}``."""
    T = TorusGroup((1.0, 1.0))

    def pred(v):
        a, b = abs(v[0]), abs(v[1])
        return (a < R and b < r) or (a < r and b < R)

    return T, RegionSubset(T, pred, f"cross({R},{r})")


# ---------------------------------------------------------------------------
# registry


@dataclass(frozen=True)
class Scenario:
    name: str
    indices: tuple
    kind: str  # "triple", "map" or "tower"
    expected: dict


SCENARIOS = {
    "hexagon": Scenario("hexagon", (1, 2, 4, 8), "triple",
                        {"order": 6, "small": [list(HEX_BC)], "normal": False, "failing": []}),
    "collapsing_sphere": Scenario("collapsing_sphere", (1, 2, 4, 8), "triple", {"monotone": True}),
    "torus_collapse": Scenario("torus_collapse", (2, 4, 8), "triple",
                               {"maximal_order": 16, "normal": True}),
    "cyclic_tower": Scenario("cyclic_tower", (1, 2, 3, 4, 5), "tower", {"stable": False}),
    "rotation": Scenario("rotation", (1, 2, 4), "map", {"failing": []}),
}
for _w in COUNTEREXAMPLES:
    SCENARIOS[f"counterexample_{_w}"] = Scenario(f"counterexample_{_w}", (10, 20), "map", {"failing": [_w]})


def scenario_map(name: str, i: int) -> ApproximationMap:
    if name.startswith("counterexample_"):
        return counterexample(name.split("_", 1)[1], i)
    if name == "hexagon":
        return hexagon_maps([i])[0]
    if name == "torus_collapse":
        return torus_map(i)
    if name == "cyclic_tower":
        return cyclic_tower(2, i)
    if name == "rotation":
        return rotation_map(i)
    raise DomainError(f"scenario {name!r} has no approximation map")


def scenario_triple(name: str, i: int) -> MetricTriple:
    if name == "hexagon":
        return hexagon_graph(i)
    if name == "collapsing_sphere":
        return collapsing_sphere(i)
    if name == "torus_collapse":
        return torus_collapse(i)
    raise DomainError(f"scenario {name!r} has no metric triple")


def export(name: str, i: int) -> dict:
    """JSON-ready record ``{"indices", "triples", "maps"}`` for one index."""
    if name not in SCENARIOS:
        raise DomainError(f"unknown scenario {name!r}")
    out = {"scenario": name, "version": VERSION, "indices": [i], "triples": [], "maps": []}
    try:
        out["triples"].append(scenario_triple(name, i).to_dict())
    except DomainError:
        pass
    try:
        a = scenario_map(name, i)
    except DomainError:
        return out
    rec = {"label": a.label, "source": type(a.source).__name__, "target": type(a.target).__name__,
           "A_src_size": len(a.A_src.members)}
    if len(a.A_src.members) <= 4096:
        rec["table"] = [[_jsonable(g), _jsonable(a.phi(g))] for g in sorted(a.A_src.members, key=_key)]
    out["maps"].append(rec)
    return out


def _key(g):
    return g if isinstance(g, tuple) else (g,)


def _jsonable(x):
    if isinstance(x, Fraction):
        return [x.numerator, x.denominator]
    if isinstance(x, tuple):
        return [_jsonable(a) for a in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    return x
