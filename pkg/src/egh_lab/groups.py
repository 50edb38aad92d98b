"""Abstract groups with a metric, and the symmetric subsets the checkers quantify over.

Every group here exposes the same small interface:

``identity``, ``mul(g, h)``, ``inv(g)``, ``dist(g, h)``, ``norm(g)``,
``resolution`` (neighbourhood radius for condition V; 0 means discrete),
``elements`` (a tuple for finite groups, ``None`` otherwise) and
``net(radius, spacing)`` listing points of norm ``< radius`` that are
``spacing``-dense in that ball. Groups with an exponential chart also
provide ``dim``, ``exp(v)`` and ``log(g)`` (``None`` outside the chart).

Elements are hashable except for SO(3), which uses 3x3 arrays and is only
used by the escape-norm machinery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from .metric import DomainError

TWO_PI = 2 * math.pi


def _centered(a: int, n: int) -> int:
    """Representative of ``a mod n`` in ``(-n/2, n/2]``."""
    a %= n
    return a - n if a > n // 2 else a


def _grid(k: int, radius: float, spacing: float):
    m = int(math.floor(radius / spacing))
    axis = [j * spacing for j in range(-m, m + 1)]
    return [v for v in product(axis, repeat=k) if math.hypot(*v) < radius]


@dataclass(frozen=True)
class CyclicGroup:
    """Z/n with one of three metrics.

    ``arc``: ``scale * 2*pi*|a-b|_n / n`` (a sampled circle of radius ``scale``);
    ``word``: ``scale * |a-b|_n``; ``padic``: ``scale * p**(-v_p(a-b))``.
    """

    n: int
    metric: str = "arc"
    scale: float = 1.0
    p: int = 2
    resolution: float = 0.0

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("n must be positive")
        if self.metric not in ("arc", "word", "padic"):
            raise DomainError(f"unknown metric {self.metric!r}")

    @property
    def identity(self):
        return 0

    @property
    def elements(self):
        return tuple(range(self.n))

    def mul(self, g, h):
        return (g + h) % self.n

    def inv(self, g):
        return (-g) % self.n

    def dist(self, g, h) -> float:
        a = (g - h) % self.n
        if a == 0:
            return 0.0
        if self.metric == "padic":
            v = 0
            while a % self.p == 0:
                a //= self.p
                v += 1
            return self.scale * float(self.p) ** (-v)
        w = min(a, self.n - a)
        if self.metric == "word":
            return self.scale * w
        return self.scale * TWO_PI * w / self.n

    def norm(self, g) -> float:
        return self.dist(g, 0)

    def net(self, radius, spacing=None):
        return [g for g in self.elements if self.norm(g) < radius]

    def centered(self, g) -> int:
        return _centered(g, self.n)

    def power(self, g, j: int):
        return (j * g) % self.n

    def neighbors_of(self, g, rho):
        """Elements at distance ``< rho`` from ``g``."""
        if self.metric == "padic":
            return [h for h in self.elements if self.dist(g, h) < rho]
        unit = self.scale * (TWO_PI / self.n if self.metric == "arc" else 1.0)
        j = min(int(math.ceil(rho / unit)), self.n // 2)
        return sorted({(g + s) % self.n for s in range(-j, j + 1) if abs(s) * unit < rho})

    @property
    def dim(self) -> int:
        return 1

    def exp(self, v):
        """Nearest sample to the arc-length coordinate ``v`` (arc metric only)."""
        if self.metric != "arc":
            raise DomainError("exp is defined for the arc metric only")
        t = float(np.atleast_1d(v)[0]) / (TWO_PI * self.scale)
        return int(round(t * self.n)) % self.n

    def log(self, g):
        if self.metric != "arc":
            return None
        return np.array([self.scale * TWO_PI * _centered(g, self.n) / self.n])


@dataclass(frozen=True)
class IntegerGroup:
    """The integers with ``|a - b|``; discrete, so ``resolution`` is 0."""

    resolution: float = 0.0
    elements = None

    @property
    def identity(self):
        return 0

    def mul(self, g, h):
        return g + h

    def inv(self, g):
        return -g

    def dist(self, g, h) -> float:
        return float(abs(g - h))

    def norm(self, g) -> float:
        return float(abs(g))

    def power(self, g, j: int):
        return j * g

    def net(self, radius, spacing=None):
        m = math.ceil(radius) - 1
        return list(range(-m, m + 1))


@dataclass(frozen=True)
class LatticeGroup:
    """Z^k embedded in R^k at ``step``; elements are integer tuples."""

    k: int
    step: float
    elements = None

    @property
    def resolution(self) -> float:
        return self.step

    @property
    def identity(self):
        return (0,) * self.k

    def mul(self, g, h):
        return tuple(a + b for a, b in zip(g, h))

    def inv(self, g):
        return tuple(-a for a in g)

    def dist(self, g, h) -> float:
        return self.step * math.hypot(*(a - b for a, b in zip(g, h)))

    def norm(self, g) -> float:
        return self.step * math.hypot(*g)

    def net(self, radius, spacing=None):
        m = int(math.ceil(radius / self.step))
        return [g for g in product(range(-m, m + 1), repeat=self.k) if self.norm(g) < radius]

    def neighbors_of(self, g, rho):
        return [self.mul(g, s) for s in self.net(rho)]

    @property
    def dim(self) -> int:
        return self.k

    def exp(self, v):
        return tuple(int(round(float(a) / self.step)) for a in np.atleast_1d(v))


@dataclass(frozen=True)
class VectorGroup:
    """R^k under addition; elements are float tuples, exp and log are the identity."""

    k: int
    resolution: float = 0.0
    elements = None

    @property
    def dim(self) -> int:
        return self.k

    @property
    def identity(self):
        return (0.0,) * self.k

    def mul(self, g, h):
        return tuple(a + b for a, b in zip(g, h))

    def inv(self, g):
        return tuple(-a for a in g)

    def dist(self, g, h) -> float:
        return math.hypot(*(a - b for a, b in zip(g, h)))

    def norm(self, g) -> float:
        return math.hypot(*g)

    def net(self, radius, spacing):
        return [tuple(v) for v in _grid(self.k, radius, spacing)]

    def exp(self, v):
        """Identity chart; ``Fraction`` coordinates are kept exact."""
        return tuple(a if isinstance(a, Fraction) else float(a) for a in np.atleast_1d(v))

    def log(self, g):
        return np.asarray([float(a) for a in g])

    def power(self, g, j: int):
        return tuple(j * a for a in g)


@dataclass(frozen=True)
class CircleGroup:
    """R/Z written in turns, with the arc-length metric of the unit circle.

    Elements may be ``Fraction`` (exact) or ``float``; ``log`` returns the
    centered angle in ``(-pi, pi]``.
    """

    resolution: float = 0.0
    elements = None
    dim = 1

    @property
    def identity(self):
        return Fraction(0)

    def mul(self, g, h):
        return (g + h) % 1

    def inv(self, g):
        return (-g) % 1

    def dist(self, g, h) -> float:
        a = (g - h) % 1
        return TWO_PI * float(min(a, 1 - a))

    def norm(self, g) -> float:
        return self.dist(g, 0)

    def net(self, radius, spacing):
        turns = spacing / TWO_PI
        m = int(math.floor(min(radius, math.pi) / spacing))
        pts = {(j * turns) % 1 for j in range(-m, m + 1)}
        return sorted(g for g in pts if self.norm(g) < radius)

    def exp(self, v):
        return (float(np.atleast_1d(v)[0]) / TWO_PI) % 1

    def power(self, g, j: int):
        return (j * g) % 1

    def log(self, g):
        a = float(g % 1)
        if a > 0.5:
            a -= 1
        return np.array([TWO_PI * a])


@dataclass(frozen=True)
class TorusGroup:
    """(R/Z)^k in turns with the flat metric ``sqrt(sum (radius_j * angle_j)^2)``."""

    radii: tuple = (1.0, 1.0)
    resolution: float = 0.0
    elements = None

    @property
    def dim(self) -> int:
        return len(self.radii)

    @property
    def identity(self):
        return tuple(Fraction(0) for _ in self.radii)

    def mul(self, g, h):
        return tuple((a + b) % 1 for a, b in zip(g, h))

    def inv(self, g):
        return tuple((-a) % 1 for a in g)

    def dist(self, g, h) -> float:
        return float(np.linalg.norm(self.log(self.mul(g, self.inv(h)))))

    def norm(self, g) -> float:
        return self.dist(g, self.identity)

    def exp(self, v):
        v = np.atleast_1d(v)
        return tuple((float(a) / (TWO_PI * r)) % 1 for a, r in zip(v, self.radii))

    def log(self, g):
        out = []
        for a, r in zip(g, self.radii):
            a = float(a % 1)
            if a > 0.5:
                a -= 1
            out.append(TWO_PI * r * a)
        return np.array(out)

    def net(self, radius, spacing):
        return [self.exp(v) for v in _grid(self.dim, min(radius, math.pi * min(self.radii)), spacing)]


def _hat(v):
    x, y, z = v
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


@dataclass(frozen=True)
class SO3Group:
    """Rotation matrices with the bi-invariant angle metric ``angle(g^-1 h)``."""

    resolution: float = 0.0
    elements = None
    dim = 3

    @property
    def identity(self):
        return np.eye(3)

    def mul(self, g, h):
        return g @ h

    def inv(self, g):
        return g.T

    def exp(self, v):
        v = np.asarray(v, dtype=float)
        th = float(np.linalg.norm(v))
        K = _hat(v)
        if th < 1e-12:
            return np.eye(3) + K
        return np.eye(3) + math.sin(th) / th * K + (1 - math.cos(th)) / th**2 * K @ K

    def angle(self, g) -> float:
        c = (np.trace(g) - 1) / 2
        return math.acos(max(-1.0, min(1.0, c)))

    def log(self, g):
        th = self.angle(g)
        if th < 1e-12:
            return np.zeros(3)
        if math.pi - th < 1e-9:
            return None
        w = np.array([g[2, 1] - g[1, 2], g[0, 2] - g[2, 0], g[1, 0] - g[0, 1]])
        return th / (2 * math.sin(th)) * w

    def dist(self, g, h) -> float:
        return self.angle(g.T @ h)

    def norm(self, g) -> float:
        return self.angle(g)


@dataclass(frozen=True)
class HeisenbergMod:
    """Triples mod odd ``N`` with ``(a,b,c)(a',b',c') = (a+a', b+b', c+c' + (ab'-a'b)/2)``.

    Halving uses the inverse of 2 mod N, so the inverse of ``(a,b,c)`` is
    ``(-a,-b,-c)`` exactly as in the abelian group on the same triples.
    The metric is the sup norm of centered coordinates.
    """

    N: int
    resolution: float = 0.0

    def __post_init__(self):
        if self.N % 2 == 0:
            raise DomainError("N must be odd")

    @property
    def identity(self):
        return (0, 0, 0)

    @property
    def elements(self):
        return tuple(product(range(self.N), repeat=3))

    def mul(self, g, h):
        N = self.N
        half = pow(2, -1, N)
        a, b, c = g
        x, y, z = h
        return ((a + x) % N, (b + y) % N, (c + z + (a * y - x * b) * half) % N)

    def inv(self, g):
        return tuple((-a) % self.N for a in g)

    def dist(self, g, h) -> float:
        return float(max(abs(_centered(a - b, self.N)) for a, b in zip(g, h)))

    def norm(self, g) -> float:
        return self.dist(g, self.identity)

    def net(self, radius, spacing=None):
        m = math.ceil(radius) - 1
        r = range(-m, m + 1)
        return [tuple(a % self.N for a in v) for v in product(r, r, r)]


@dataclass(frozen=True)
class AbelianMod(HeisenbergMod):
    """``(Z/N)^3`` on the same triples and metric as :class:`HeisenbergMod`."""

    def mul(self, g, h):
        return tuple((a + b) % self.N for a, b in zip(g, h))


@dataclass(frozen=True)
class ProductCyclic:
    """``Z/n1 x Z/n2`` with a caller-supplied metric on pairs.

    ``metric(g, h)`` receives two pairs; ``chart`` optionally maps a pair to
    an algebra vector (or ``None`` outside the chart) and ``expmap`` maps an
    algebra vector to the nearest pair. The metric should be translation
    invariant; ``neighbors_of`` relies on it.
    """

    n1: int
    n2: int
    metric: object = field(repr=False, compare=False, default=None)
    chart: object = field(repr=False, compare=False, default=None)
    expmap: object = field(repr=False, compare=False, default=None)
    resolution: float = 0.0
    dim: int = 2

    @property
    def identity(self):
        return (0, 0)

    @property
    def elements(self):
        return tuple(product(range(self.n1), range(self.n2)))

    def mul(self, g, h):
        return ((g[0] + h[0]) % self.n1, (g[1] + h[1]) % self.n2)

    def inv(self, g):
        return ((-g[0]) % self.n1, (-g[1]) % self.n2)

    def dist(self, g, h) -> float:
        return float(self.metric(g, h))

    def norm(self, g) -> float:
        return self.dist(g, self.identity)

    def log(self, g):
        return None if self.chart is None else self.chart(g)

    def exp(self, v):
        if self.expmap is None:
            raise DomainError("no exponential map supplied")
        return self.expmap(np.atleast_1d(v))

    def net(self, radius, spacing=None):
        return [g for g in self.elements if self.norm(g) < radius]

    def neighbors_of(self, g, rho, reach: int = 2):
        out = []
        for s in product(range(-reach, reach + 1), repeat=2):
            s = (s[0] % self.n1, s[1] % self.n2)
            if self.norm(s) < rho:
                out.append(self.mul(g, s))
        return out


@dataclass(frozen=True)
class TrivialGroup:
    resolution: float = 0.0
    elements = (0,)

    @property
    def identity(self):
        return 0

    def mul(self, g, h):
        return 0

    def inv(self, g):
        return 0

    def dist(self, g, h) -> float:
        return 0.0

    def norm(self, g) -> float:
        return 0.0

    def net(self, radius, spacing=None):
        return [0]


# ---------------------------------------------------------------------------
# symmetric subsets


@dataclass(frozen=True, eq=False)
class SymmetricSubset:
    """A finite symmetric set of elements with exact membership.

    ``net`` and the compact core ``K`` are the members themselves; depth is
    infinite inside (every subset of a finite set is open) and minus the
    distance outside.
    """

    group: object
    members: frozenset

    def __post_init__(self):
        mem = frozenset(self.members)
        G = self.group
        if G.identity not in mem:
            raise DomainError("symmetric subset must contain the identity")
        bad = [g for g in mem if G.inv(g) not in mem]
        if bad:
            raise DomainError(f"subset not closed under inverse: {bad[0]!r} has no inverse in it")
        object.__setattr__(self, "members", mem)

    def __contains__(self, g):
        return g in self.members

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(sorted(self.members, key=_sort_key))

    def contains(self, g) -> bool:
        return g in self.members

    def dist_to(self, g) -> float:
        if g in self.members:
            return 0.0
        return min(self.group.dist(g, a) for a in self.members)

    def depth(self, g) -> float:
        return math.inf if g in self.members else -self.dist_to(g)

    def net(self, delta):
        return sorted(self.members, key=_sort_key)

    def in_core(self, g, delta) -> bool:
        return g in self.members

    def closure_contains(self, g) -> bool:
        return g in self.members


@dataclass(frozen=True, eq=False)
class BallSubset:
    """The open ball ``{g : norm(g) < radius}`` about the identity."""

    group: object
    radius: float

    def __contains__(self, g):
        return self.contains(g)

    def contains(self, g) -> bool:
        return self.group.norm(g) < self.radius

    def dist_to(self, g) -> float:
        return max(0.0, self.group.norm(g) - self.radius)

    def depth(self, g) -> float:
        return self.radius - self.group.norm(g)

    def net(self, delta):
        return self.group.net(self.radius, delta)

    def in_core(self, g, delta) -> bool:
        return self.depth(g) >= delta

    def closure_contains(self, g) -> bool:
        return self.group.norm(g) <= self.radius

    @property
    def members(self):
        if self.group.elements is None:
            return None
        return frozenset(g for g in self.group.elements if self.contains(g))


@dataclass(frozen=True, eq=False)
class ComplementSubset:
    """The group minus one element of order two; its closure is the whole group."""

    group: object
    point: object

    def __post_init__(self):
        G = self.group
        if self.point == G.identity or G.mul(self.point, self.point) != G.identity:
            raise DomainError("removed point must have order two")

    def contains(self, g) -> bool:
        return g != self.point

    __contains__ = contains

    def closure_contains(self, g) -> bool:
        return True

    def outside(self):
        return [self.point]


def _sort_key(g):
    try:
        return (0, tuple(g)) if isinstance(g, tuple) else (0, (g,))
    except TypeError:
        return (1, repr(g))


def symmetric_closure(group, elements) -> SymmetricSubset:
    s = set(elements) | {group.identity}
    s |= {group.inv(g) for g in s}
    return SymmetricSubset(group, frozenset(s))
