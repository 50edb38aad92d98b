"""Finite pointed metric spaces, balls, and Hausdorff distance between subsets."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.sparse.csgraph import shortest_path

TAU_METRIC = 1e-9


class StructureError(ValueError):
    """Input has the wrong shape (non-square matrix, bad index, ...)."""


class DomainError(ValueError):
    """Input is well formed but outside the operation's domain."""


@dataclass(frozen=True)
class MetricViolation:
    kind: str  # "diagonal", "symmetry", "positivity", "triangle"
    indices: tuple
    slack: float


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """A distance matrix on points ``0..n-1`` together with a basepoint."""

    dist: np.ndarray
    basepoint: int = 0
    labels: tuple | None = None

    def __post_init__(self):
        d = np.array(self.dist, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] == 0:
            raise StructureError(f"distance matrix must be square and non-empty, got shape {d.shape}")
        if not 0 <= self.basepoint < d.shape[0]:
            raise StructureError(f"basepoint {self.basepoint} out of range for {d.shape[0]} points")
        if self.labels is not None:
            if len(self.labels) != d.shape[0]:
                raise StructureError("labels length does not match number of points")
            object.__setattr__(self, "labels", tuple(self.labels))
        d.setflags(write=False)
        object.__setattr__(self, "dist", d)

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    @property
    def diameter(self) -> float:
        return float(self.dist.max())

    def label(self, i: int) -> str:
        return self.labels[i] if self.labels else str(i)

    def with_basepoint(self, p: int) -> "FiniteMetricSpace":
        return FiniteMetricSpace(self.dist, p, self.labels)

    def is_integral(self) -> bool:
        return bool(np.all(self.dist == np.round(self.dist)))

    def to_dict(self) -> dict:
        out = {"n": self.n, "dist": self.dist.tolist(), "basepoint": self.basepoint}
        if self.labels:
            out["labels"] = list(self.labels)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "FiniteMetricSpace":
        try:
            dist = data["dist"]
            n = data.get("n", len(dist))
            space = cls(np.asarray(dist, dtype=float), int(data.get("basepoint", 0)), data.get("labels"))
        except (KeyError, TypeError) as exc:
            raise StructureError(f"malformed space record: {exc}") from exc
        if space.n != n:
            raise StructureError(f"declared n={n} but matrix has {space.n} rows")
        bad = validate_metric(space)
        if bad:
            raise DomainError(f"not a metric: {bad[0]}")
        return space

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "FiniteMetricSpace":
        return cls.from_dict(json.loads(text))


def validate_metric(m, tol: float = TAU_METRIC) -> list[MetricViolation]:
    """Return every metric-axiom violation; empty iff ``m`` is a metric within ``tol``.

    Accepts a :class:`FiniteMetricSpace` or a raw matrix. Triangle violations are
    reported once per unordered endpoint pair ``(i, k)`` and midpoint ``j``.
    """
    d = m.dist if isinstance(m, FiniteMetricSpace) else np.asarray(m, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise StructureError(f"distance matrix must be square, got shape {d.shape}")
    n = d.shape[0]
    out = []
    for i in range(n):
        if abs(d[i, i]) > tol:
            out.append(MetricViolation("diagonal", (i,), -abs(d[i, i])))
    for i, j in combinations(range(n), 2):
        if abs(d[i, j] - d[j, i]) > tol:
            out.append(MetricViolation("symmetry", (i, j), -abs(d[i, j] - d[j, i])))
        if min(d[i, j], d[j, i]) <= tol:
            out.append(MetricViolation("positivity", (i, j), min(d[i, j], d[j, i])))
    # d[i, j] + d[j, k] - d[i, k] for all triples at once
    slack = d[:, :, None] + d[None, :, :] - d[:, None, :]
    for i, j, k in zip(*np.nonzero(slack < -tol)):
        if i < k and j != i and j != k:
            out.append(MetricViolation("triangle", (int(i), int(j), int(k)), float(-slack[i, j, k])))
    return out


def ball(m: FiniteMetricSpace, center: int, r: float, closed: bool = False) -> frozenset:
    if r < 0:
        raise DomainError("radius must be non-negative")
    row = m.dist[center]
    mask = row <= r if closed else row < r
    return frozenset(int(i) for i in np.nonzero(mask)[0])


def hausdorff_distance(m: FiniteMetricSpace, A, B) -> float:
    A, B = sorted(A), sorted(B)
    if not A or not B:
        raise DomainError("Hausdorff distance needs non-empty subsets")
    sub = m.dist[np.ix_(A, B)]
    return float(max(sub.min(axis=1).max(), sub.min(axis=0).max()))


@dataclass(frozen=True)
class MonotoneClosedFamily:
    """Nested subsets ``sets[0] ⊆ sets[1] ⊆ ...`` indexed by increasing parameters."""

    parameters: tuple
    sets: tuple = field(default=())

    def __post_init__(self):
        params = tuple(float(r) for r in self.parameters)
        sets = tuple(frozenset(s) for s in self.sets)
        if len(params) != len(sets):
            raise StructureError("parameters and sets must have equal length")
        if any(b <= a for a, b in zip(params, params[1:])):
            raise DomainError("parameters must be strictly increasing")
        for j, (s, t) in enumerate(zip(sets, sets[1:])):
            if not s <= t:
                raise DomainError(f"family not nested at index {j}")
        object.__setattr__(self, "parameters", params)
        object.__setattr__(self, "sets", sets)


def count_discontinuities(f: MonotoneClosedFamily, m: FiniteMetricSpace, gap: float) -> int:
    """Number of consecutive parameters whose sets are more than ``gap`` apart in d_H."""
    if gap <= 0:
        raise DomainError("gap must be positive")
    return sum(
        1 for s, t in zip(f.sets, f.sets[1:]) if hausdorff_distance(m, s, t) > gap
    )


def separated_packing_number(m: FiniteMetricSpace, subsets, gap: float) -> int:
    """Largest family of the given subsets that is pairwise more than ``gap`` apart in d_H.

    Exhaustive; intended for a handful of subsets only.
    """
    subsets = [frozenset(s) for s in subsets if s]
    k = len(subsets)
    far = np.zeros((k, k), dtype=bool)
    for a, b in combinations(range(k), 2):
        far[a, b] = far[b, a] = hausdorff_distance(m, subsets[a], subsets[b]) > gap

    best = 1 if k else 0

    def grow(chosen, start):
        nonlocal best
        best = max(best, len(chosen))
        for c in range(start, k):
            if all(far[c, o] for o in chosen):
                grow(chosen + [c], c + 1)

    grow([], 0)
    return best


def graph_metric(n: int, edges, weights=None) -> np.ndarray:
    """All-pairs shortest paths of an undirected weighted graph."""
    w = np.full((n, n), np.inf)
    for idx, (u, v) in enumerate(edges):
        c = 1.0 if weights is None else weights[idx]
        w[u, v] = w[v, u] = min(w[u, v], c)
    d = shortest_path(np.where(np.isinf(w), 0.0, w), method="FW", directed=False)
    if np.isinf(d).any():
        raise DomainError("graph is disconnected")
    return d
