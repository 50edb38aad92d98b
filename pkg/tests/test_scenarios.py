import json
import math

import numpy as np
import pytest

from egh_lab.gh import equivariant_gh
from egh_lab.isometry import is_normal
from egh_lab.metric import DomainError, validate_metric
from egh_lab.scenarios import (
    SCENARIOS,
    circle_triple,
    collapsing_sphere,
    counterexample,
    cyclic_subgroups,
    cyclic_tower,
    export,
    hexagon_graph,
    point_triple,
    scenario_map,
    scenario_triple,
    second_factor,
    sphere_mesh_spacing,
    torus_collapse,
    torus_cross,
    tower_chain,
    tower_radii,
)


def test_hexagon_distances_scale_with_i():
    t1, t3 = hexagon_graph(1), hexagon_graph(3)
    assert np.array_equal(t3.space.dist, 3 * t1.space.dist)
    assert t1.space.diameter == 3 and t1.space.label(t1.basepoint) == "x"
    with pytest.raises(DomainError):
        hexagon_graph(0)


def test_collapsing_sphere_shapes():
    t = collapsing_sphere(2)
    assert t.space.n == 16 and t.group.order == 32
    assert sphere_mesh_spacing(2) == pytest.approx(2 * math.pi / 16 / 2)
    assert collapsing_sphere(1, n=2, mesh=1).space.n == 6
    s2 = collapsing_sphere(1, n=2, mesh=2)
    assert s2.space.n == 18 and s2.group.order == 24 and validate_metric(s2.space) == []
    with pytest.raises(DomainError):
        collapsing_sphere(1, n=2, mesh=3)
    with pytest.raises(DomainError):
        collapsing_sphere(1, n=3)
    with pytest.raises(DomainError):
        collapsing_sphere(1, mesh=2)


def test_polygon_isometries_are_exact():
    t = circle_triple(12)
    d = t.space.dist
    for g in t.group.elements:
        g = np.asarray(g)
        assert np.array_equal(d[np.ix_(g, g)], d)


def test_sphere_gh_to_point_is_monotone():
    vals = [equivariant_gh(collapsing_sphere(i), point_triple()).value for i in (1, 2, 4, 8)]
    assert vals == sorted(vals, reverse=True)


def test_torus_second_factor_is_normal():
    t = torus_collapse(2, grid=8)
    H = second_factor(t, 8)
    assert H.order == 8 and is_normal(t.group, H)
    with pytest.raises(DomainError):
        torus_collapse(2, grid=4)


def test_tower_helpers():
    assert tower_radii(2, 3) == [2.0, 1.0, 0.5, 0.25]
    assert tower_chain(2, 3) == [1, 2, 4, 8]
    with pytest.raises(DomainError):
        cyclic_tower(4, 2)
    with pytest.raises(DomainError):
        cyclic_tower(2, 0)


def test_cyclic_subgroups_of_z12():
    from egh_lab.groups import CyclicGroup

    orders = sorted(len(H) for H in cyclic_subgroups(CyclicGroup(12)))
    assert orders == [1, 2, 3, 4, 6, 12]


def test_torus_cross_region():
    T, cross = torus_cross()
    assert cross.contains(T.identity)
    assert cross.contains(T.exp([0.9, 0.0])) and not cross.contains(T.exp([0.6, 0.6]))


def test_counterexample_errors():
    with pytest.raises(DomainError):
        counterexample("VI", 3)
    with pytest.raises(DomainError):
        counterexample("I", 0)


def test_registry_and_export():
    for name, sc in SCENARIOS.items():
        data = export(name, sc.indices[0])
        json.dumps(data)
        assert data["scenario"] == name and (data["triples"] or data["maps"])
    with pytest.raises(DomainError):
        export("nope", 1)
    with pytest.raises(DomainError):
        scenario_map("collapsing_sphere", 1)
    with pytest.raises(DomainError):
        scenario_triple("rotation", 1)
