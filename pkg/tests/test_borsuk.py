import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from egh_lab.borsuk import (
    OddMapSample,
    antipodal_zero_pairs,
    build_triangulation,
    certify_no_small_image,
    check_triangulation,
    continuity_modulus,
    evaluate,
    find_near_zero,
    locate,
    odd_sample,
    random_odd_sample,
    zero_simplices,
)
from egh_lab.metric import DomainError


@pytest.mark.parametrize("n,s", [(2, 0), (2, 3), (3, 0), (3, 2), (4, 1), (4, 2)])
def test_triangulation_is_a_symmetric_pseudomanifold(n, s):
    tri = build_triangulation(n, s)
    assert check_triangulation(tri) == []
    N = 2**s
    assert len(tri.simplices) == 2**n * N ** (n - 1)
    assert np.allclose(np.linalg.norm(tri.vertices, axis=1), 1.0)
    assert np.array_equal(tri.keys[tri.antipode], -tri.keys)


def test_polytope_mesh_halves_in_low_dimension():
    for n in (2, 3):
        m = [build_triangulation(n, s).polytope_mesh for s in range(4)]
        assert all(b == pytest.approx(a / 2) for a, b in zip(m, m[1:]))
    m = [build_triangulation(4, s).polytope_mesh for s in range(1, 3)]
    assert m[1] == pytest.approx(m[0] / 2)


def test_odd_sample_validation():
    tri = build_triangulation(3, 1)
    with pytest.raises(DomainError, match="odd"):
        OddMapSample(tri, np.ones(len(tri.keys)))
    with pytest.raises(DomainError, match="one value"):
        OddMapSample(tri, np.zeros(3))
    with pytest.raises(DomainError):
        random_odd_sample(tri, 1, np.random.default_rng(0), kind="uniform")


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([(3, 1), (3, 2), (4, 2)]))
def test_pl_extension_is_odd_and_vanishes(seed, nk):
    n, k = nk
    tri = build_triangulation(n, 2)
    rng = np.random.default_rng(seed)
    sample = random_odd_sample(tri, k, rng)
    x = rng.normal(size=n)
    x /= np.linalg.norm(x)
    assert np.allclose(evaluate(sample, -x), -evaluate(sample, x))
    w = find_near_zero(sample)
    eps, _ = continuity_modulus(sample)
    assert w.value_norm <= 1e-9 and w.vertex_norm <= 2 * eps
    assert np.allclose(evaluate(sample, w.x0), w.value, atol=1e-9)


def test_locate_returns_convex_weights():
    tri = build_triangulation(3, 2)
    verts, lam = locate(tri, np.array([0.3, -0.2, 0.9]))
    assert len(verts) == 3 and np.all(lam >= -1e-12) and lam.sum() == pytest.approx(1.0)


def test_linear_map_zero_lies_on_its_kernel():
    tri = build_triangulation(3, 3)
    sample = odd_sample(tri, lambda x: x[0] + 2 * x[1])
    w = find_near_zero(sample)
    assert abs(w.x0[0] + 2 * w.x0[1]) < 0.2


def test_dimension_gate():
    tri = build_triangulation(2, 2)
    with pytest.raises(DomainError, match="n > k"):
        find_near_zero(random_odd_sample(tri, 2, np.random.default_rng(0)))


def test_zero_counts_have_the_expected_parity():
    tri = build_triangulation(3, 2)
    rng = np.random.default_rng(3)
    for _ in range(20):
        sample = random_odd_sample(tri, 2, rng)
        zs = zero_simplices(sample)
        assert len(zs) % 2 == 0
        assert antipodal_zero_pairs(sample) % 2 == 1
    with pytest.raises(DomainError):
        zero_simplices(random_odd_sample(tri, 1, rng))


def test_no_small_image_certificate():
    tri = build_triangulation(3, 3)
    sample = odd_sample(tri, lambda x: x[:1])
    v = certify_no_small_image(sample, 0.5)
    assert v.zero_found and not v.contradiction
    assert v.min_vertex_norm < 0.5


def test_locate_on_cell_boundaries():
    tri = build_triangulation(4, 2)
    rng = np.random.default_rng(5)
    for _ in range(200):
        x = rng.integers(-2, 3, size=4).astype(float)
        if not x.any():
            continue
        verts, lam = locate(tri, x / np.linalg.norm(x))
        p = lam @ tri.polytope_vertices[verts]
        assert np.allclose(p, x / np.abs(x).sum())
