from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dofsim.region import (
    HalfPlane,
    RegionPolygon,
    as_fraction,
    contains,
    reference_regions,
    theorem1_region,
    theorem2_region,
)

alphas = st.fractions(min_value=0, max_value=1, max_denominator=64)


def listed_vertices(a, n=1):
    pts = [(0, 1), (a, 1), ((2 + a) / 3, (2 + a) / 3), (1, a), (1, 0)]
    return frozenset((F(x) * n, F(y) * n) for x, y in pts)


def test_half_alpha_vertices():
    v = set(theorem1_region(F(1, 2)).vertices)
    assert {(F(5, 6), F(5, 6)), (F(1), F(1, 2)), (F(1, 2), F(1))} <= v


def test_zero_and_one():
    assert (F(2, 3), F(2, 3)) in theorem1_region(0).vertices
    assert set(theorem1_region(1).vertices) == {(0, 0), (1, 0), (1, 1), (0, 1)}


@pytest.mark.parametrize("alpha", [-F(1, 10), F(11, 10), 2])
def test_alpha_out_of_range(alpha):
    with pytest.raises(ValueError):
        theorem1_region(alpha)
    with pytest.raises(ValueError):
        theorem2_region(alpha, 2)


def test_mimo_examples():
    assert (F(5, 3), F(5, 3)) in theorem2_region(F(1, 2), 2).vertices
    assert theorem2_region(F(1, 3), 1).vertices == theorem1_region(F(1, 3)).vertices
    assert set(theorem2_region(1, 2).vertices) == {(0, 0), (2, 0), (2, 2), (0, 2)}
    with pytest.raises(ValueError):
        theorem2_region(F(1, 2), 0)


@given(alphas)
def test_vertices_match_listed_set(a):
    assert theorem1_region(a).nonzero_vertices() == listed_vertices(a)


@given(alphas)
def test_vertices_are_extreme_points(a):
    r = theorem1_region(a)
    for v in r.vertices:
        assert r.contains_exact(v)
        tight = [h for h in r.halfplanes if h.slack(v) == 0]
        normals = {(h.a, h.b) for h in tight}
        assert len(normals) >= 2
    for x, y in r.vertices:
        assert 0 <= x <= 1 and 0 <= y <= 1


@given(alphas, alphas)
def test_monotone_in_alpha(a, b):
    lo, hi = sorted((a, b))
    big = theorem1_region(hi)
    assert all(big.contains_exact(v) for v in theorem1_region(lo).vertices)


@given(alphas)
def test_between_references(a):
    ref = reference_regions()
    r = theorem1_region(a)
    assert all(r.contains_exact(v) for v in ref["delayed"].vertices)
    assert all(ref["perfect"].contains_exact(v) for v in r.vertices)
    assert all(r.contains_exact(v) for v in ref["none"].vertices)


@given(alphas, st.fractions(0, 1), st.fractions(0, 1))
def test_symmetry(a, x, y):
    r = theorem1_region(a)
    assert r.contains_exact((x, y)) == r.contains_exact((y, x))


@given(alphas, st.integers(1, 6))
def test_mimo_is_scaled_miso(a, n):
    m = theorem2_region(a, n)
    assert set(m.vertices) == {(x * n, y * n) for x, y in theorem1_region(a).vertices}
    assert m.nonzero_vertices() == listed_vertices(a, n)


def test_reference_regions():
    ref = reference_regions()
    assert (F(2, 3), F(2, 3)) in ref["delayed"].vertices
    assert (1, 1) in ref["perfect"].vertices
    assert ref["none"].contains_exact((F(1, 2), F(1, 2)))
    assert not ref["none"].contains_exact((F(1, 2), F(3, 5)))


def test_contains_examples():
    a = F(1, 2)
    r = theorem1_region(a)
    assert contains(r, (float((2 + a) / 3),) * 2, 0.0)
    assert not contains(r, (1.0, 1.0), 0.0)
    assert contains(r, (0.1, 0.1), 0.0)
    # (1, 1) violates 2 d1 + d2 <= 2.5 by 0.5
    assert not contains(r, (1.0, 1.0), 0.4)
    assert contains(r, (1.0, 1.0), 0.5)
    assert not contains(r, (1.0, 1.0), 0.1, metric="chebyshev")
    assert contains(r, (1.0, 1.0), 0.5 / 3, metric="chebyshev")
    with pytest.raises(ValueError):
        contains(r, (0, 0), -1)
    with pytest.raises(ValueError):
        contains(r, (0, 0), 0, metric="l2")


@given(alphas, st.floats(0, 0.2), st.floats(-0.3, 1.3), st.floats(-0.3, 1.3))
def test_chebyshev_inflation(a, eps, x, y):
    # inside the inflated polygon iff some point of the polygon is within eps in max-norm
    r = theorem1_region(a)
    inside = contains(r, (x, y), eps, metric="chebyshev")
    if contains(r, (x, y), 0.0):
        assert inside
    if inside:
        assert contains(r, (x, y), 3 * eps + 1e-12)


def test_json_roundtrip():
    for r in (theorem1_region(F(3, 7)), theorem2_region(F(1, 4), 3), reference_regions()["none"]):
        assert RegionPolygon.from_json(r.to_json()) == r


def test_as_fraction():
    assert as_fraction(0.5) == F(1, 2)
    assert as_fraction("3/4") == F(3, 4)
    assert as_fraction(0.1) == F(1, 10)
    with pytest.raises(ValueError):
        HalfPlane(0, 0, 1)
