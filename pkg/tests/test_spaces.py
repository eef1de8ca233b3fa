import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from geoprox import (
    Cat0ClosedForm,
    Empirical,
    EuclideanSpace,
    EuclideanVec as E,
    HyperbolicPlane,
    HyperboloidVec,
    InvalidParameter,
    InvalidPoint,
    MaxNormSeq,
    MaxNormVec,
    MetricTree,
    TreePoint,
    UnsupportedSpace,
    combine,
    distance,
    midpoint,
    modulus,
)
from geoprox.spaces import point_from_json, space_from_json

import corpus

SPACES = {
    "euclidean-2": EuclideanSpace(2),
    "euclidean-5": EuclideanSpace(5),
    "hyperbolic": HyperbolicPlane(),
    "star": corpus.star_tree(),
    "caterpillar": corpus.caterpillar_tree(),
    "maxnorm-3": MaxNormSeq(3),
}


# --- distance -----------------------------------------------------------


def test_euclidean_pythagoras():
    assert distance(EuclideanSpace(2), E((0, 0)), E((3, 4))) == pytest.approx(5.0, abs=1e-15)


def test_hyperbolic_unit_distance():
    h = HyperbolicPlane()
    p = HyperboloidVec((math.cosh(1), math.sinh(1), 0))
    assert distance(h, HyperboloidVec((1, 0, 0)), p) == pytest.approx(1.0, abs=1e-12)


def test_tree_leaf_to_leaf():
    t = MetricTree(["r", "a", "b"], [("r", "a", 1.0), ("r", "b", 2.0)])
    a, b = t.vertex_point("a"), t.vertex_point("b")
    assert distance(t, a, b) == pytest.approx(3.0, abs=1e-15)


def test_maxnorm_distance_both_regimes():
    m = MaxNormSeq(2)
    # inf part dominates: |(2,0)| = max(2, 2/sqrt2)
    assert distance(m, MaxNormVec((0, 0)), MaxNormVec((2, 0))) == pytest.approx(2.0)
    # l2 part dominates: |(1,1,1)|_2 / sqrt2 = sqrt(3/2) > 1
    m3 = MaxNormSeq(3)
    assert distance(m3, MaxNormVec((0, 0, 0)), MaxNormVec((1, 1, 1))) == pytest.approx(math.sqrt(1.5))


def test_kind_mismatch_rejected():
    with pytest.raises(InvalidPoint):
        distance(EuclideanSpace(2), E((0, 0)), HyperboloidVec((1, 0, 0)))
    with pytest.raises(InvalidPoint):
        distance(EuclideanSpace(2), E((0, 0)), E((0, 0, 0)))


def test_off_hyperboloid_rejected():
    with pytest.raises(InvalidPoint):
        distance(HyperbolicPlane(), HyperboloidVec((2, 0, 0)), HyperboloidVec((1, 0, 0)))


def test_tree_offset_outside_edge_rejected():
    t = corpus.star_tree()
    with pytest.raises(InvalidPoint):
        distance(t, TreePoint(0, 1.5), TreePoint(0, 0.0))


# --- combine / midpoint ---------------------------------------------------


def test_combine_t0_is_x():
    x, y = E((0.3, -1.7)), E((5, 5))
    assert combine(EuclideanSpace(2), x, y, 0.0) == x


def test_combine_euclidean_midpoint():
    assert combine(EuclideanSpace(2), E((0, 0)), E((2, 2)), 0.5) == E((1, 1))


def test_combine_out_of_range():
    with pytest.raises(InvalidParameter):
        combine(EuclideanSpace(2), E((0, 0)), E((2, 2)), 1.5)


def test_tree_combine_walks_arc_length():
    # path a -> r -> b has length 3 in the star with legs a=1, b=2; t=1/3 lands on r
    t = corpus.star_tree()
    a, b = t.vertex_point("a"), t.vertex_point("b")
    p = combine(t, a, b, 1.0 / 3.0)
    assert distance(t, p, t.vertex_point("r")) == pytest.approx(0.0, abs=1e-12)
    # 11 -> 1 -> 2 -> 12 has length 1.1 + 0.7 + 0.9
    c = corpus.caterpillar_tree()
    x, y = c.vertex_point(11), c.vertex_point(12)
    assert distance(c, x, y) == pytest.approx(2.7)
    q = combine(c, x, y, 0.25)
    # 0.675 along from leaf 11 stays on the leg 1-11, at 0.425 from vertex 1
    assert distance(c, q, x) == pytest.approx(0.675)
    assert distance(c, q, c.vertex_point(1)) == pytest.approx(0.425)


def test_midpoint_of_point_and_itself():
    x = HyperbolicPlane.from_polar(0.4, 1.0)
    m = midpoint(HyperbolicPlane(), x, x)
    assert np.allclose(m.coords, x.coords, atol=1e-12)


def test_midpoint_euclidean():
    assert midpoint(EuclideanSpace(2), E((0, 0)), E((4, 0))) == E((2, 0))


def test_midpoint_hyperbolic():
    h = HyperbolicPlane()
    m = midpoint(h, HyperboloidVec((1, 0, 0)), HyperboloidVec((math.cosh(2), math.sinh(2), 0)))
    assert np.allclose(m.coords, (math.cosh(1), math.sinh(1), 0), atol=1e-12)


# --- modulus --------------------------------------------------------------


def test_cat0_modulus_antipodal():
    assert modulus(Cat0ClosedForm(), EuclideanSpace(3), 7.0, 2.0) == pytest.approx(1.0)


def test_cat0_modulus_eps1():
    assert modulus(Cat0ClosedForm(), EuclideanSpace(2), 1.0, 1.0) == pytest.approx(1 - math.sqrt(3) / 2, abs=1e-15)


def test_cat0_modulus_has_no_euclidean_counterexample():
    # midpoint of x, y in the unit ball with |x - y| >= 1 stays within 1 - delta of the center
    rng = np.random.default_rng(5)
    n = 100_000
    X = rng.normal(size=(n, 2))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    Y = rng.normal(size=(n, 2))
    Y /= np.linalg.norm(Y, axis=1, keepdims=True)
    X *= rng.uniform(0, 1, (n, 1)) ** 0.1
    Y *= rng.uniform(0, 1, (n, 1)) ** 0.1
    ok = np.linalg.norm(X - Y, axis=1) >= 1.0
    m = np.linalg.norm((X[ok] + Y[ok]) / 2, axis=1)
    assert ok.sum() > 10_000
    assert np.all(m <= 1 - (1 - math.sqrt(3) / 2) + 1e-12)


def test_empirical_modulus_bounded_by_closed_form():
    val = modulus(Empirical(10_000, 0), EuclideanSpace(2), 1.0, 1.0)
    assert val >= 0.133975 - 1e-3


@pytest.mark.parametrize("r", [0.1, 1.0, 10.0])
def test_cat0_modulus_independent_of_r(r):
    assert modulus(Cat0ClosedForm(), HyperbolicPlane(), r, 0.5) == modulus(Cat0ClosedForm(), HyperbolicPlane(), 1.0, 0.5)


@pytest.mark.parametrize("eps", [0.0, -1.0, 2.5])
def test_modulus_eps_range(eps):
    with pytest.raises(InvalidParameter):
        modulus(Cat0ClosedForm(), EuclideanSpace(2), 1.0, eps)


def test_closed_form_refused_on_maxnorm():
    with pytest.raises(UnsupportedSpace):
        modulus(Cat0ClosedForm(), MaxNormSeq(2), 1.0, 1.0)


# --- JSON -----------------------------------------------------------------


@pytest.mark.parametrize("name", list(SPACES))
def test_space_and_point_json_roundtrip(name):
    sp = SPACES[name]
    sp2 = space_from_json(sp.to_json())
    X = sp.sample(np.random.default_rng(0), 5)
    for row in X:
        p = point_from_json(sp2, sp.point_to_json(row))
        assert np.allclose(sp2.encode(p)[0], row)


# --- properties -----------------------------------------------------------

seeds = st.integers(min_value=0, max_value=2**32 - 1)


@settings(max_examples=25, deadline=None)
@given(seed=seeds, name=st.sampled_from(list(SPACES)))
def test_metric_axioms(seed, name):
    sp = SPACES[name]
    rng = np.random.default_rng(seed)
    X, Y, Z = (sp.sample(rng, 64) for _ in range(3))
    dxy, dyx = sp.dist(X, Y), sp.dist(Y, X)
    assert np.all(dxy >= 0)
    assert np.allclose(dxy, dyx, rtol=0, atol=1e-12 * (1 + dxy.max()))
    assert np.allclose(sp.dist(X, X), 0.0, atol=1e-7)
    tri = sp.dist(X, Z) - (dxy + sp.dist(Y, Z))
    assert np.all(tri <= 1e-9 * (1 + dxy.max()))


@settings(max_examples=25, deadline=None)
@given(seed=seeds, name=st.sampled_from(list(SPACES)), t=st.floats(0, 1))
def test_combine_is_a_geodesic(seed, name, t):
    sp = SPACES[name]
    rng = np.random.default_rng(seed)
    X, Y = sp.sample(rng, 32), sp.sample(rng, 32)
    M = sp.combine(X, Y, t)
    sp.validate(M)
    d = sp.dist(X, Y)
    scale = 1 + d.max()
    assert np.allclose(sp.dist(X, M), t * d, atol=1e-9 * scale)
    assert np.allclose(sp.dist(M, Y), (1 - t) * d, atol=1e-9 * scale)


@settings(max_examples=25, deadline=None)
@given(seed=seeds)
def test_hyperboloid_closure(seed):
    h = HyperbolicPlane()
    rng = np.random.default_rng(seed)
    X, Y = h.sample(rng, 50), h.sample(rng, 50)
    M = h.combine(X, Y, rng.uniform(0, 1, 50))
    q = -M[:, 0] ** 2 + M[:, 1] ** 2 + M[:, 2] ** 2
    assert np.allclose(q, -1.0, atol=1e-9)
    assert np.all(M[:, 0] > 0)
