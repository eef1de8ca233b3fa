import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from geoprox import (
    Affine,
    EuclideanSpace,
    EuclideanVec as E,
    Identity,
    Isometry,
    MapDescriptor,
    MaxNormSeq,
    MetricTree,
    OutOfDomain,
    PairDescriptor,
    ProjectOnto,
    SubtreeHull,
    TreePoint,
    UnsupportedSpace,
    apply,
    check_containment,
    check_rel_nonexpansive,
    distance,
    make_projection_map,
)
from geoprox.maps import check_primitive, hyperbolic_boost, hyperbolic_rotation, map_from_json, map_to_json

import corpus


def test_projection_map_on_rectangles():
    P = make_projection_map(corpus.rectangles())
    assert np.allclose(apply(P, E((-2, 1))).coords, (1, 1))
    assert np.allclose(apply(P, E((1, 1))).coords, (-1, 1))


def test_projection_map_equal_sets_is_identity_on_A():
    sp = EuclideanSpace(2)
    sq = corpus.box(0, 1, 0, 1)
    P = make_projection_map(PairDescriptor(sp, sq, sq))
    assert apply(P, E((0.25, 0.75))) == E((0.25, 0.75))


def test_projection_map_refused_on_maxnorm():
    from geoprox import build_instance
    with pytest.raises(UnsupportedSpace):
        make_projection_map(build_instance(4).pair)


def test_identity_and_reflection():
    pair = corpus.symmetric_rectangles()
    I = MapDescriptor("noncyclic", (Identity(),), (Identity(),), pair)
    assert apply(I, E((1.5, 0.5))) == E((1.5, 0.5))
    assert apply(corpus.reflection_map(), E((-2, 1))) == E((-2, -1))


def test_out_of_domain():
    P = make_projection_map(corpus.rectangles())
    with pytest.raises(OutOfDomain):
        apply(P, E((0, 0)))


def test_boundary_point_within_domain_tolerance():
    P = make_projection_map(corpus.rectangles())
    apply(P, E((-1 + 5e-8, 0.5)))


def test_isometry_map_has_no_violations():
    rep = check_rel_nonexpansive(corpus.rotation_map(), 10_000)
    assert rep.violations == 0 and rep.samples_run == 10_000


def test_scaling_by_two_is_caught():
    pair = corpus.rectangles()
    bad = MapDescriptor("noncyclic", (Affine(((2.0, 0.0), (0.0, 2.0))),), (Identity(),), pair)
    rep = check_rel_nonexpansive(bad, 2_000)
    assert rep.violations > 0 and rep.witness is not None
    x, y = rep.witness
    assert distance(pair.space, apply(bad, x), apply(bad, y)) > distance(pair.space, x, y)


@pytest.mark.parametrize("name", list(corpus.proximal_cat0_pairs()))
def test_projection_map_containment(name):
    P = make_projection_map(corpus.proximal_cat0_pairs()[name])
    assert check_containment(P, 2000).violations == 0


def test_reflection_containment():
    assert check_containment(corpus.reflection_map(), 2000).violations == 0


def test_hyperbolic_isometries_preserve_distance():
    from geoprox import HyperbolicPlane
    h = HyperbolicPlane()
    c = HyperbolicPlane.from_polar(0.0, 0.0)
    from geoprox import Ball
    pair = PairDescriptor(h, Ball(c, 2.0), Ball(c, 2.0))
    rot = hyperbolic_rotation(0.9)
    assert check_rel_nonexpansive(MapDescriptor("noncyclic", (rot,), (rot,), pair), 2000).violations == 0
    boost = hyperbolic_boost(0.7)
    X = h.sample(np.random.default_rng(1), 100)
    Y = h.sample(np.random.default_rng(2), 100)
    from geoprox.maps import apply_primitive
    BX, BY = apply_primitive(h, boost, X, "A", pair), apply_primitive(h, boost, Y, "A", pair)
    assert np.allclose(h.dist(BX, BY), h.dist(X, Y), atol=1e-9)


def test_tree_automorphism():
    t = MetricTree(["r", "a", "b", "c"], [("r", "a", 1.0), ("r", "b", 1.0), ("r", "c", 2.0)])
    swap = Isometry(vertex_map=(("a", "b"), ("b", "a")))
    S = SubtreeHull((t.vertex_point("a"), t.vertex_point("b")))
    m = MapDescriptor("noncyclic", (swap,), (swap,), PairDescriptor(t, S, S))
    assert check_rel_nonexpansive(m, 1000).violations == 0
    assert distance(t, apply(m, TreePoint(0, 0.25)), t.vertex_point("r")) == pytest.approx(0.25)
    # legs of different length cannot be swapped
    with pytest.raises(ValueError):
        check_primitive(corpus.star_tree(), Isometry(vertex_map=(("a", "b"), ("b", "a"))))


def test_maxnorm_perm_must_fix_first_coordinate():
    with pytest.raises(ValueError):
        check_primitive(MaxNormSeq(3), Isometry(perm=(1, 0, 2)))
    check_primitive(MaxNormSeq(3), Isometry(perm=(0, 2, 1)))


def test_map_json_roundtrip():
    m = corpus.rotation_map()
    m2 = map_from_json(m.pair, map_to_json(m))
    x = corpus.rotation_start(1.0)
    assert np.allclose(apply(m, x).coords, apply(m2, x).coords)


# --- properties -----------------------------------------------------------


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**31), theta=st.floats(-np.pi, np.pi))
def test_isometry_after_projection_map_stays_rel_nonexpansive(seed, theta):
    pair = corpus.proximal_cat0_pairs()["parallel-segments-2d"]
    from geoprox.maps import euclidean_rotation
    g = euclidean_rotation(theta, (0.3, 0.1))
    T = MapDescriptor("cyclic", (ProjectOnto("other"), g), (ProjectOnto("other"), g), pair)
    assert check_rel_nonexpansive(T, 500, seed=seed).violations == 0


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 2**31))
def test_rel_nonexpansive_reports_deterministic(seed):
    P = make_projection_map(corpus.rectangles())
    a = check_rel_nonexpansive(P, 700, seed=seed, upgrade_mode=True).to_json()
    b = check_rel_nonexpansive(P, 700, seed=seed, upgrade_mode=True, threads=3).to_json()
    assert a == b
