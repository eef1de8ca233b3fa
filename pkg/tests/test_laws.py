import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from geoprox import (
    EuclideanSpace,
    EuclideanVec as E,
    HyperbolicPlane,
    LawId,
    MaxNormSeq,
    MaxNormVec as M,
    UnsupportedSpace,
    four_point_holds,
    parallel_to,
    verify_law,
)
from geoprox.laws import _merge, _Partial, comparison_vertices, four_point_sides

import corpus


def test_four_point_degenerate():
    x = E((0.5, 0.5))
    assert four_point_holds(EuclideanSpace(2), x, x, x, x)


def test_four_point_square_equality():
    sp = EuclideanSpace(2)
    X, Y, Z, P = (sp.encode(E(p)) for p in [(0, 0), (1, 0), (1, 1), (0, 1)])
    lhs, rhs = four_point_sides(sp, X, Y, Z, P)
    assert lhs[0] == pytest.approx(4.0) and rhs[0] == pytest.approx(4.0)
    assert four_point_holds(sp, *(sp.decode(R[0]) for R in (X, Y, Z, P)))


def test_four_point_maxnorm_counterexample():
    sp = MaxNormSeq(2)
    pts = [M((0, 0)), M((1, 1)), M((2, 0)), M((1, -1))]
    lhs, rhs = four_point_sides(sp, *(sp.encode(p) for p in pts))
    assert lhs[0] == pytest.approx(8.0) and rhs[0] == pytest.approx(4.0)
    assert not four_point_holds(sp, *pts)


def test_parallel_examples():
    sp = EuclideanSpace(2)
    x = E((0, 0))
    y = E((0, 1))
    assert parallel_to(sp, x, x, y, y)
    assert parallel_to(sp, x, E((2, 0)), y, E((2, 1)))
    assert not parallel_to(sp, x, E((2, 0)), y, E((3, 1)))


def test_parallel_refused_on_maxnorm():
    with pytest.raises(UnsupportedSpace):
        parallel_to(MaxNormSeq(2), M((0, 0)), M((1, 0)), M((0, 1)), M((1, 1)))
    with pytest.raises(UnsupportedSpace):
        verify_law(MaxNormSeq(2), "parallel-transfer", 10)


def test_comparison_vertices_reproduce_sides():
    # a = |yz|, b = |xz|, c = |xy|
    a, b, c = 3.0, 4.0, 5.0
    X, Y, Z = (np.asarray(v)[0] for v in comparison_vertices(np.array([a]), np.array([b]), np.array([c])))
    assert np.linalg.norm(Y - Z) == pytest.approx(a)
    assert np.linalg.norm(X - Z) == pytest.approx(b)
    assert np.linalg.norm(X - Y) == pytest.approx(c)


@pytest.mark.parametrize("law", list(LawId))
def test_zero_samples_vacuous(law):
    rep = verify_law(EuclideanSpace(2), law, n_samples=0)
    assert rep.violations == 0 and rep.samples_run == 0 and rep.witness is None


def test_euclidean_dim3_four_point_1e5():
    rep = verify_law(EuclideanSpace(3), "cat0-four-point", 100_000, seed=1)
    assert rep.violations == 0 and rep.samples_run == 100_000


def test_maxnorm_violations_have_witness():
    rep = verify_law(MaxNormSeq(2), LawId.CAT0_FOUR_POINT, 10_000, seed=0)
    assert rep.violations > 0
    assert not four_point_holds(MaxNormSeq(2), *rep.witness)


def test_unknown_law_name():
    with pytest.raises(ValueError):
        verify_law(EuclideanSpace(2), "flatness", 10)


def test_report_json_field_order():
    rep = verify_law(corpus.star_tree(), "busemann", 100)
    assert list(rep.to_json()) == ["law", "space", "samples_run", "violations", "worst_margin",
                                   "witness", "seed", "tolerance"]


def test_strict_law_reports_zero_tolerance():
    assert verify_law(EuclideanSpace(2), "strict-convexity", 50).tolerance == 0.0


@pytest.mark.parametrize("law", ["busemann", "comparison-triangle", "projection-ray"])
def test_deterministic_and_thread_invariant(law):
    sp = HyperbolicPlane()
    a = verify_law(sp, law, 2_300, seed=9, threads=1).to_json()
    b = verify_law(sp, law, 2_300, seed=9, threads=4).to_json()
    assert a == b


# --- properties -----------------------------------------------------------

partials = st.builds(
    _Partial,
    st.integers(0, 100), st.integers(0, 100), st.floats(-1, 1),
    st.one_of(st.none(), st.lists(st.integers(), min_size=1, max_size=2)),
)


@given(partials, partials, partials)
def test_merge_associative(a, b, c):
    assert _merge(_merge(a, b), c) == _merge(a, _merge(b, c))


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 2**31), n=st.integers(1, 1200))
def test_samples_run_matches_request(seed, n):
    rep = verify_law(corpus.caterpillar_tree(), "convex-metric", n, seed=seed)
    assert rep.samples_run == n and rep.violations == 0
