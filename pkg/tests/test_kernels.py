import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from geoprox import kernels

import corpus

BACKENDS = ["python"] + (["cython"] if kernels.compiled_available() else [])


def _tree_inputs(tree, seed, n=200):
    rng = np.random.default_rng(seed)
    X, Y = tree.sample(rng, n), tree.sample(rng, n)
    # include same-edge pairs and vertex endpoints
    Y[:20, 0] = X[:20, 0]
    X[20:30, 1] = 0.0
    e1, o1 = X[:, 0].astype(np.int64), np.ascontiguousarray(X[:, 1])
    e2, o2 = Y[:, 0].astype(np.int64), np.ascontiguousarray(Y[:, 1])
    return e1, o1, e2, o2, rng.uniform(0, 1, n)


def test_compiled_backend_builds():
    # the wheel is built with the extension; a missing build is a packaging failure
    assert kernels.compiled_available()


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31), which=st.sampled_from(["star", "caterpillar"]))
def test_tree_kernels_agree(seed, which):
    tree = corpus.star_tree() if which == "star" else corpus.caterpillar_tree()
    e1, o1, e2, o2, t = _tree_inputs(tree, seed)
    tables = (tree.ea, tree.eb, tree.elen, tree.D)
    ref = kernels.get_backend("python")
    d_ref = ref.tree_dist(e1, o1, e2, o2, *tables)
    c_ref = ref.tree_combine(e1, o1, e2, o2, t, *tables, tree.nxt, tree.edge_of)
    for name in BACKENDS:
        k = kernels.get_backend(name)
        assert np.allclose(k.tree_dist(e1, o1, e2, o2, *tables), d_ref, rtol=0, atol=1e-12)
        ce, co = k.tree_combine(e1, o1, e2, o2, t, *tables, tree.nxt, tree.edge_of)
        # compare as points: the same location can sit at an edge end or the next edge's start
        got = tree.dist(np.column_stack([ce, co]), np.column_stack(c_ref))
        assert np.all(got <= 1e-12)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31), m=st.integers(1, 30), d=st.integers(1, 6))
def test_min_norm_point_agrees_and_is_optimal(seed, m, d):
    rng = np.random.default_rng(seed)
    P = rng.normal(size=(m, d)) + rng.normal(size=d) * 2
    for name in BACKENDS:
        w = np.asarray(kernels.get_backend(name).min_norm_point(P))
        assert np.all(w >= -1e-12) and abs(w.sum() - 1) <= 1e-12
        x = w @ P
        # optimality: <x, p - x> >= 0 for every vertex p
        assert np.all(P @ x - x @ x >= -1e-9 * (1 + np.abs(P).max() ** 2))


def test_pure_python_switch():
    env = dict(os.environ, GEOPROX_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import geoprox; print(geoprox.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
