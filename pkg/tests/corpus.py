"""Fixed instances shared by the unit tests and the acceptance run."""
import numpy as np

from geoprox import (
    Ball,
    EuclideanSpace,
    EuclideanVec as E,
    HyperbolicPlane,
    Identity,
    Isometry,
    MapDescriptor,
    MetricTree,
    PairDescriptor,
    Polytope,
    ProjectOnto,
    Segment,
    SubtreeHull,
    TreePoint,
    singleton,
)
from geoprox.maps import euclidean_rotation

H = HyperbolicPlane


def box(x0, x1, y0, y1):
    return Polytope((E((x0, y0)), E((x1, y0)), E((x1, y1)), E((x0, y1))))


def rectangles():
    """A = [-2,-1] x [-1,1], B = [1,2] x [0,2]; dist 2, A0 = {-1} x [0,1]."""
    return PairDescriptor(EuclideanSpace(2), box(-2, -1, -1, 1), box(1, 2, 0, 2))


def symmetric_rectangles():
    return PairDescriptor(EuclideanSpace(2), box(-2, -1, -1, 1), box(1, 2, -1, 1))


def reflection_map():
    flip = Isometry(matrix=((1.0, 0.0), (0.0, -1.0)))
    return MapDescriptor("noncyclic", (flip,), (flip,), symmetric_rectangles())


ROTATION_CENTER = (0.5, -0.25)


def rotation_map(theta=np.pi / 3, radius=3.0):
    """Rotation about the center of a disk, noncyclic on A = B = disk; fixed point is the center."""
    disk = Ball(E(ROTATION_CENTER), radius)
    pair = PairDescriptor(EuclideanSpace(2), disk, disk)
    rot = euclidean_rotation(theta, ROTATION_CENTER)
    return MapDescriptor("noncyclic", (rot,), (rot,), pair)


def rotation_start(b, angle=0.3):
    c = np.asarray(ROTATION_CENTER)
    return E(tuple(c + b * np.array([np.cos(angle), np.sin(angle)])))


def star_tree():
    """Center r with legs a (1), b (2), c (1.5), d (0.5)."""
    return MetricTree(["r", "a", "b", "c", "d"],
                      [("r", "a", 1.0), ("r", "b", 2.0), ("r", "c", 1.5), ("r", "d", 0.5)])


def caterpillar_tree():
    """Spine 0-1-2-3 with a leg hanging from each spine vertex."""
    edges = [(0, 1, 1.0), (1, 2, 0.7), (2, 3, 1.3),
             (0, 10, 0.4), (1, 11, 1.1), (2, 12, 0.9), (3, 13, 2.0)]
    return MetricTree([0, 1, 2, 3, 10, 11, 12, 13], edges)


def fixed_trees():
    return [star_tree(), caterpillar_tree()]


def proximal_cat0_pairs():
    """Six proximal pairs in CAT(0) spaces, named."""
    e2, e3, e8 = EuclideanSpace(2), EuclideanSpace(3), EuclideanSpace(8)
    h = H()
    t = caterpillar_tree()
    sq = [(0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0)]
    return {
        "parallel-segments-2d": PairDescriptor(
            e2, Segment(E((0, 0)), E((0, 1))), Segment(E((1, 0)), E((1, 1)))),
        "translated-squares-3d": PairDescriptor(
            e3, Polytope(tuple(E(v) for v in sq)), Polytope(tuple(E((x, y, 2.0)) for x, y, _ in sq))),
        "ball-8d": PairDescriptor(e8, Ball(E((0.5,) * 8), 1.5), Ball(E((0.5,) * 8), 1.5)),
        "hyperbolic-ball": PairDescriptor(h, Ball(H.from_polar(0.7, 1.0), 1.2), Ball(H.from_polar(0.7, 1.0), 1.2)),
        "hyperbolic-singletons": PairDescriptor(h, singleton(H.from_polar(0.0, 0.0)),
                                                singleton(H.from_polar(1.5, 2.0))),
        "tree-subtree": PairDescriptor(
            t, SubtreeHull((t.vertex_point(10), t.vertex_point(12), TreePoint(6, 1.0))),
            SubtreeHull((t.vertex_point(10), t.vertex_point(12), TreePoint(6, 1.0)))),
    }


def projection_and_identity(pair):
    from geoprox import make_projection_map
    return make_projection_map(pair), MapDescriptor("noncyclic", (Identity(),), (Identity(),), pair)


def pns_instances(n=20, seed=2024):
    """Seeded (space, H1, H2, x, y) tuples on uniformly convex spaces.

    Kinds cycle through: a planar polytope in R^3 and its translate along the
    normal, A = B Euclidean ball, A = B Euclidean segment, A = B hyperbolic
    ball, A = B subtree.
    """
    rng = np.random.default_rng(seed)
    out = []
    for k in range(n):
        kind = k % 5
        if kind == 0:
            sp = EuclideanSpace(3)
            m = int(rng.integers(3, 7))
            pts = rng.uniform(-1, 1, (m, 2))
            h = float(rng.uniform(0.5, 2.0))
            H1 = Polytope(tuple(E((a, b, 0.0)) for a, b in pts))
            H2 = Polytope(tuple(E((a, b, h)) for a, b in pts))
            x, y = H1.vertices[0], H1.vertices[1]
        elif kind == 1:
            d = int(rng.integers(2, 6))
            sp = EuclideanSpace(d)
            c, r = rng.normal(size=d), float(rng.uniform(0.5, 2.0))
            H1 = H2 = Ball(E(c), r)
            u, v = rng.normal(size=(2, d))
            x = E(c + r * rng.uniform(0.2, 1.0) * u / np.linalg.norm(u))
            y = E(c + r * rng.uniform(0.2, 1.0) * v / np.linalg.norm(v))
        elif kind == 2:
            sp = EuclideanSpace(2)
            a, b = rng.normal(size=(2, 2))
            H1 = H2 = Segment(E(a), E(b))
            s, t = rng.uniform(0, 1, 2)
            x, y = E(a + s * (b - a)), E(a + t * (b - a))
        elif kind == 3:
            sp = H()
            c = H.from_polar(float(rng.uniform(0, 1.5)), float(rng.uniform(0, 2 * np.pi)))
            r = float(rng.uniform(0.3, 1.5))
            H1 = H2 = Ball(c, r)
            C = sp.encode(c)
            X = sp.exp(C, sp.random_tangent(rng, C, rng.uniform(0.2, 1.0, 1) * r))
            Y = sp.exp(C, sp.random_tangent(rng, C, rng.uniform(0.2, 1.0, 1) * r))
            x, y = sp.decode(X[0]), sp.decode(Y[0])
        else:
            sp = caterpillar_tree() if k % 2 else star_tree()
            verts = sp.vertices
            picks = rng.choice(len(verts), size=3, replace=False)
            H1 = H2 = SubtreeHull(tuple(sp.vertex_point(verts[i]) for i in picks))
            x, y = H1.generators[0], H1.generators[1]
        out.append((sp, H1, H2, x, y))
    return out
