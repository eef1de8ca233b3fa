"""Pairs of convex sets: extents, proximal subsets and the proximal-normal-structure witness.

``dist(A, B)`` and ``delta(A, B)`` are computed exactly whenever the set
structure allows it and fall back to seeded sampling otherwise; reports say
which one happened. The farthest distance from a point to a convex set is a
convex function of the point, so suprema are taken over extreme candidates.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from . import sets as cs
from .errors import DegenerateInput, InvalidPoint, UnsupportedSpace
from .spaces import (
    Cat0ClosedForm,
    EuclideanSpace,
    HyperbolicPlane,
    MaxNormSeq,
    MetricTree,
    Space,
    modulus as _modulus,
    norm_maxl2,
)

EXACT_SLACK = 1e-12
ALT_MAX_ITER = 1000
PAIR_CHUNK = 256


@dataclass(frozen=True)
class PairDescriptor:
    space: Space
    A: object
    B: object
    n_samples: int = 2000
    seed: int = 0

    def __post_init__(self):
        cs.check_set(self.space, self.A)
        cs.check_set(self.space, self.B)


@dataclass
class ExtentReport:
    dist_lower: float
    dist_upper: float
    diam_lower: float
    diam_upper: float
    arg_dist: tuple
    arg_diam: tuple
    dist_exact: bool
    diam_exact: bool
    samples: int = 0

    @property
    def dist(self) -> float:
        return self.dist_upper

    @property
    def diam(self) -> float:
        return self.diam_lower

    def to_json(self, space: Space) -> dict:
        pj = lambda p: space.point_to_json(space.encode(p)[0])  # noqa: E731
        return {
            "dist_lower": self.dist_lower,
            "dist_upper": self.dist_upper,
            "diam_lower": self.diam_lower,
            "diam_upper": self.diam_upper,
            "arg_dist": [pj(p) for p in self.arg_dist],
            "arg_diam": [pj(p) for p in self.arg_diam],
            "dist_exact": self.dist_exact,
            "diam_exact": self.diam_exact,
            "samples": self.samples,
        }


@dataclass
class Farthest:
    value: float
    point: object
    exact: bool
    upper: float


# ---------------------------------------------------------------------------
# helpers


def pairwise_dist(space, X, Y):
    """Distance matrix between row sets, computed in blocks."""
    X, Y = np.atleast_2d(X), np.atleast_2d(Y)
    out = np.empty((len(X), len(Y)))
    step = max(1, PAIR_CHUNK * 64 // max(len(Y), 1))
    for i in range(0, len(X), step):
        blk = X[i:i + step]
        out[i:i + step] = space.dist(np.repeat(blk, len(Y), axis=0), np.tile(Y, (len(blk), 1))).reshape(len(blk), len(Y))
    return out


def projectable(space, S) -> bool:
    if isinstance(S, cs.Segment):
        return True
    if isinstance(space, MaxNormSeq):
        return isinstance(S, cs.JamesSlice)
    if isinstance(S, cs.Ball):
        return True
    if isinstance(S, cs.Polytope):
        return isinstance(space, EuclideanSpace)
    return isinstance(S, cs.SubtreeHull) and isinstance(space, MetricTree)


def tree_ball_rows(space: MetricTree, C, r):
    """Vertices inside a tree ball plus its boundary points: a superset of its extreme points."""
    rows = [C]
    Vd = space.dist(np.repeat(C, len(space.vertices), axis=0),
                    np.vstack([space.vertex_row(v) for v in space.vertices]))
    for v, d in zip(space.vertices, Vd):
        if d <= r:
            rows.append(space.vertex_row(v)[None, :])
    ce, co = int(C[0, 0]), float(C[0, 1])
    for e in range(len(space.elen)):
        L = float(space.elen[e])
        a_row = np.array([[e, 0.0]])
        b_row = np.array([[e, L]])
        da = float(space.dist(C, a_row)[0])
        db = float(space.dist(C, b_row)[0])
        offs = [r - da, L - (r - db)]
        if e == ce:
            offs += [co - r, co + r]
        for o in offs:
            if 0.0 <= o <= L:
                p = np.array([[e, o]])
                if abs(float(space.dist(C, p)[0]) - r) <= 1e-12 * max(1.0, r):
                    rows.append(p)
    return np.vstack(rows)


def extreme_rows(space, S):
    """Finite rows containing every extreme point of S, or None."""
    if isinstance(S, (cs.Segment, cs.Polytope, cs.SubtreeHull)):
        return cs.candidates(space, S)
    if isinstance(S, cs.Ball) and isinstance(space, MetricTree):
        return tree_ball_rows(space, space.encode(S.center), float(S.radius))
    return None


def _aux_point(space, C):
    """Rows different from C, used to pick a direction when none is given."""
    if isinstance(space, HyperbolicPlane):
        far = np.array([[np.cosh(1.0), np.sinh(1.0), 0.0]])
        o = space.origin(len(C))
        return np.where((space.dist(C, o) > 0.5)[:, None], o, far)
    Q = C.copy()
    Q[:, 0] += 1.0
    return Q


def _james_farthest(X, R, c):
    """Lower value with witness row and an analytic upper bound, per row of X."""
    X = np.atleast_2d(X)
    n, dim = X.shape
    cand = cs.james_candidates(dim, R, c)
    D = np.stack([norm_maxl2(X - z) for z in cand], axis=1)
    k = D.argmax(axis=1)
    val = D[np.arange(n), k]
    T = X[:, 1:]
    neg = np.sqrt((np.minimum(T, 0.0) ** 2).sum(axis=1))
    pos2 = (np.maximum(T, 0.0) ** 2).sum(axis=1)
    s = np.sqrt(max(2 * R * R - c * c, 0.0))
    inf_sup = np.maximum(np.abs(X[:, 0] - c),
                         np.maximum(np.abs(T), np.abs(R - T)).max(axis=1) if dim > 1 else 0.0)
    l2_sup = np.sqrt((X[:, 0] - c) ** 2 + (neg + s) ** 2 + pos2) / np.sqrt(2.0)
    upper = np.maximum(inf_sup, l2_sup)
    return val, cand[k], upper


def farthest_rows(space, X, S):
    """(values, witness rows, exact mask, upper bounds) for delta(x, S) per row."""
    X = np.atleast_2d(X)
    n = len(X)
    E = extreme_rows(space, S)
    if E is not None:
        D = pairwise_dist(space, X, E)
        k = D.argmax(axis=1)
        val = D[np.arange(n), k]
        return val, E[k], np.ones(n, bool), val
    if isinstance(S, cs.Ball):
        C = np.repeat(space.encode(S.center), n, axis=0)
        r = float(S.radius)
        d = space.dist(X, C)
        toward = np.where((d > 0)[:, None], C, _aux_point(space, C))
        # continue past the centre along the line from x
        W = space.ray(X, toward, d + r)
        same = d == 0
        if np.any(same):
            W[same] = space.ray(C[same], toward[same], np.full(int(same.sum()), r))
        val = d + r
        return val, W, np.ones(n, bool), val
    if isinstance(S, cs.JamesSlice):
        val, W, upper = _james_farthest(X, float(S.radius), float(S.first_coord))
        return val, W, val >= upper - EXACT_SLACK * np.maximum(1.0, upper), upper
    raise UnsupportedSpace(f"no farthest-point rule for {type(S).__name__} on {space.kind}")


def farthest_point(space: Space, x, S, n_samples: int = 2000, seed: int = 0) -> Farthest:
    """delta(x, S) with the attaining point; exact unless sampling was needed."""
    cs.check_set(space, S)
    X = space.encode(x)
    try:
        val, W, exact, upper = farthest_rows(space, X, S)
        return Farthest(float(val[0]), space.decode(W[0]), bool(exact[0]), float(upper[0]))
    except UnsupportedSpace:
        P = cs.sample_rows(space, S, n_samples, seed)
        d = space.dist(np.repeat(X, len(P), axis=0), P)
        k = int(d.argmax())
        return Farthest(float(d[k]), space.decode(P[k]), False, float("inf"))


def farthest(space: Space, x, S, n_samples: int = 2000, seed: int = 0) -> float:
    """delta(x, S) = sup of d(x, s) over s in S."""
    return farthest_point(space, x, S, n_samples, seed).value


def partner_rows(space, X, S, fallback=None):
    """Nearest points of S for rows X, with the distance; uses projection when offered."""
    X = np.atleast_2d(X)
    if projectable(space, S):
        W = cs.project_rows(space, S, X)
        d = space.dist(X, W)
        if isinstance(S, cs.JamesSlice):
            # shifting along e1 onto the slice is often an exact nearest point
            T = X.copy()
            T[:, 0] = float(S.first_coord)
            ok = cs.contains_rows(space, S, T, 0.0)
            dt = space.dist(X, T)
            use = ok & (dt <= d)
            W[use], d = T[use], np.where(use, dt, d)
        return W, d
    P = fallback if fallback is not None else cs.candidates(space, S)
    D = pairwise_dist(space, X, P)
    k = D.argmin(axis=1)
    return P[k], D[np.arange(len(X)), k]


# ---------------------------------------------------------------------------
# extents


def _golden(f, iters=120):
    g = (np.sqrt(5.0) - 1.0) / 2.0
    lo, hi = 0.0, 1.0
    c, d = hi - g * (hi - lo), lo + g * (hi - lo)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - g * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + g * (hi - lo)
            fd = f(d)
    ts = [0.0, 1.0, (lo + hi) / 2.0]
    vals = [f(t) for t in ts]
    k = int(np.argmin(vals))
    return ts[k], vals[k]


def _dist_exact(space, A, B):
    """(value, a_row, b_row) when dist(A, B) has an exact rule, else None."""
    if isinstance(A, cs.Ball) and isinstance(B, cs.Ball):
        C1, C2 = space.encode(A.center), space.encode(B.center)
        r1, r2 = float(A.radius), float(B.radius)
        d = float(space.dist(C1, C2)[0])
        if d <= r1 + r2:
            p = space.combine(C1, C2, min(1.0, r1 / d) if d > 0 else 0.0)
            return 0.0, p, p
        a = space.combine(C1, C2, r1 / d)
        b = space.combine(C2, C1, r2 / d)
        return d - r1 - r2, a, b
    if isinstance(A, cs.Ball) and projectable(space, B):
        C = space.encode(A.center)
        r = float(A.radius)
        K = cs.project_rows(space, B, C)
        d = float(space.dist(C, K)[0])
        a = space.combine(C, K, min(1.0, r / d)) if d > 0 else C
        return max(0.0, d - r), a, K
    if isinstance(B, cs.Ball) and projectable(space, A):
        v, b, a = _dist_exact(space, B, A)
        return v, a, b
    if isinstance(space, EuclideanSpace) and all(isinstance(S, (cs.Segment, cs.Polytope)) for S in (A, B)):
        VA, VB = cs.candidates(space, A), cs.candidates(space, B)
        diff = (VA[:, None, :] - VB[None, :, :]).reshape(-1, space.dim)
        w = kernels.min_norm_point(diff).reshape(len(VA), len(VB))
        a = (w.sum(axis=1) @ VA)[None, :]
        b = (w.sum(axis=0) @ VB)[None, :]
        return float(space.dist(a, b)[0]), a, b
    if isinstance(A, cs.JamesSlice) and isinstance(B, cs.JamesSlice):
        a = np.zeros((1, space.dim))
        b = np.zeros((1, space.dim))
        a[0, 0], b[0, 0] = A.first_coord, B.first_coord
        return abs(float(A.first_coord) - float(B.first_coord)), a, b
    seg_ok = space.is_busemann or isinstance(space, MaxNormSeq)
    if seg_ok and isinstance(A, cs.Segment) and projectable(space, B):
        P, Q = cs.candidates(space, A)[0:1], cs.candidates(space, A)[1:2]

        def f(t):
            z = space.combine(P, Q, t)
            return float(space.dist(z, cs.project_rows(space, B, z))[0])

        t, _ = _golden(f)
        a = space.combine(P, Q, t)
        b = cs.project_rows(space, B, a)
        return float(space.dist(a, b)[0]), a, b
    if seg_ok and isinstance(B, cs.Segment) and projectable(space, A):
        v, b, a = _dist_exact(space, B, A)
        return v, a, b
    if space.is_cat0 and projectable(space, A) and projectable(space, B):
        a = cs.candidates(space, A)[0:1]
        for _ in range(ALT_MAX_ITER):
            b = cs.project_rows(space, B, a)
            a_next = cs.project_rows(space, A, b)
            step = float(space.dist(a, a_next)[0])
            a = a_next
            if step <= 1e-15:
                b = cs.project_rows(space, B, a)
                return float(space.dist(a, b)[0]), a, b
    return None


def _diam_structured(space, A, B):
    """(lower, upper, a_row, b_row) when delta(A, B) has a rule, else None."""
    for first, other, swap in ((A, B, False), (B, A, True)):
        E = extreme_rows(space, first)
        if E is None:
            continue
        try:
            val, W, exact, upper = farthest_rows(space, E, other)
        except UnsupportedSpace:
            continue
        k = int(val.argmax())
        a, b = E[k:k + 1], W[k:k + 1]
        if swap:
            a, b = b, a
        return float(val[k]), float(upper.max()), a, b
    if isinstance(A, cs.Ball) and isinstance(B, cs.Ball) and not isinstance(space, MetricTree):
        C1, C2 = space.encode(A.center), space.encode(B.center)
        r1, r2 = float(A.radius), float(B.radius)
        d = float(space.dist(C1, C2)[0])
        Q = C2 if d > 0 else _aux_point(space, C1)
        # both ends of the line through the centres
        a = space.ray(C1, Q, np.array([-r1]))
        b = space.ray(C1, Q, np.array([d + r2 if d > 0 else r2]))
        v = float(space.dist(a, b)[0])
        return v, d + r1 + r2, a, b
    if isinstance(A, cs.JamesSlice) and isinstance(B, cs.JamesSlice):
        cA, RA, cB, RB = float(A.first_coord), float(A.radius), float(B.first_coord), float(B.radius)
        CA = cs.james_candidates(space.dim, RA, cA)
        CB = cs.james_candidates(space.dim, RB, cB)
        D = pairwise_dist(space, CA, CB)
        i, j = np.unravel_index(int(D.argmax()), D.shape)
        l2 = np.sqrt((cA - cB) ** 2 + max(2 * RA * RA - cA * cA, 0.0) + max(2 * RB * RB - cB * cB, 0.0))
        upper = max(abs(cA - cB), RA if space.dim > 1 else 0.0, RB if space.dim > 1 else 0.0, l2 / np.sqrt(2.0))
        return float(D[i, j]), float(upper), CA[i:i + 1], CB[j:j + 1]
    return None


def _first_coord(space, S):
    """The common first coordinate of a vector-space set lying in {x1 = c}, else None."""
    if isinstance(S, cs.JamesSlice):
        return float(S.first_coord)
    if isinstance(S, (cs.Segment, cs.Polytope)) and isinstance(space, (EuclideanSpace, MaxNormSeq)):
        V = cs.candidates(space, S)
        if np.all(V[:, 0] == V[0, 0]):
            return float(V[0, 0])
    return None


def pair_extents(pair: PairDescriptor) -> ExtentReport:
    """dist(A, B) and delta(A, B) with attaining points and exactness flags."""
    space, A, B = pair.space, pair.A, pair.B
    samples = 0
    SA = SB = None

    def sampled():
        nonlocal SA, SB, samples
        if SA is None:
            SA = cs.sample_rows(space, A, pair.n_samples, pair.seed)
            SB = cs.sample_rows(space, B, pair.n_samples, pair.seed + 1)
            samples = len(SA) + len(SB)
        return SA, SB

    ex = _dist_exact(space, A, B)
    if ex is not None:
        dv, da, db = ex
        d_lo, d_hi, d_exact = dv, dv, True
    else:
        XA, XB = sampled()
        W, d = partner_rows(space, XA, B, fallback=XB)
        k = int(d.argmin())
        d_hi = float(d[k])
        da, db = XA[k:k + 1], W[k:k + 1]
        cA, cB = _first_coord(space, A), _first_coord(space, B)
        # sets on two hyperplanes x1 = const are at least |cA - cB| apart in either norm
        d_lo = min(d_hi, abs(cA - cB)) if cA is not None and cB is not None else d_hi
        d_exact = cA is not None and cB is not None and d_hi - d_lo <= EXACT_SLACK * max(1.0, d_hi)

    st = _diam_structured(space, A, B)
    if st is not None:
        lo, hi, ga, gb = st
        g_exact = lo >= hi - EXACT_SLACK * max(1.0, hi)
        if g_exact:
            hi = max(hi, lo)
    else:
        XA, XB = sampled()
        D = pairwise_dist(space, XA, XB)
        i, j = np.unravel_index(int(D.argmax()), D.shape)
        lo = hi = float(D[i, j])
        ga, gb, g_exact = XA[i:i + 1], XB[j:j + 1], False
    if g_exact:
        hi = lo
    return ExtentReport(
        dist_lower=float(d_lo), dist_upper=float(d_hi),
        diam_lower=float(lo), diam_upper=float(max(hi, lo)),
        arg_dist=(space.decode(da[0]), space.decode(db[0])),
        arg_diam=(space.decode(ga[0]), space.decode(gb[0])),
        dist_exact=d_exact, diam_exact=bool(g_exact), samples=samples,
    )


# ---------------------------------------------------------------------------
# proximal subsets


@dataclass
class MinSetsReport:
    """Certified samples of A0 and B0, each paired with its partner.

    ``status`` is ``"EmptyWitness"`` when some side has no certified point;
    ``expected_nonempty`` records whether the space guarantees one exists.
    """

    status: str
    dist: float
    a0: np.ndarray
    a0_partners: np.ndarray
    b0: np.ndarray
    b0_partners: np.ndarray
    samples: int
    expected_nonempty: bool

    def points(self, space, side="A"):
        return space.decode(self.a0 if side == "A" else self.b0)

    def to_json(self, space) -> dict:
        pj = space.point_to_json
        return {
            "status": self.status,
            "dist": self.dist,
            "a0": [[pj(p), pj(q)] for p, q in zip(self.a0, self.a0_partners)],
            "b0": [[pj(p), pj(q)] for p, q in zip(self.b0, self.b0_partners)],
            "samples": self.samples,
            "expected_nonempty": self.expected_nonempty,
        }


def spread_subset(space, X, k):
    """Indices of k rows chosen by greedy farthest-point traversal."""
    idx = [0]
    d = space.dist(X, X[0:1])
    for _ in range(min(k, len(X)) - 1):
        j = int(d.argmax())
        if d[j] == 0.0:
            break
        idx.append(j)
        d = np.minimum(d, space.dist(X, X[j:j + 1]))
    return np.array(idx)


def _certified_side(space, S, T, dist, n, seed, tol, densify, refine=50, known=None):
    X = cs.sample_rows(space, S, n, seed)
    W, d = partner_rows(space, X, T, fallback=cs.sample_rows(space, T, n, seed + 1))
    if known is not None:
        # the pair realizing dist in the extents; keeps thin A0 (a single crossing point) nonempty
        K, KW = space.encode(known[0]), space.encode(known[1])
        X, W, d = np.vstack([K, X]), np.vstack([KW, W]), np.concatenate([space.dist(K, KW), d])
    if projectable(space, S) and projectable(space, T) and space.is_cat0:
        # alternating projections move each sample into the proximal subset
        for _ in range(refine):
            bad = d > dist + tol
            if not np.any(bad):
                break
            X[bad] = cs.project_rows(space, S, W[bad])
            W[bad], d[bad] = partner_rows(space, X[bad], T)
    ok = d <= dist + tol
    X, W = X[ok], W[ok]
    if densify and len(X) > 1:
        rng = np.random.default_rng(np.random.SeedSequence([int(seed), 7]))
        i = rng.integers(0, len(X), densify)
        # partner each pick with the farthest of a spread subset so segments span the set
        J = spread_subset(space, X, 32)
        dj = pairwise_dist(space, X[i], X[J])
        j = J[dj.argmax(axis=1)]
        t = rng.uniform(0, 1, densify)
        # geodesic combinations of certified pairs stay certified by convexity of the metric
        M = space.combine(X[i], X[j], t)
        N = space.combine(W[i], W[j], t)
        keep = space.dist(M, N) <= dist + tol
        X = np.vstack([X, M[keep]])
        W = np.vstack([W, N[keep]])
    return X, W


def min_sets(pair: PairDescriptor, tol: float = 1e-9, densify: Optional[int] = None,
             extents: Optional[ExtentReport] = None) -> MinSetsReport:
    """Sample A0 = {a in A : d(a, b) = dist(A, B) for some b in B} and B0 likewise."""
    space = pair.space
    ext = extents or pair_extents(pair)
    dist = ext.dist_upper
    densify = pair.n_samples if densify is None else int(densify)
    known = tuple(ext.arg_dist) if len(ext.arg_dist) == 2 else None
    a0, a0w = _certified_side(space, pair.A, pair.B, dist, pair.n_samples, pair.seed, tol, densify,
                              known=known)
    b0, b0w = _certified_side(space, pair.B, pair.A, dist, pair.n_samples, pair.seed + 2, tol, densify,
                              known=known[::-1] if known else None)
    empty = len(a0) == 0 or len(b0) == 0
    return MinSetsReport(
        status="EmptyWitness" if empty else "ok",
        dist=dist, a0=a0, a0_partners=a0w, b0=b0, b0_partners=b0w,
        samples=2 * pair.n_samples,
        expected_nonempty=bool(space.is_busemann),
    )


@dataclass
class ProximalReport:
    proximal: bool
    counterexample: object
    side: Optional[str]
    checked: int
    dist: float
    approximate: bool = False

    def to_json(self, space) -> dict:
        cx = None if self.counterexample is None else space.point_to_json(space.encode(self.counterexample)[0])
        return {"proximal": self.proximal, "counterexample": cx, "side": self.side,
                "checked": self.checked, "dist": self.dist, "approximate": self.approximate}


def is_proximal(pair: PairDescriptor, tol: float = 1e-9, extents: Optional[ExtentReport] = None) -> ProximalReport:
    """Sampled check that every point of A and of B has a partner at distance dist(A, B)."""
    space = pair.space
    ext = extents or pair_extents(pair)
    dist = ext.dist_upper
    approx = not (projectable(space, pair.A) and projectable(space, pair.B))
    checked = 0
    for side, S, T, seed in (("A", pair.A, pair.B, pair.seed), ("B", pair.B, pair.A, pair.seed + 2)):
        X = cs.sample_rows(space, S, pair.n_samples, seed)
        _, d = partner_rows(space, X, T, fallback=cs.sample_rows(space, T, pair.n_samples, seed + 1))
        checked += len(X)
        bad = np.flatnonzero(d > dist + tol)
        if len(bad):
            return ProximalReport(False, space.decode(X[bad[0]]), side, checked, dist, approx)
    return ProximalReport(True, None, None, checked, dist, approx)


# ---------------------------------------------------------------------------
# proximal normal structure


@dataclass
class PnsWitness:
    m1: object
    m2: object
    alpha: float
    delta_m1_H2: float
    delta_m2_H1: float
    diam: float
    eps: float
    holds: bool = field(default=False)

    def to_json(self, space) -> dict:
        pj = lambda p: space.point_to_json(space.encode(p)[0])  # noqa: E731
        return {"m1": pj(self.m1), "m2": pj(self.m2), "alpha": self.alpha,
                "delta_m1_H2": self.delta_m1_H2, "delta_m2_H1": self.delta_m2_H1,
                "diam": self.diam, "eps": self.eps, "holds": self.holds}


def pns_witness(space: Space, H1, H2, x, y, modulus=None, tol: float = 1e-9,
                n_samples: int = 2000, seed: int = 0) -> PnsWitness:
    """Points of H1 and H2 whose farthest distance to the other set drops below delta(H1, H2).

    With partners ``x', y'`` of ``x, y`` in H2, the midpoints
    ``m1 = (x + y)/2`` and ``m2 = (x' + y')/2`` satisfy
    ``delta(m1, H2) <= alpha * delta(H1, H2)`` where
    ``alpha = 1 - delta_X(D, eps/D)``, ``D = delta(H1, H2)`` and
    ``eps = min(d(x, y), d(x', y'))``.
    """
    if not space.is_uniformly_convex:
        raise UnsupportedSpace(f"{space.kind} is not uniformly convex")
    modulus = Cat0ClosedForm() if modulus is None else modulus
    X, Y = space.encode(x), space.encode(y)
    for P in (X, Y):
        if not cs.contains_rows(space, H1, P, 1e-7)[0]:
            raise InvalidPoint("x and y must lie in H1")
    dxy = float(space.dist(X, Y)[0])
    if dxy <= tol:
        raise DegenerateInput("x and y coincide")
    Xp, _ = partner_rows(space, X, H2)
    Yp, _ = partner_rows(space, Y, H2)
    eps = min(dxy, float(space.dist(Xp, Yp)[0]))
    if eps <= tol:
        raise DegenerateInput("the partners of x and y coincide")
    D = pair_extents(PairDescriptor(space, H1, H2, n_samples, seed)).diam_lower
    alpha = 1.0 - _modulus(modulus, space, D, min(eps / D, 2.0))
    M1, M2 = space.midpoint(X, Y), space.midpoint(Xp, Yp)
    d1 = farthest(space, space.decode(M1[0]), H2, n_samples, seed)
    d2 = farthest(space, space.decode(M2[0]), H1, n_samples, seed)
    holds = d1 <= alpha * D + tol and d2 <= alpha * D + tol and d1 < D and d2 < D
    return PnsWitness(space.decode(M1[0]), space.decode(M2[0]), float(alpha), float(d1), float(d2),
                      float(D), float(eps), bool(holds))
