"""Pure numpy/Python implementations of the hot kernels.

These mirror ``_ckernels.pyx`` argument-for-argument and are used when the
compiled module is unavailable (or ``GEOPROX_PURE_PYTHON=1``).
"""
import numpy as np

from ..errors import NoConvergence


def _route(e1, o1, e2, o2, ea, eb, elen, D):
    """Candidate path lengths through each endpoint pair, shape (n, 4)."""
    a1, b1 = ea[e1], eb[e1]
    a2, b2 = ea[e2], eb[e2]
    da1, db1 = o1, elen[e1] - o1
    da2, db2 = o2, elen[e2] - o2
    return np.stack([
        da1 + D[a1, a2] + da2,
        da1 + D[a1, b2] + db2,
        db1 + D[b1, a2] + da2,
        db1 + D[b1, b2] + db2,
    ], axis=-1)


def tree_dist(e1, o1, e2, o2, ea, eb, elen, D):
    cand = _route(e1, o1, e2, o2, ea, eb, elen, D)
    out = cand.min(axis=-1)
    same = e1 == e2
    out[same] = np.abs(o1[same] - o2[same])
    return out


def tree_combine(e1, o1, e2, o2, t, ea, eb, elen, D, nxt, edge_of):
    n = len(e1)
    out_e = np.empty(n, dtype=np.int64)
    out_o = np.empty(n, dtype=np.float64)
    cand = _route(e1, o1, e2, o2, ea, eb, elen, D)
    choice = cand.argmin(axis=-1)
    for i in range(n):
        p_e, p_o, q_e, q_o, ti = int(e1[i]), float(o1[i]), int(e2[i]), float(o2[i]), float(t[i])
        if p_e == q_e:
            out_e[i] = p_e
            out_o[i] = (1.0 - ti) * p_o + ti * q_o
            continue
        c = int(choice[i])
        total = float(cand[i, c])
        s = ti * total
        # leg 1: along p's edge to endpoint u
        if c < 2:
            u, leg = int(ea[p_e]), p_o
            if s <= leg:
                out_e[i], out_o[i] = p_e, p_o - s
                continue
        else:
            u, leg = int(eb[p_e]), elen[p_e] - p_o
            if s <= leg:
                out_e[i], out_o[i] = p_e, p_o + s
                continue
        s -= leg
        v = int(ea[q_e]) if c % 2 == 0 else int(eb[q_e])
        cur = u
        placed = False
        while cur != v:
            w = int(nxt[v, cur])
            e = int(edge_of[cur, w])
            le = float(elen[e])
            if s <= le:
                out_e[i] = e
                out_o[i] = s if ea[e] == cur else le - s
                placed = True
                break
            s -= le
            cur = w
        if placed:
            continue
        # final leg: from v along q's edge
        out_e[i] = q_e
        if v == ea[q_e]:
            out_o[i] = min(s, q_o)
        else:
            out_o[i] = max(elen[q_e] - s, q_o)
    return out_e, out_o


def _affine_min(Q):
    """Weights summing to one minimizing the norm over the affine hull of rows of Q."""
    k = Q.shape[0]
    M = np.zeros((k + 1, k + 1))
    M[:k, :k] = Q @ Q.T
    M[:k, k] = 1.0
    M[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    return np.linalg.solve(M, rhs)[:k]


def min_norm_point(P, tol=1e-13, max_iter=100_000):
    """Wolfe's algorithm: convex weights of the minimum-norm point of conv(rows of P)."""
    P = np.ascontiguousarray(P, dtype=np.float64)
    m = P.shape[0]
    norms = np.einsum("ij,ij->i", P, P)
    scale = max(1.0, float(norms.max()))
    j = int(np.argmin(norms))
    S = [j]
    w = np.array([1.0])
    x = P[j].copy()
    for _ in range(max_iter):
        dots = P @ x
        j = int(np.argmin(dots))
        if x @ x - dots[j] <= tol * scale or j in S:
            break
        S.append(j)
        w = np.append(w, 0.0)
        while True:
            v = _affine_min(P[S])
            if np.all(v > 1e-15):
                w = v
                break
            mask = v <= 1e-15
            den = w - v
            ratio = np.where(mask & (den > 0), w / np.where(den > 0, den, 1.0), np.inf)
            ratio[mask & (den <= 0)] = 0.0
            blocking = int(np.argmin(ratio))
            theta = float(ratio[blocking])
            w = w + theta * (v - w)
            w[blocking] = 0.0
            w[w <= 1e-15] = 0.0
            keep = w > 0.0
            S = [s for s, kk in zip(S, keep) if kk]
            w = w[keep]
            w /= w.sum()
        x = w @ P[S]
    else:
        raise NoConvergence("min-norm-point iteration budget exhausted")
    out = np.zeros(m)
    out[S] = w
    return out
