# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: tree geodesics and Wolfe's min-norm point."""
import numpy as np

from libc.math cimport fabs
from libc.stdint cimport int64_t

from ..errors import NoConvergence


cdef inline double _route(int64_t p_e, double p_o, int64_t q_e, double q_o,
                          const int64_t[::1] ea, const int64_t[::1] eb,
                          const double[::1] elen, const double[:, ::1] D,
                          int* choice) noexcept nogil:
    cdef double da1 = p_o, db1 = elen[p_e] - p_o
    cdef double da2 = q_o, db2 = elen[q_e] - q_o
    cdef double c0 = da1 + D[ea[p_e], ea[q_e]] + da2
    cdef double c1 = da1 + D[ea[p_e], eb[q_e]] + db2
    cdef double c2 = db1 + D[eb[p_e], ea[q_e]] + da2
    cdef double c3 = db1 + D[eb[p_e], eb[q_e]] + db2
    cdef double best = c0
    choice[0] = 0
    if c1 < best:
        best = c1
        choice[0] = 1
    if c2 < best:
        best = c2
        choice[0] = 2
    if c3 < best:
        best = c3
        choice[0] = 3
    return best


def tree_dist(const int64_t[::1] e1, const double[::1] o1,
              const int64_t[::1] e2, const double[::1] o2,
              const int64_t[::1] ea, const int64_t[::1] eb,
              const double[::1] elen, const double[:, ::1] D):
    cdef Py_ssize_t n = e1.shape[0], i
    cdef int choice
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] res = out
    with nogil:
        for i in range(n):
            if e1[i] == e2[i]:
                res[i] = fabs(o1[i] - o2[i])
            else:
                res[i] = _route(e1[i], o1[i], e2[i], o2[i], ea, eb, elen, D, &choice)
    return out


def tree_combine(const int64_t[::1] e1, const double[::1] o1,
                 const int64_t[::1] e2, const double[::1] o2, const double[::1] t,
                 const int64_t[::1] ea, const int64_t[::1] eb,
                 const double[::1] elen, const double[:, ::1] D,
                 const int64_t[:, ::1] nxt, const int64_t[:, ::1] edge_of):
    cdef Py_ssize_t n = e1.shape[0], i
    cdef int choice
    cdef int64_t p_e, q_e, u, v, cur, w, e
    cdef double p_o, q_o, s, leg, le
    cdef bint placed
    out_e_arr = np.empty(n, dtype=np.int64)
    out_o_arr = np.empty(n, dtype=np.float64)
    cdef int64_t[::1] out_e = out_e_arr
    cdef double[::1] out_o = out_o_arr
    with nogil:
        for i in range(n):
            p_e = e1[i]
            p_o = o1[i]
            q_e = e2[i]
            q_o = o2[i]
            if p_e == q_e:
                out_e[i] = p_e
                out_o[i] = (1.0 - t[i]) * p_o + t[i] * q_o
                continue
            s = t[i] * _route(p_e, p_o, q_e, q_o, ea, eb, elen, D, &choice)
            if choice < 2:
                u = ea[p_e]
                leg = p_o
                if s <= leg:
                    out_e[i] = p_e
                    out_o[i] = p_o - s
                    continue
            else:
                u = eb[p_e]
                leg = elen[p_e] - p_o
                if s <= leg:
                    out_e[i] = p_e
                    out_o[i] = p_o + s
                    continue
            s -= leg
            v = ea[q_e] if choice % 2 == 0 else eb[q_e]
            cur = u
            placed = False
            while cur != v:
                w = nxt[v, cur]
                e = edge_of[cur, w]
                le = elen[e]
                if s <= le:
                    out_e[i] = e
                    out_o[i] = s if ea[e] == cur else le - s
                    placed = True
                    break
                s -= le
                cur = w
            if placed:
                continue
            out_e[i] = q_e
            if v == ea[q_e]:
                out_o[i] = s if s < q_o else q_o
            else:
                le = elen[q_e] - s
                out_o[i] = le if le > q_o else q_o
    return out_e_arr, out_o_arr


cdef int _solve(double[:, ::1] M, double[::1] rhs, int k) noexcept nogil:
    """Gaussian elimination with partial pivoting, in place; solution left in rhs."""
    cdef int col, row, piv, c
    cdef double best, f, tmp
    for col in range(k):
        piv = col
        best = fabs(M[col, col])
        for row in range(col + 1, k):
            if fabs(M[row, col]) > best:
                best = fabs(M[row, col])
                piv = row
        if best == 0.0:
            return -1
        if piv != col:
            for c in range(k):
                tmp = M[col, c]
                M[col, c] = M[piv, c]
                M[piv, c] = tmp
            tmp = rhs[col]
            rhs[col] = rhs[piv]
            rhs[piv] = tmp
        for row in range(col + 1, k):
            f = M[row, col] / M[col, col]
            if f != 0.0:
                for c in range(col, k):
                    M[row, c] -= f * M[col, c]
                rhs[row] -= f * rhs[col]
    for row in range(k - 1, -1, -1):
        tmp = rhs[row]
        for c in range(row + 1, k):
            tmp -= M[row, c] * rhs[c]
        rhs[row] = tmp / M[row, row]
    return 0


def min_norm_point(P_in, double tol=1e-13, long max_iter=100_000):
    cdef double[:, ::1] P = np.ascontiguousarray(P_in, dtype=np.float64)
    cdef Py_ssize_t m = P.shape[0], d = P.shape[1]
    cdef Py_ssize_t i, j, a, b, kk, it
    cdef int k, nk, blocking
    cdef double acc, scale = 1.0, best, xx, theta, r, den, total
    cdef bint converged = False, member, allpos

    corral_arr = np.empty(m + 1, dtype=np.int64)
    w_arr = np.zeros(m + 1)
    v_arr = np.zeros(m + 1)
    x_arr = np.zeros(d)
    M_arr = np.zeros((m + 2, m + 2))
    rhs_arr = np.zeros(m + 2)
    cdef int64_t[::1] S = corral_arr
    cdef double[::1] w = w_arr, v = v_arr, x = x_arr, rhs = rhs_arr
    cdef double[:, ::1] M = M_arr

    best = -1.0
    j = 0
    for i in range(m):
        acc = 0.0
        for a in range(d):
            acc += P[i, a] * P[i, a]
        if acc > scale:
            scale = acc
        if best < 0.0 or acc < best:
            best = acc
            j = i
    S[0] = j
    w[0] = 1.0
    k = 1
    for a in range(d):
        x[a] = P[j, a]

    for it in range(max_iter):
        xx = 0.0
        for a in range(d):
            xx += x[a] * x[a]
        best = 0.0
        j = -1
        for i in range(m):
            acc = 0.0
            for a in range(d):
                acc += P[i, a] * x[a]
            if j < 0 or acc < best:
                best = acc
                j = i
        if xx - best <= tol * scale:
            converged = True
            break
        member = False
        for kk in range(k):
            if S[kk] == j:
                member = True
        if member:
            converged = True
            break
        S[k] = j
        w[k] = 0.0
        k += 1
        while True:
            # affine minimizer over the corral
            for a in range(k + 1):
                rhs[a] = 0.0
                for b in range(k + 1):
                    M[a, b] = 0.0
            for a in range(k):
                for b in range(a, k):
                    acc = 0.0
                    for i in range(d):
                        acc += P[S[a], i] * P[S[b], i]
                    M[a, b] = acc
                    M[b, a] = acc
                M[a, k] = 1.0
                M[k, a] = 1.0
            rhs[k] = 1.0
            if _solve(M, rhs, k + 1) != 0:
                raise NoConvergence("singular corral in min-norm-point")
            allpos = True
            for a in range(k):
                v[a] = rhs[a]
                if v[a] <= 1e-15:
                    allpos = False
            if allpos:
                for a in range(k):
                    w[a] = v[a]
                break
            blocking = -1
            theta = 0.0
            for a in range(k):
                if v[a] <= 1e-15:
                    den = w[a] - v[a]
                    r = w[a] / den if den > 0.0 else 0.0
                    if blocking < 0 or r < theta:
                        theta = r
                        blocking = a
            for a in range(k):
                w[a] = w[a] + theta * (v[a] - w[a])
            w[blocking] = 0.0
            nk = 0
            total = 0.0
            for a in range(k):
                if w[a] > 1e-15:
                    S[nk] = S[a]
                    w[nk] = w[a]
                    total += w[a]
                    nk += 1
            k = nk
            for a in range(k):
                w[a] /= total
        for a in range(d):
            acc = 0.0
            for kk in range(k):
                acc += w[kk] * P[S[kk], a]
            x[a] = acc
    if not converged:
        raise NoConvergence("min-norm-point iteration budget exhausted")
    out = np.zeros(m)
    for kk in range(k):
        out[S[kk]] = w[kk]
    return out
