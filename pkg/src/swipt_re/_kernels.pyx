# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Semantics match ``_kernels_py`` exactly."""

import numpy as np
cimport numpy as cnp
from libc.math cimport log1p, log2, sqrt, INFINITY, fabs, fmax
from libc.stdlib cimport malloc, free

cnp.import_array()

cdef double FEAS_EPS = 1e-9
cdef double COLLAPSE_TOL = 1e-8


cdef inline bint _cut(double* st, double ax, double ay, double depth) noexcept nogil:
    # st = [lam, mu, e11, e12, e22]
    cdef double ea0 = st[2] * ax + st[3] * ay
    cdef double ea1 = st[3] * ax + st[4] * ay
    cdef double aea = ax * ea0 + ay * ea1
    cdef double sq, alpha, bx, by, step, f, k
    if not aea > 0.0:
        return False
    sq = sqrt(aea)
    alpha = depth / sq
    if not (alpha >= 0.0 and alpha < 1.0):
        alpha = 0.0
    bx = ea0 / sq
    by = ea1 / sq
    step = (1.0 + 2.0 * alpha) / 3.0
    st[0] -= step * bx
    st[1] -= step * by
    f = 4.0 / 3.0 * (1.0 - alpha * alpha)
    k = 2.0 * (1.0 + 2.0 * alpha) / (3.0 * (1.0 + alpha))
    st[2] = f * (st[2] - k * bx * bx)
    st[3] = f * (st[3] - k * bx * by)
    st[4] = f * (st[4] - k * by * by)
    return True


def spectral_dual_ellipsoid(a_in, b_in, double power, double q_bar, double tol,
                            int max_iter, double lam0, double mu0, double radius):
    cdef double[::1] a = np.ascontiguousarray(a_in, dtype=np.float64)
    cdef double[::1] b = np.ascontiguousarray(b_in, dtype=np.float64)
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i, kb = 0
    cdef double[::1] p = np.zeros(n)
    cdef double[::1] pr = np.zeros(n)
    cdef double[::1] best_pr = np.zeros(n)
    cdef double st[5]
    cdef double bmax, q_max, tr, q, f0, gval, scale, q1, t, f_r, q_r, pi
    cdef double ax = 0.0, ay = 0.0, depth = 0.0
    cdef double g_best = INFINITY, best_f = -INFINITY, gap = INFINITY
    cdef double best_lam = lam0, best_mu = mu0
    cdef bint have_best = False, converged = False
    cdef int it = 0

    for i in range(1, n):
        if b[i] > b[kb] or (b[i] == b[kb] and a[i] > a[kb]):
            kb = i
    bmax = b[kb]
    q_max = bmax * power
    st[0] = lam0
    st[1] = mu0
    st[2] = radius * radius
    st[3] = 0.0
    st[4] = radius * radius

    with nogil:
        while it < max_iter:
            if st[0] < 0.0:
                ax = -1.0
                ay = 0.0
                depth = -st[0]
            elif st[1] <= st[0] * bmax * (1.0 + FEAS_EPS):
                ax = bmax * (1.0 + FEAS_EPS)
                ay = -1.0
                depth = st[0] * bmax * (1.0 + FEAS_EPS) - st[1]
            else:
                tr = 0.0
                q = 0.0
                f0 = 0.0
                for i in range(n):
                    pi = 0.0
                    if a[i] > 0.0:
                        pi = 1.0 / (st[1] - st[0] * b[i]) - 1.0 / a[i]
                        if pi < 0.0:
                            pi = 0.0
                    p[i] = pi
                    tr += pi
                    q += b[i] * pi
                    f0 += log1p(a[i] * pi)
                gval = f0 + st[0] * (q - q_bar) + st[1] * (power - tr)
                if gval < g_best:
                    g_best = gval
                if tr > 0.0:
                    scale = power / tr
                    q1 = q * scale
                else:
                    scale = 0.0
                    q1 = q_max
                t = 0.0
                if q1 < q_bar:
                    t = (q_bar - q1) / (q_max - q1)
                for i in range(n):
                    pr[i] = (1.0 - t) * scale * p[i]
                if tr <= 0.0:
                    pr[kb] += (1.0 - t) * power
                pr[kb] += t * power
                f_r = 0.0
                for i in range(n):
                    f_r += log1p(a[i] * pr[i])
                q_r = (1.0 - t) * q1 + t * q_max
                if f_r > best_f:
                    best_f = f_r
                    best_lam = st[0]
                    best_mu = st[1]
                    for i in range(n):
                        best_pr[i] = pr[i]
                    have_best = True
                gap = g_best - f_r
                if gap <= tol and st[0] * fabs(q_r - q_bar) <= tol:
                    converged = True
                    best_f = f_r
                    best_lam = st[0]
                    best_mu = st[1]
                    for i in range(n):
                        best_pr[i] = pr[i]
                    have_best = True
                    break
                ax = q - q_bar
                ay = power - tr
                depth = gval - g_best
                if ax == 0.0 and ay == 0.0:
                    converged = True
                    best_f = f_r
                    best_lam = st[0]
                    best_mu = st[1]
                    for i in range(n):
                        best_pr[i] = pr[i]
                    have_best = True
                    break
            it += 1
            if not _cut(st, ax, ay, depth):
                # ellipsoid collapsed to rounding level
                if have_best and g_best - best_f <= fmax(tol, COLLAPSE_TOL * (1.0 + fabs(best_f))):
                    converged = True
                break

    if not have_best:
        best_pr[:] = 0.0
        best_pr[kb] = power
        best_lam = st[0]
        best_mu = st[1]
        best_f = 0.0
        for i in range(n):
            best_f += log1p(a[i] * best_pr[i])
    gap = g_best - best_f
    return best_lam, best_mu, np.asarray(best_pr).copy(), best_f, it, bool(converged), gap


def simplex_grid_search(a_in, b_in, double power, double q_bar, int steps):
    cdef double[::1] a = np.ascontiguousarray(a_in, dtype=np.float64)
    cdef double[::1] b = np.ascontiguousarray(b_in, dtype=np.float64)
    cdef Py_ssize_t n = a.shape[0]
    cdef double dp = power / steps
    cdef double[:, ::1] rtab = np.empty((n, steps + 1))
    cdef double[:, ::1] htab = np.empty((n, steps + 1))
    cdef cnp.int64_t[::1] best_k = np.full(n, -1, dtype=np.int64)
    cdef Py_ssize_t i, k, depth_
    cdef double q_need = q_bar * (1.0 - 1e-12)
    cdef double best = -INFINITY, r, qq
    cdef int* cnt
    cdef int* rem
    cdef double* rs
    cdef double* qs
    cdef int last, kk

    for i in range(n):
        for k in range(steps + 1):
            rtab[i, k] = log2(1.0 + a[i] * (k * dp))
            htab[i, k] = b[i] * (k * dp)

    if n == 1:
        for k in range(steps + 1):
            if htab[0, k] >= q_need and rtab[0, k] > best:
                best = rtab[0, k]
                best_k[0] = k
        return best, np.asarray(best_k).copy()

    cnt = <int*> malloc(n * sizeof(int))
    rem = <int*> malloc((n + 1) * sizeof(int))
    rs = <double*> malloc((n + 1) * sizeof(double))
    qs = <double*> malloc((n + 1) * sizeof(double))
    try:
        with nogil:
            # odometer over the first n-1 coordinates, innermost loop over the last
            last = n - 1
            for i in range(n):
                cnt[i] = 0
            rem[0] = steps
            rs[0] = 0.0
            qs[0] = 0.0
            for i in range(last):
                rem[i + 1] = rem[i] - cnt[i]
                rs[i + 1] = rs[i] + rtab[i, cnt[i]]
                qs[i + 1] = qs[i] + htab[i, cnt[i]]
            while True:
                for kk in range(rem[last] + 1):
                    qq = qs[last] + htab[last, kk]
                    if qq >= q_need:
                        r = rs[last] + rtab[last, kk]
                        if r > best:
                            best = r
                            for i in range(last):
                                best_k[i] = cnt[i]
                            best_k[last] = kk
                # advance odometer
                depth_ = last - 1
                while depth_ >= 0:
                    if cnt[depth_] < rem[depth_]:
                        cnt[depth_] += 1
                        break
                    cnt[depth_] = 0
                    depth_ -= 1
                if depth_ < 0:
                    break
                for i in range(depth_, last):
                    rem[i + 1] = rem[i] - cnt[i]
                    rs[i + 1] = rs[i] + rtab[i, cnt[i]]
                    qs[i + 1] = qs[i] + htab[i, cnt[i]]
    finally:
        free(cnt)
        free(rem)
        free(rs)
        free(qs)
    if best == -INFINITY:
        best_k[:] = -1
    return best, np.asarray(best_k).copy()


def bloch_grid_search(kmat, jmat, double power, double q_bar, center,
                      double half_width, int n, bint use_imag):
    k = np.asarray(kmat, dtype=np.complex128)
    j = np.asarray(jmat, dtype=np.complex128)
    cdef double k11 = k[0, 0].real, k22 = k[1, 1].real
    cdef double k21r = k[1, 0].real, k21i = k[1, 0].imag
    cdef double detk = (k[0, 0] * k[1, 1] - k[0, 1] * k[1, 0]).real
    cdef double j11 = j[0, 0].real, j22 = j[1, 1].real
    cdef double j21r = j[1, 0].real, j21i = j[1, 0].imag
    cdef double cx = float(center[0]), cy = float(center[1]), cz = float(center[2])
    cdef double hp = 0.5 * power
    cdef double q_need = q_bar * (1.0 - 1e-12)
    cdef double best = -INFINITY, bx = cx, by = cy, bz = cz
    cdef double x, y, z, r2, trk, q, val, rate, ds
    cdef int ix, iy, iz, nz = n if use_imag else 1
    cdef double[::1] t = np.linspace(-1.0, 1.0, n) * half_width
    with nogil:
        for ix in range(n):
            x = cx + t[ix]
            for iy in range(n):
                y = cy + t[iy]
                for iz in range(nz):
                    z = cz + t[iz] if use_imag else 0.0
                    r2 = x * x + y * y + z * z
                    if r2 > 1.0 + 1e-12:
                        continue
                    q = hp * ((1 + x) * j11 + (1 - x) * j22) + power * (y * j21r + z * j21i)
                    if q < q_need:
                        continue
                    ds = 1.0 - r2
                    if ds < 0.0:
                        ds = 0.0
                    trk = hp * ((1 + x) * k11 + (1 - x) * k22) + power * (y * k21r + z * k21i)
                    val = 1.0 + trk + hp * hp * ds * detk
                    if val < 1.0:
                        val = 1.0
                    rate = log2(val)
                    if rate > best:
                        best = rate
                        bx = x
                        by = y
                        bz = z
    return best, bx, by, bz
