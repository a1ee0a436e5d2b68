"""Pure-Python/numpy implementations of the hot kernels.

Same signatures and semantics as the compiled ``_kernels`` extension; used
when the extension is unavailable or ``SWIPT_RE_PURE_PYTHON=1``.
"""

import math

import numpy as np

# Relative margin keeping mu strictly above lambda * max(b).
FEAS_EPS = 1e-9
# Relative certificate accepted once the ellipsoid degenerates numerically.
COLLAPSE_TOL = 1e-8


def _cut(lam, mu, e11, e12, e22, ax, ay, depth):
    """Deep-cut ellipsoid update in two dimensions."""
    ea0 = e11 * ax + e12 * ay
    ea1 = e12 * ax + e22 * ay
    aea = ax * ea0 + ay * ea1
    if not aea > 0.0:
        return None
    sq = math.sqrt(aea)
    alpha = depth / sq
    if not 0.0 <= alpha < 1.0:
        alpha = 0.0
    bx = ea0 / sq
    by = ea1 / sq
    step = (1.0 + 2.0 * alpha) / 3.0
    lam -= step * bx
    mu -= step * by
    f = 4.0 / 3.0 * (1.0 - alpha * alpha)
    k = 2.0 * (1.0 + 2.0 * alpha) / (3.0 * (1.0 + alpha))
    return lam, mu, f * (e11 - k * bx * bx), f * (e12 - k * bx * by), f * (e22 - k * by * by)


def spectral_dual_ellipsoid(a, b, power, q_bar, tol, max_iter, lam0, mu0, radius):
    """Ellipsoid method on the dual of the commuting-mode harvest-constrained problem.

    Maximizes ``sum log(1 + a_i p_i)`` subject to ``sum b_i p_i >= q_bar`` and
    ``sum p_i <= power``. Each evaluated dual point is turned into a feasible
    primal by rescaling to full power and, if short of ``q_bar``, mixing in
    the strongest energy mode; the loop stops once that primal is within
    ``tol`` nats of the best dual bound with complementary slackness below
    ``tol``.

    Returns
    -------
    tuple
        ``(lam, mu, powers, rate_nats, iterations, converged, gap)``.
    """
    a = [float(x) for x in a]
    b = [float(x) for x in b]
    n = len(a)
    kb = 0
    for i in range(1, n):
        if b[i] > b[kb] or (b[i] == b[kb] and a[i] > a[kb]):
            kb = i
    bmax = b[kb]
    q_max = bmax * power
    lam, mu = float(lam0), float(mu0)
    e11 = e22 = float(radius) ** 2
    e12 = 0.0
    g_best = math.inf
    best_f = -math.inf
    best = None
    gap = math.inf
    it = 0
    converged = False
    p = [0.0] * n
    while it < max_iter:
        if lam < 0.0:
            ax, ay, depth = -1.0, 0.0, -lam
        elif mu <= lam * bmax * (1.0 + FEAS_EPS):
            ax, ay = bmax * (1.0 + FEAS_EPS), -1.0
            depth = lam * bmax * (1.0 + FEAS_EPS) - mu
        else:
            tr = q = f0 = 0.0
            for i in range(n):
                pi = 0.0
                if a[i] > 0.0:
                    pi = 1.0 / (mu - lam * b[i]) - 1.0 / a[i]
                    if pi < 0.0:
                        pi = 0.0
                p[i] = pi
                tr += pi
                q += b[i] * pi
                f0 += math.log1p(a[i] * pi)
            gval = f0 + lam * (q - q_bar) + mu * (power - tr)
            if gval < g_best:
                g_best = gval
            # feasible primal from this dual point
            if tr > 0.0:
                scale = power / tr
                q1 = q * scale
            else:
                scale = 0.0
                q1 = q_max
            t = 0.0
            if q1 < q_bar:
                t = (q_bar - q1) / (q_max - q1)
            pr = [(1.0 - t) * scale * p[i] for i in range(n)]
            if tr <= 0.0:
                pr[kb] += (1.0 - t) * power
            pr[kb] += t * power
            f_r = 0.0
            for i in range(n):
                f_r += math.log1p(a[i] * pr[i])
            q_r = (1.0 - t) * q1 + t * q_max
            if f_r > best_f:
                best_f = f_r
                best = (lam, mu, pr)
            gap = g_best - f_r
            if gap <= tol and lam * abs(q_r - q_bar) <= tol:
                converged = True
                best = (lam, mu, pr)
                best_f = f_r
                break
            ax, ay, depth = q - q_bar, power - tr, gval - g_best
            if ax == 0.0 and ay == 0.0:
                converged = True
                best = (lam, mu, pr)
                best_f = f_r
                break
        upd = _cut(lam, mu, e11, e12, e22, ax, ay, depth)
        it += 1
        if upd is None:
            # ellipsoid collapsed to rounding level
            if best is not None:
                converged = g_best - best_f <= max(tol, COLLAPSE_TOL * (1.0 + abs(best_f)))
            break
        lam, mu, e11, e12, e22 = upd
    if best is None:
        pr = [0.0] * n
        pr[kb] = power
        best = (lam, mu, pr)
        best_f = sum(math.log1p(a[i] * pr[i]) for i in range(n))
    lam, mu, pr = best
    gap = g_best - best_f
    return lam, mu, np.array(pr), best_f, it, converged, gap


def simplex_grid_search(a, b, power, q_bar, steps):
    """Best rate (bits) over power vectors ``k * power / steps`` with ``sum k <= steps``.

    Returns ``(best_rate, counts)``; ``best_rate`` is ``-inf`` and ``counts``
    all ``-1`` when no grid point meets the harvest target.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n = a.size
    dp = power / steps
    ks = np.arange(steps + 1)
    rate_tab = np.log2(1.0 + np.outer(a, ks * dp))
    harv_tab = np.outer(b, ks * dp)
    q_need = q_bar * (1.0 - 1e-12)
    best = [-np.inf, None]

    def last_two(prefix, remaining, r0, q0):
        if n - len(prefix) == 1:
            i = n - 1
            k = ks[: remaining + 1]
            r = r0 + rate_tab[i, k]
            ok = q0 + harv_tab[i, k] >= q_need
            if ok.any():
                j = int(np.argmax(np.where(ok, r, -np.inf)))
                if r[j] > best[0]:
                    best[0] = float(r[j])
                    best[1] = prefix + [j]
            return
        i = n - 2
        k1 = ks[: remaining + 1, None]
        k2 = ks[None, : remaining + 1]
        inside = k1 + k2 <= remaining
        r = r0 + rate_tab[i][k1] + rate_tab[i + 1][k2]
        q = q0 + harv_tab[i][k1] + harv_tab[i + 1][k2]
        r = np.where(inside & (q >= q_need), r, -np.inf)
        flat = int(np.argmax(r))
        if r.flat[flat] > best[0]:
            best[0] = float(r.flat[flat])
            best[1] = prefix + [flat // (remaining + 1), flat % (remaining + 1)]

    def recurse(prefix, remaining, r0, q0):
        if n - len(prefix) <= 2:
            last_two(prefix, remaining, r0, q0)
            return
        i = len(prefix)
        for k in range(remaining + 1):
            recurse(prefix + [k], remaining - k, r0 + rate_tab[i, k], q0 + harv_tab[i, k])

    recurse([], steps, 0.0, 0.0)
    if best[1] is None:
        return -np.inf, np.full(n, -1, dtype=np.int64)
    return best[0], np.array(best[1], dtype=np.int64)


def bloch_grid_search(kmat, jmat, power, q_bar, center, half_width, n, use_imag):
    """Best rate (bits) over 2x2 covariances ``(P/2)(I + x Z + y X + z Y)`` on a grid.

    ``kmat = H^H H`` and ``jmat = G^H G``. The grid is the cube of side
    ``2 * half_width`` around ``center`` intersected with the unit ball;
    with ``use_imag`` false the third coordinate is pinned to zero.

    Returns ``(best_rate, x, y, z)`` with ``best_rate = -inf`` if nothing
    on the grid meets the harvest target.
    """
    k = np.asarray(kmat, dtype=np.complex128)
    j = np.asarray(jmat, dtype=np.complex128)
    cx, cy, cz = (float(c) for c in center)
    t = np.linspace(-1.0, 1.0, n) * half_width
    xs, ys = cx + t, cy + t
    zs = cz + t if use_imag else np.array([0.0])
    x, y, z = np.meshgrid(xs, ys, zs, indexing="ij")
    r2 = x * x + y * y + z * z
    inside = r2 <= 1.0 + 1e-12
    hp = 0.5 * power
    detk = (k[0, 0] * k[1, 1] - k[0, 1] * k[1, 0]).real
    det_s = hp * hp * np.maximum(1.0 - r2, 0.0)
    trk = hp * ((1 + x) * k[0, 0].real + (1 - x) * k[1, 1].real) + power * (
        y * k[1, 0].real + z * k[1, 0].imag
    )
    q = hp * ((1 + x) * j[0, 0].real + (1 - x) * j[1, 1].real) + power * (
        y * j[1, 0].real + z * j[1, 0].imag
    )
    val = 1.0 + trk + det_s * detk
    ok = inside & (q >= q_bar * (1.0 - 1e-12))
    rate = np.where(ok, np.log2(np.maximum(val, 1.0)), -np.inf)
    idx = int(np.argmax(rate))
    if not np.isfinite(rate.flat[idx]):
        return -np.inf, cx, cy, cz
    return float(rate.flat[idx]), float(x.flat[idx]), float(y.flat[idx]), float(z.flat[idx])
