"""
Transmit-covariance optimization for the three link problems.

* :func:`solve_p1` -- energy beamforming (maximize harvested power).
* :func:`solve_p2` -- water-filling (maximize information rate).
* :func:`solve_p3` and its special cases -- maximize rate subject to a
  harvested-power floor, by the ellipsoid method on the two dual variables.

Dual variables are expressed for the natural-log Lagrangian
``ln det(I + H S H^H) + lam (tr(G S G^H) - q_bar) - mu (tr S - P)``;
rates returned to callers are in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from . import kernels
from .core import (
    ChannelPair,
    TransmitCovariance,
    hermitian_eig_and_svd,
    mutual_information,
    harvested_power,
)
from .errors import DimensionError, DualInfeasibleError, InfeasibleError

__all__ = [
    "DualPoint",
    "WaterfillResult",
    "EnergyBeam",
    "InfoSolution",
    "Corners",
    "P3Solution",
    "SpectralSolution",
    "waterfill",
    "solve_p1",
    "solve_p2",
    "corners",
    "solve_p3_dual_inner",
    "solve_p3",
    "solve_p3_miso",
    "solve_p3_miso_miso_closed",
    "solve_p3_colocated",
    "solve_p3_spectral",
]

LN2 = math.log(2.0)
FEAS_EPS = 1e-9
COLLAPSE_TOL = 1e-8
CORNER_REL = 1e-9
DEFAULT_TOL = 1e-6
MAX_ITER = 5000


@dataclass(frozen=True)
class DualPoint:
    lam: float
    mu: float

    def __post_init__(self):
        if not (self.lam >= 0.0 and self.mu >= 0.0):
            raise DualInfeasibleError(f"dual variables must be >= 0, got ({self.lam}, {self.mu})")

    def is_feasible(self, g1: float) -> bool:
        """Strict cone membership ``mu > lam * g1`` with the solver margin."""
        return self.mu > self.lam * g1 * (1.0 + FEAS_EPS) and self.mu > 0.0


@dataclass(frozen=True)
class WaterfillResult:
    powers: np.ndarray
    water_level: float
    rate: float
    degenerate: bool = False


class EnergyBeam(NamedTuple):
    covariance: TransmitCovariance
    q_max: float
    degenerate: bool = False


class InfoSolution(NamedTuple):
    covariance: TransmitCovariance
    waterfill: WaterfillResult


class Corners(NamedTuple):
    """End points of a rate-energy boundary (energies at unit efficiency)."""

    r_max: float
    q_id: float
    r_eh: float
    q_max: float


@dataclass(frozen=True)
class P3Solution:
    covariance: TransmitCovariance
    rate: float
    harvested: float
    dual: DualPoint | None
    iterations: int
    converged: bool
    gap: float = 0.0
    regime: str = "active"  # "inactive", "active", "beam" or "closed"


@dataclass(frozen=True)
class SpectralSolution:
    powers: np.ndarray
    rate: float
    harvested: float
    dual: DualPoint | None
    iterations: int
    converged: bool
    gap: float = 0.0
    regime: str = "active"


# ---------------------------------------------------------------------------
# (P1) and (P2)
# ---------------------------------------------------------------------------
def waterfill(gains, power: float) -> WaterfillResult:
    """Exact water-filling ``p_i = (nu - 1/h_i)^+`` with ``sum p_i = power``.

    The active set is found by sorting, so the result is exact up to
    rounding. Zero gains never receive power; if every gain is zero the
    result is flagged ``degenerate`` with all powers zero.
    """
    h = np.asarray(gains, dtype=float)
    if power < 0:
        raise ValueError(f"power must be >= 0, got {power}")
    powers = np.zeros_like(h)
    pos = np.flatnonzero(h > 0.0)
    if pos.size == 0 or power == 0.0:
        return WaterfillResult(powers, 0.0, 0.0, degenerate=pos.size == 0)
    order = pos[np.argsort(-h[pos], kind="stable")]
    inv = 1.0 / h[order]
    nu = 0.0
    for k in range(order.size, 0, -1):
        nu = (power + inv[:k].sum()) / k
        if nu > inv[k - 1]:
            break
    powers[order] = np.maximum(nu - inv, 0.0)
    rate = float(np.sum(np.log2(1.0 + h * powers)))
    return WaterfillResult(powers, float(nu), rate)


def _check_power(power):
    if not power > 0:
        raise ValueError(f"transmit power must be > 0, got {power}")


def solve_p1(channels: ChannelPair, power: float) -> EnergyBeam:
    """Energy beamforming ``S = P v1 v1^H`` along the top right-singular vector of G."""
    _check_power(power)
    f = channels.g_svd
    v1 = f.v[:, 0]
    s = power * np.outer(v1, v1.conj())
    q_max = float(f.s[0] ** 2 * power)
    return EnergyBeam(TransmitCovariance(s, power), q_max, degenerate=f.s[0] == 0.0)


def solve_p2(channels: ChannelPair, power: float) -> InfoSolution:
    """Capacity-achieving covariance ``V_H diag(p) V_H^H`` with water-filling powers."""
    _check_power(power)
    f = channels.h_svd
    wf = waterfill(f.gains, power)
    v = f.v
    s = (v * wf.powers) @ v.conj().T
    return InfoSolution(TransmitCovariance(0.5 * (s + s.conj().T), power), wf)


def corners(channels: ChannelPair, power: float) -> Corners:
    """``(R_max, Q_ID, R_EH, Q_max)`` from the two single-objective optima."""
    beam = solve_p1(channels, power)
    info = solve_p2(channels, power)
    r_eh = mutual_information(channels.h_matrix, beam.covariance)
    q_id = harvested_power(channels.g_matrix, info.covariance)
    if q_id >= beam.q_max * (1.0 - CORNER_REL):
        # water-filling already beams along the top energy mode
        return Corners(info.waterfill.rate, beam.q_max, info.waterfill.rate, beam.q_max)
    return Corners(info.waterfill.rate, q_id, min(r_eh, info.waterfill.rate), beam.q_max)


# ---------------------------------------------------------------------------
# Dual machinery
# ---------------------------------------------------------------------------
def _initial_ellipsoid(r_max_nats, q_max, q_bar, n_modes, h1, g1):
    """Centre and radius of a ball containing every candidate dual optimum.

    ``lam* <= R_max / (Q_max - q_bar)`` follows from weak duality at the
    energy beam; ``mu* <= h1 + lam* g1`` from stationarity. The bound on
    ``mu`` is loosened by the number of modes.
    """
    lam_ub = r_max_nats / max(q_max - q_bar, 1e-300)
    mu_ub = n_modes * h1 + lam_ub * g1
    lam0, mu0 = 1.0 / (2.0 * g1), 1.0
    radius = max(math.hypot(lam0 - x, mu0 - y) for x in (0.0, lam_ub) for y in (0.0, mu_ub))
    return lam0, mu0, 1.01 * radius


def _cut(state, ax, ay, depth):
    lam, mu, e11, e12, e22 = state
    ea0 = e11 * ax + e12 * ay
    ea1 = e12 * ax + e22 * ay
    aea = ax * ea0 + ay * ea1
    if not aea > 0.0:
        return None
    sq = math.sqrt(aea)
    alpha = depth / sq
    if not 0.0 <= alpha < 1.0:
        alpha = 0.0
    bx, by = ea0 / sq, ea1 / sq
    step = (1.0 + 2.0 * alpha) / 3.0
    f = 4.0 / 3.0 * (1.0 - alpha * alpha)
    k = 2.0 * (1.0 + 2.0 * alpha) / (3.0 * (1.0 + alpha))
    return (lam - step * bx, mu - step * by,
            f * (e11 - k * bx * bx), f * (e12 - k * bx * by), f * (e22 - k * by * by))


class _DualRun(NamedTuple):
    lam: float
    mu: float
    state: object
    scale: float
    t: float
    f_primal: float
    iterations: int
    converged: bool
    gap: float


def _dual_ellipsoid(evaluate: Callable, restored_rate: Callable, *, power, q_bar, q_max,
                    g1, start, tol, max_iter) -> _DualRun:
    """Ellipsoid method over ``(lam, mu)`` with a primal-recovery certificate.

    ``evaluate(lam, mu)`` returns ``(f0, q, tr, state)`` for the Lagrangian
    maximizer; ``restored_rate(state, scale, t)`` returns the nat rate of
    ``(1 - t) * scale * S + t * S_beam``, which meets both constraints.
    Stops when that primal is within ``tol`` of the lowest dual value seen
    and ``lam * |Q - q_bar| <= tol``.
    """
    lam0, mu0, radius = start
    st = (lam0, mu0, radius**2, 0.0, radius**2)
    g_best = math.inf
    best = None
    it = 0
    converged = False
    while it < max_iter:
        lam, mu = st[0], st[1]
        if lam < 0.0:
            ax, ay, depth = -1.0, 0.0, -lam
        elif mu <= lam * g1 * (1.0 + FEAS_EPS):
            ax, ay = g1 * (1.0 + FEAS_EPS), -1.0
            depth = lam * g1 * (1.0 + FEAS_EPS) - mu
        else:
            f0, q, tr, state = evaluate(lam, mu)
            gval = f0 + lam * (q - q_bar) + mu * (power - tr)
            g_best = min(g_best, gval)
            if tr > 0.0:
                scale = power / tr
                q1 = q * scale
            else:
                scale, q1 = 0.0, q_max
            t = (q_bar - q1) / (q_max - q1) if q1 < q_bar else 0.0
            f_r = restored_rate(state, scale, t)
            q_r = (1.0 - t) * q1 + t * q_max
            cand = _DualRun(lam, mu, state, scale, t, f_r, it, False, g_best - f_r)
            if best is None or f_r > best.f_primal:
                best = cand
            ax, ay, depth = q - q_bar, power - tr, gval - g_best
            if (g_best - f_r <= tol and lam * abs(q_r - q_bar) <= tol) or (ax == 0.0 and ay == 0.0):
                best = cand
                converged = True
                break
        nxt = _cut(st, ax, ay, depth)
        it += 1
        if nxt is None:
            # ellipsoid collapsed to rounding level; accept a floating-point certificate
            if best is not None:
                floor = max(tol, COLLAPSE_TOL * (1.0 + abs(best.f_primal)))
                converged = g_best - best.f_primal <= floor
            break
        st = nxt
    if best is None:
        raise DualInfeasibleError("ellipsoid never reached the dual-feasible cone")
    return best._replace(iterations=it, converged=converged, gap=g_best - best.f_primal)


def _validate_target(power, q_bar, q_max):
    _check_power(power)
    if q_bar < 0:
        raise ValueError(f"harvest target must be >= 0, got {q_bar}")
    if q_bar > q_max * (1.0 + 1e-12):
        raise InfeasibleError(f"harvest target {q_bar:.6g} exceeds Q_max = {q_max:.6g}")


def _hermitize(s):
    return 0.5 * (s + s.conj().T)


class _GeneralInner:
    """Lagrangian maximizer for arbitrary H and G, evaluated in the eigenbasis of G^H G."""

    def __init__(self, channels: ChannelPair):
        self.g, self.w = channels.g_gram_eig
        self.hw = channels.h_matrix @ self.w
        self.m = self.w.shape[0]

    def evaluate(self, lam, mu):
        d = 1.0 / np.sqrt(mu - lam * self.g)
        u, sv, vph = np.linalg.svd(self.hw * d, full_matrices=False)
        ht = sv * sv
        p = np.where(ht > 1.0, 1.0 - 1.0 / np.where(ht > 0, ht, 1.0), 0.0)
        y = d[:, None] * vph.conj().T
        col = np.abs(y) ** 2
        tr = float(p @ col.sum(axis=0))
        q = float(p @ (self.g @ col))
        f0 = float(np.sum(np.log(np.maximum(ht, 1.0))))
        return f0, q, tr, (u, sv, y, p)

    def restored_rate(self, state, scale, t, power):
        u, sv, _, p = state
        us = u * (sv * np.sqrt(p))
        k = (1.0 - t) * scale * (us @ us.conj().T)
        if t > 0.0 or scale == 0.0:
            b = self.hw[:, 0]
            k = k + (t if scale > 0.0 else 1.0) * power * np.outer(b, b.conj())
        ev = np.linalg.eigvalsh(_hermitize(k))
        return float(np.sum(np.log1p(np.maximum(ev, 0.0))))

    def covariance_w(self, state, scale=1.0, t=0.0, power=0.0):
        _, _, y, p = state
        s = (1.0 - t) * scale * ((y * p) @ y.conj().T)
        if t > 0.0 or scale == 0.0:
            s[0, 0] += (t if scale > 0.0 else 1.0) * power
        return s

    def to_original(self, s_w):
        return _hermitize(self.w @ s_w @ self.w.conj().T)


def solve_p3_dual_inner(channels: ChannelPair, dual: DualPoint) -> TransmitCovariance:
    """Maximizer of the Lagrangian ``ln det(I + H S H^H) - tr(A S)``, ``A = mu I - lam G^H G``.

    Computed as ``A^{-1/2} V diag((1 - 1/h_k)^+) V^H A^{-1/2}`` from the
    SVD of ``H A^{-1/2}``. The returned covariance carries its own trace as
    budget since the Lagrangian imposes none.

    Raises
    ------
    DualInfeasibleError
        If ``mu <= lam * g1`` (within the solver margin), where ``A`` is not
        positive definite.
    """
    if not dual.is_feasible(channels.g1):
        raise DualInfeasibleError(
            f"mu = {dual.mu:.6g} must exceed lam * g1 = {dual.lam * channels.g1:.6g}"
        )
    inner = _GeneralInner(channels)
    _, _, tr, state = inner.evaluate(dual.lam, dual.mu)
    s = inner.to_original(inner.covariance_w(state))
    return TransmitCovariance(s, max(np.trace(s).real, 0.0))


def _corner_solution(channels, power, q_bar, cn: Corners) -> P3Solution | None:
    if q_bar <= cn.q_id or cn.q_max == 0.0:
        info = solve_p2(channels, power)
        wf = info.waterfill
        dual = DualPoint(0.0, 1.0 / wf.water_level) if wf.water_level > 0 else None
        return P3Solution(info.covariance, wf.rate,
                          harvested_power(channels.g_matrix, info.covariance), dual, 0, True,
                          regime="inactive")
    if q_bar >= cn.q_max * (1.0 - CORNER_REL) or cn.r_max == 0.0:
        beam = solve_p1(channels, power)
        return P3Solution(beam.covariance, cn.r_eh, beam.q_max, None, 0, True, regime="beam")
    return None


def solve_p3(channels: ChannelPair, power: float, q_bar: float, tol: float = DEFAULT_TOL,
             max_iter: int = MAX_ITER) -> P3Solution:
    """Maximize ``log2 det(I + H S H^H)`` s.t. ``tr(G S G^H) >= q_bar``, ``tr S <= power``.

    Targets at or below ``Q_ID`` return the water-filling solution with
    ``lam = 0``; targets within ``1e-9`` relative of ``Q_max`` return the
    energy beam. Otherwise the dual is minimized with the ellipsoid method;
    hitting ``max_iter`` yields ``converged=False`` rather than an error.

    Raises
    ------
    InfeasibleError
        If ``q_bar > g1 * power``.
    """
    cn = corners(channels, power)
    _validate_target(power, q_bar, cn.q_max)
    corner = _corner_solution(channels, power, q_bar, cn)
    if corner is not None:
        return corner
    inner = _GeneralInner(channels)
    start = _initial_ellipsoid(cn.r_max * LN2, cn.q_max, q_bar, inner.m, channels.h1,
                               channels.g1)
    run = _dual_ellipsoid(
        inner.evaluate,
        lambda st, sc, t: inner.restored_rate(st, sc, t, power),
        power=power, q_bar=q_bar, q_max=cn.q_max, g1=channels.g1, start=start, tol=tol,
        max_iter=max_iter,
    )
    s = inner.to_original(inner.covariance_w(run.state, run.scale, run.t, power))
    s *= power / max(np.trace(s).real, power)
    cov = TransmitCovariance(s, power)
    return P3Solution(
        cov,
        mutual_information(channels.h_matrix, cov),
        harvested_power(channels.g_matrix, cov),
        DualPoint(run.lam, run.mu),
        run.iterations,
        run.converged,
        run.gap,
    )


# ---------------------------------------------------------------------------
# MISO information link
# ---------------------------------------------------------------------------
def _rotate_to_harvest(u, gains, power, q_bar):
    """Unit vector in span{u, e1} (eigenbasis coordinates) meeting ``P v^H diag(g) v >= q_bar``.

    Moves from ``u`` towards the top energy mode ``e1`` along a great circle
    and bisects for the smallest rotation that meets the target.
    """
    u = u / np.linalg.norm(u)

    def harvest(v):
        return power * float(gains @ (np.abs(v) ** 2))

    if harvest(u) >= q_bar:
        return u
    e1 = np.zeros_like(u)
    e1[0] = 1.0 if abs(u[0]) == 0 else u[0] / abs(u[0])
    w = e1 - (u.conj() @ e1) * u
    nw = np.linalg.norm(w)
    if nw < 1e-15:
        return e1
    w /= nw

    def at(theta):
        return math.cos(theta) * u + math.sin(theta) * w

    lo, hi = 0.0, math.pi / 2
    # the great circle from u reaches e1 before pi/2 only if <u, e1> != 0
    th_e1 = math.atan2(float((w.conj() @ e1).real), float((u.conj() @ e1).real))
    hi = min(hi, max(th_e1, 0.0)) if th_e1 > 0 else hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if harvest(at(mid)) >= q_bar:
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-15:
            break
    return at(hi)


def solve_p3_miso(channels: ChannelPair, power: float, q_bar: float, tol: float = DEFAULT_TOL,
                  max_iter: int = MAX_ITER) -> P3Solution:
    """Harvest-constrained rate maximization when the information receiver has one antenna.

    The Lagrangian maximizer is the rank-one matrix
    ``A^{-1} h (1/s - 1/s^2)^+ h^H A^{-1}`` with ``s = h^H A^{-1} h``, so
    every dual evaluation reduces to sums over the eigenvalues of ``G^H G``.
    The returned covariance is rank one.
    """
    if channels.h_matrix.shape[0] != 1:
        raise DimensionError("solve_p3_miso needs a single-antenna information receiver")
    cn = corners(channels, power)
    _validate_target(power, q_bar, cn.q_max)
    corner = _corner_solution(channels, power, q_bar, cn)
    if corner is not None:
        return corner
    g, w = channels.g_gram_eig
    hw = w.conj().T @ channels.h_matrix[0].conj()
    c = np.abs(hw) ** 2

    def evaluate(lam, mu):
        inv = 1.0 / (mu - lam * g)
        s = float(c @ inv)
        if s <= 1.0:
            return 0.0, 0.0, 0.0, (lam, mu, 0.0, s)
        kappa = 1.0 / s - 1.0 / (s * s)
        tr = kappa * float(c @ (inv * inv))
        q = kappa * float((g * c) @ (inv * inv))
        return math.log(s), q, tr, (lam, mu, kappa, s)

    def restored_rate(state, scale, t):
        _, _, kappa, s = state
        x = (1.0 - t) * scale * kappa * s * s
        x += (t if scale > 0.0 else 1.0) * power * c[0] if (t > 0.0 or scale == 0.0) else 0.0
        return math.log1p(x)

    start = _initial_ellipsoid(cn.r_max * LN2, cn.q_max, q_bar, w.shape[0], channels.h1,
                               channels.g1)
    run = _dual_ellipsoid(evaluate, restored_rate, power=power, q_bar=q_bar, q_max=cn.q_max,
                          g1=channels.g1, start=start, tol=tol, max_iter=max_iter)
    lam, mu = run.lam, run.mu
    u = hw / (mu - lam * g)
    if run.scale == 0.0 or not np.any(u):
        u = np.zeros_like(hw)
        u[0] = 1.0
    v = _rotate_to_harvest(u, g, power, q_bar)
    s_mat = _hermitize(power * w @ np.outer(v, v.conj()) @ w.conj().T)
    cov = TransmitCovariance(s_mat, power)
    rate = mutual_information(channels.h_matrix, cov)
    return P3Solution(cov, rate, harvested_power(channels.g_matrix, cov), DualPoint(lam, mu),
                      run.iterations, run.converged, run.gap)


PARALLEL_TOL = 1e-10


def solve_p3_miso_miso_closed(h, g, power: float, q_bar: float) -> P3Solution:
    """Closed-form optimal beamformer when both receivers have a single antenna.

    ``h`` and ``g`` are the column vectors with ``H = h^H`` and ``G = g^H``.
    Below ``|g^H h_hat|^2 P`` the harvest constraint is slack and the
    beamformer is ``h_hat``; above it the beam combines ``g_hat`` (phase
    aligned with ``g_hat^H h``) and the unit component of ``h`` orthogonal
    to ``g``, weighted so the harvest constraint holds with equality. When
    ``h`` is parallel to ``g`` that orthogonal component is dropped.
    """
    _check_power(power)
    h = np.asarray(h, dtype=np.complex128).ravel()
    g = np.asarray(g, dtype=np.complex128).ravel()
    if h.shape != g.shape:
        raise DimensionError(f"h and g must have equal length, got {h.size} and {g.size}")
    hn, gn = np.linalg.norm(h), np.linalg.norm(g)
    q_max = power * gn**2
    _validate_target(power, q_bar, q_max)
    h_hat = h / hn if hn > 0 else np.eye(h.size, dtype=np.complex128)[0]
    g_hat = g / gn if gn > 0 else h_hat
    alpha = complex(g_hat.conj() @ h)
    threshold = abs(g.conj() @ h_hat) ** 2 * power
    if q_bar <= threshold or gn == 0.0:
        v = h_hat
        rate = math.log2(1.0 + hn**2 * power)
        regime = "inactive"
    else:
        frac = min(q_bar / q_max, 1.0)
        h_perp = h - (g_hat.conj() @ h) * g_hat
        perp_norm = np.linalg.norm(h_perp)
        phase = alpha / abs(alpha) if abs(alpha) > 0 else 1.0
        v = math.sqrt(frac) * phase * g_hat
        if perp_norm > PARALLEL_TOL * max(hn, 1.0):
            v = v + math.sqrt(1.0 - frac) * h_perp / perp_norm
        else:
            v = v / np.linalg.norm(v)
        amp = (math.sqrt(q_bar / gn**2) * abs(alpha)
               + math.sqrt(max(power - q_bar / gn**2, 0.0))
               * math.sqrt(max(hn**2 - abs(alpha) ** 2, 0.0)))
        rate = math.log2(1.0 + amp**2)
        regime = "closed"
    s = _hermitize(power * np.outer(v, v.conj()))
    cov = TransmitCovariance(s, power)
    harvested = harvested_power(g.conj()[None, :], cov)
    return P3Solution(cov, rate, harvested, None, 0, True, regime=regime)


# ---------------------------------------------------------------------------
# Commuting channels: co-located receivers and uniform power splitting
# ---------------------------------------------------------------------------
def _beam_powers(a, b, power):
    """Full power on the strongest energy mode(s); ties are water-filled on ``a``."""
    top = np.flatnonzero(b >= b.max() * (1.0 - 1e-12))
    p = np.zeros_like(a)
    if top.size == 1:
        p[top[0]] = power
    else:
        wf = waterfill(a[top], power)
        p[top] = wf.powers if not wf.degenerate else power / top.size
    return p


def solve_p3_spectral(a, b, power: float, q_bar: float, tol: float = DEFAULT_TOL,
                      max_iter: int = MAX_ITER) -> SpectralSolution:
    """Harvest-constrained rate maximization over modes shared by both receivers.

    Maximizes ``sum log2(1 + a_i p_i)`` subject to ``sum b_i p_i >= q_bar``
    and ``sum p_i <= power``. The Lagrangian maximizer is the modified
    water-filling ``p_i = (1/(mu - lam b_i) - 1/a_i)^+``; the dual is
    minimized by the compiled ellipsoid kernel when available.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1 or a.size == 0:
        raise DimensionError("mode gains must be equal-length non-empty vectors")
    if np.any(a < 0) or np.any(b < 0):
        raise ValueError("mode gains must be non-negative")
    q_max = power * float(b.max())
    _validate_target(power, q_bar, q_max)
    wf = waterfill(a, power)
    q_id = min(float(b @ wf.powers), q_max)
    if q_bar <= q_id or q_max == 0.0:
        dual = DualPoint(0.0, 1.0 / wf.water_level) if wf.water_level > 0 else None
        return SpectralSolution(wf.powers, wf.rate, float(b @ wf.powers), dual, 0, True,
                                regime="inactive")
    if q_bar >= q_max * (1.0 - CORNER_REL) or wf.rate == 0.0:
        p = _beam_powers(a, b, power)
        return SpectralSolution(p, float(np.sum(np.log2(1.0 + a * p))), float(b @ p), None, 0,
                                True, regime="beam")
    start = _initial_ellipsoid(wf.rate * LN2, q_max, q_bar, a.size, float(a.max()),
                               float(b.max()))
    lam, mu, p, f_nats, it, conv, gap = kernels.spectral_dual_ellipsoid(
        a, b, float(power), float(q_bar), float(tol), int(max_iter), *start
    )
    p = np.maximum(np.asarray(p, dtype=float), 0.0)
    return SpectralSolution(p, float(np.sum(np.log2(1.0 + a * p))), float(b @ p),
                            DualPoint(max(lam, 0.0), max(mu, 0.0)), int(it), bool(conv),
                            float(gap))


def solve_p3_colocated(h_matrix, power: float, q_bar: float, tol: float = DEFAULT_TOL,
                       max_iter: int = MAX_ITER) -> P3Solution:
    """Outer-bound point for co-located receivers (``G = H``).

    The optimum is ``V_H diag(p) V_H^H`` with the modified water-filling
    ``p_i = (1/(mu - lam h_i) - 1/h_i)^+`` on the eigenmodes of ``H``;
    with ``lam = 0`` this is ordinary water-filling.
    """
    f = hermitian_eig_and_svd(h_matrix)
    sol = solve_p3_spectral(f.gains, f.gains, power, q_bar, tol, max_iter)
    v = f.v
    s = _hermitize((v * sol.powers) @ v.conj().T)
    cov = TransmitCovariance(s, power)
    return P3Solution(cov, sol.rate, harvested_power(h_matrix, cov), sol.dual, sol.iterations,
                      sol.converged, sol.gap, sol.regime)
