"""
Rate-energy boundary tracers for every receiver architecture.

Each tracer returns an :class:`~swipt_re.core.REBoundary` whose energies
already include the conversion efficiency ``zeta``. Solver-based tracers
sweep the harvest target; envelope tracers (uniform/general power
splitting, antenna switching) evaluate every sub-region on one shared
energy grid and keep the pointwise maximum rate.

Sweep points are independent and are evaluated through
:func:`parallel_map`, whose results are always returned in input order, so
threaded and sequential runs are identical.
"""

from __future__ import annotations

import enum
import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .core import (
    ChannelPair,
    NoiseSplit,
    REBoundary,
    REPoint,
    Scheme,
    SweepFailure,
    hermitian_eig_and_svd,
)
from .errors import DimensionError, SwiptError
from .solvers import (
    corners,
    solve_p3,
    solve_p3_colocated,
    solve_p3_spectral,
    waterfill,
)

__all__ = [
    "CornerHandling",
    "SweepSpec",
    "SplitVector",
    "AntennaPartition",
    "parallel_map",
    "worker_count",
    "trace_separated",
    "trace_colocated_outer",
    "trace_ts1",
    "trace_ts2",
    "trace_ups",
    "trace_ps_general",
    "default_split_candidates",
    "trace_antenna_switching",
    "trace_simo_closed",
    "trace_siso_ps_case",
]

# Tracers certify each point to this duality gap (nats) so chord tests hold at 1e-6.
TRACE_TOL = 1e-8
RHO_XATOL = 1e-10
AS_ENUM_LIMIT = 8
PER_ANTENNA_GRID = 11
PER_ANTENNA_MAX_N = 2


class CornerHandling(str, enum.Enum):
    INCLUDE_CORNERS = "include"
    INTERIOR_ONLY = "interior"


@dataclass(frozen=True)
class SweepSpec:
    """Number of samples of the swept quantity and whether end points are kept."""

    n_points: int = 101
    corner_handling: CornerHandling = CornerHandling.INCLUDE_CORNERS

    def __post_init__(self):
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise ValueError(f"n_points must be an integer >= 2, got {self.n_points}")
        object.__setattr__(self, "n_points", int(self.n_points))
        object.__setattr__(self, "corner_handling", CornerHandling(self.corner_handling))

    @property
    def include_corners(self) -> bool:
        return self.corner_handling is CornerHandling.INCLUDE_CORNERS

    def grid(self, lo: float, hi: float) -> np.ndarray:
        """``n_points`` samples of ``[lo, hi]``, end points dropped for ``INTERIOR_ONLY``."""
        if hi <= lo:
            return np.array([lo])
        if self.include_corners:
            return np.linspace(lo, hi, self.n_points)
        return np.linspace(lo, hi, self.n_points + 2)[1:-1]


@dataclass(frozen=True)
class SplitVector:
    """Per-antenna power-splitting ratios; ``rho[i]`` goes to the energy harvester."""

    rho: tuple

    def __post_init__(self):
        r = np.asarray(self.rho, dtype=float).ravel()
        if r.size == 0:
            raise DimensionError("split vector must be non-empty")
        if not np.all((r >= 0.0) & (r <= 1.0)):
            raise ValueError(f"split ratios must lie in [0, 1], got {r}")
        object.__setattr__(self, "rho", tuple(float(x) for x in r))

    @classmethod
    def uniform(cls, rho: float, n: int) -> "SplitVector":
        return cls((rho,) * n)

    @property
    def is_uniform(self) -> bool:
        return len(set(self.rho)) == 1

    def channels(self, h_matrix) -> ChannelPair:
        """``H' = (I - L)^{1/2} H`` for decoding and ``G' = L^{1/2} H`` for harvesting."""
        h = np.asarray(h_matrix, dtype=np.complex128)
        r = np.asarray(self.rho)
        if r.size != h.shape[0]:
            raise DimensionError(f"split vector has {r.size} entries, channel has {h.shape[0]} rows")
        return ChannelPair(np.sqrt(1.0 - r)[:, None] * h, np.sqrt(r)[:, None] * h)


@dataclass(frozen=True)
class AntennaPartition:
    """Receive antennas switched to the harvester, as 0-based indices."""

    omega: frozenset
    n_antennas: int

    def __post_init__(self):
        om = frozenset(int(i) for i in self.omega)
        if any(i < 0 or i >= self.n_antennas for i in om):
            raise ValueError(f"partition {sorted(om)} not within 0..{self.n_antennas - 1}")
        object.__setattr__(self, "omega", om)

    def split_vector(self) -> SplitVector:
        return SplitVector(tuple(1.0 if i in self.omega else 0.0 for i in range(self.n_antennas)))

    @classmethod
    def all_partitions(cls, n: int) -> list["AntennaPartition"]:
        if n > AS_ENUM_LIMIT:
            raise ValueError(f"partition enumeration limited to N <= {AS_ENUM_LIMIT}")
        return [cls(frozenset(c), n) for k in range(n + 1)
                for c in itertools.combinations(range(n), k)]


# ---------------------------------------------------------------------------
# Ordered parallel evaluation
# ---------------------------------------------------------------------------
def worker_count() -> int:
    """Workers from ``SWIPT_RE_THREADS`` (unset or 0 means one per CPU)."""
    raw = os.environ.get("SWIPT_RE_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        n = 0
    return n if n > 0 else (os.cpu_count() or 1)


def parallel_map(fn: Callable, items: Iterable) -> list:
    """``[fn(x) for x in items]`` evaluated on a thread pool, in input order."""
    items = list(items)
    n = min(worker_count(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


# ---------------------------------------------------------------------------
# Solver sweeps
# ---------------------------------------------------------------------------
def _check_zeta(zeta):
    if not 0.0 < zeta <= 1.0:
        raise ValueError(f"zeta must lie in (0, 1], got {zeta}")


def _sweep_targets(solve: Callable, cn, zeta, sweep: SweepSpec, scheme, meta) -> REBoundary:
    """Boundary from the corner points plus ``solve(q_bar)`` on the interior of (Q_ID, Q_max)."""

    def run(q):
        try:
            sol = solve(q)
            return q, sol.rate, sol.converged, None
        except SwiptError as exc:
            return q, math.nan, False, f"{type(exc).__name__}: {exc}"

    interior = (np.linspace(cn.q_id, cn.q_max, sweep.n_points + 2)[1:-1]
                if cn.q_max > cn.q_id else np.array([]))
    rows = []
    if sweep.include_corners:
        if cn.q_id > 0.0:
            rows.append((0.0, cn.r_max, True, None))
        rows.append((cn.q_id, cn.r_max, True, None))
    rows.extend(parallel_map(run, interior))
    if sweep.include_corners and cn.q_max > cn.q_id:
        rows.append((cn.q_max, cn.r_eh, True, None))
    return _assemble(rows, zeta, scheme, meta)


def _assemble(rows, zeta, scheme, meta) -> REBoundary:
    points, failures = [], []
    for i, (q, r, ok, err) in enumerate(rows):
        if err is not None or not math.isfinite(r):
            failures.append(SweepFailure(i, zeta * q, err or "no feasible sub-region"))
            continue
        points.append(REPoint(max(r, 0.0), zeta * q, ok))
    return REBoundary(tuple(points), scheme, dict(meta), tuple(failures))


def _corner_meta(cn, zeta, **extra):
    return {"r_max": cn.r_max, "q_id": cn.q_id, "r_eh": cn.r_eh, "q_max": cn.q_max,
            "zeta": zeta, **extra}


def trace_separated(channels: ChannelPair, power: float, zeta: float = 1.0,
                    sweep: SweepSpec | None = None, tol: float = TRACE_TOL) -> REBoundary:
    """Boundary of the separated-receiver region by sweeping the harvest target.

    The flat segment ``R = R_max`` on ``[0, Q_ID]`` and the end point
    ``(R_EH, Q_max)`` are included unless ``sweep`` asks for interior points
    only. A target whose solve raises is recorded in ``failures``.
    """
    _check_zeta(zeta)
    sweep = sweep or SweepSpec()
    cn = corners(channels, power)
    return _sweep_targets(lambda q: solve_p3(channels, power, q, tol=tol), cn, zeta, sweep,
                          Scheme.SEPARATED, _corner_meta(cn, zeta))


def trace_colocated_outer(h_matrix, power: float, zeta: float = 1.0,
                          sweep: SweepSpec | None = None, tol: float = TRACE_TOL) -> REBoundary:
    """Outer bound for co-located receivers (the region with ``G = H``)."""
    _check_zeta(zeta)
    sweep = sweep or SweepSpec()
    cn = corners(ChannelPair.shared(h_matrix), power)
    return _sweep_targets(lambda q: solve_p3_colocated(h_matrix, power, q, tol=tol), cn, zeta,
                          sweep, Scheme.OUTER_BOUND, _corner_meta(cn, zeta))


# ---------------------------------------------------------------------------
# Time switching
# ---------------------------------------------------------------------------
def trace_ts1(h_matrix, power: float, zeta: float = 1.0,
              sweep: SweepSpec | None = None) -> REBoundary:
    """Fixed per-slot power: the segment from ``(R_max, 0)`` to ``(0, Q_max)``."""
    _check_zeta(zeta)
    sweep = sweep or SweepSpec()
    cn = corners(ChannelPair.shared(h_matrix), power)
    alphas = sweep.grid(0.0, 1.0)
    rows = [(a * cn.q_max, (1.0 - a) * cn.r_max, True, None) for a in alphas]
    return _assemble(rows, zeta, Scheme.TS1, _corner_meta(cn, zeta))


def _ts2_rate(gains, h1, power, q, peak):
    if q > h1 * power * (1.0 + 1e-12):
        return math.nan
    rest = max(power - q / h1, 0.0)
    if peak is None or math.isinf(peak):
        return waterfill(gains, rest).rate
    alpha = min(q / (h1 * peak), 1.0)
    if alpha >= 1.0:
        return 0.0
    budget = min(rest / (1.0 - alpha), peak)
    return (1.0 - alpha) * waterfill(gains, budget).rate


def trace_ts2(h_matrix, power: float, zeta: float = 1.0, sweep: SweepSpec | None = None,
              peak_power: float | None = None) -> REBoundary:
    """Flexible-power time switching, optionally with a per-slot peak limit.

    Without a peak limit the rate at energy ``Q`` is the water-filling rate
    at budget ``P - Q/h1`` (harvesting slot of vanishing length). With a
    peak limit the harvesting fraction is ``alpha = Q / (h1 * peak)`` and
    the decoding slot water-fills ``min((P - Q/h1) / (1 - alpha), peak)``.
    """
    _check_zeta(zeta)
    if peak_power is not None and not math.isinf(peak_power) and peak_power < power:
        raise ValueError(f"peak power {peak_power} must be >= average power {power}")
    sweep = sweep or SweepSpec()
    f = hermitian_eig_and_svd(h_matrix)
    gains, h1 = f.gains, float(f.gains[0])
    cn = corners(ChannelPair.shared(h_matrix), power)
    rows = [(q, _ts2_rate(gains, h1, power, q, peak_power), True, None)
            for q in sweep.grid(0.0, h1 * power)]
    finite_peak = peak_power is not None and not math.isinf(peak_power)
    scheme = Scheme.TS2_PEAK if finite_peak else Scheme.TS2
    return _assemble(rows, zeta, scheme, _corner_meta(cn, zeta, peak_power=peak_power))


# ---------------------------------------------------------------------------
# Power splitting
# ---------------------------------------------------------------------------
def _ups_rate(gains, power, rho, q, tol):
    """Rate of the uniform split ``rho`` at harvest ``q``; ``-inf`` if out of reach."""
    if rho * gains[0] * power < q * (1.0 - 1e-12):
        return -math.inf, True
    if rho >= 1.0:
        return (0.0, True) if q <= gains[0] * power else (-math.inf, True)
    q_eff = min(q, rho * gains[0] * power)
    sol = solve_p3_spectral((1.0 - rho) * gains, rho * gains, power, q_eff, tol)
    return sol.rate, sol.converged


def trace_ups(h_matrix, power: float, zeta: float = 1.0, rho_sweep: SweepSpec | None = None,
              qbar_sweep: SweepSpec | None = None, refine: bool = True,
              tol: float = TRACE_TOL) -> REBoundary:
    """Union over uniform splits ``rho`` of the split sub-regions.

    A uniform split keeps the eigenmodes of ``H`` for both receivers, so
    each sub-region point is the commuting-mode problem with rate gains
    ``(1 - rho) h_i`` and energy gains ``rho h_i``. For each energy on the
    shared grid the best ``rho`` on the sweep is taken; with ``refine`` it
    is polished by a bounded scalar search between its grid neighbours and
    the smallest feasible split ``Q / (h1 P)`` is also tried.
    """
    _check_zeta(zeta)
    rho_sweep = rho_sweep or SweepSpec(51)
    qbar_sweep = qbar_sweep or SweepSpec()
    gains = hermitian_eig_and_svd(h_matrix).gains
    h1 = float(gains[0])
    rhos = rho_sweep.grid(0.0, 1.0)
    energies = qbar_sweep.grid(0.0, h1 * power)

    def at_energy(q):
        vals = [_ups_rate(gains, power, r, q, tol) for r in rhos]
        rates = np.array([v[0] for v in vals])
        k = int(np.argmax(rates))
        best, ok = rates[k], vals[k][1]
        if not refine:
            return q, best, ok, None
        rho_min = min(q / (h1 * power), 1.0)
        cands = [(best, ok)]
        cands.append(_ups_rate(gains, power, rho_min, q, tol))
        lo = max(rho_min, rhos[k - 1] if k > 0 else rho_min)
        hi = rhos[k + 1] if k + 1 < len(rhos) else rhos[k]
        if hi > lo:
            res = minimize_scalar(lambda r: -_ups_rate(gains, power, r, q, tol)[0],
                                  bounds=(lo, hi), method="bounded",
                                  options={"xatol": RHO_XATOL})
            if np.isfinite(res.fun):
                cands.append(_ups_rate(gains, power, float(res.x), q, tol))
        rate, conv = max(cands, key=lambda c: c[0])
        return q, rate, conv, None

    rows = parallel_map(at_energy, energies)
    cn = corners(ChannelPair.shared(h_matrix), power)
    return _assemble(rows, zeta, Scheme.UPS, _corner_meta(cn, zeta, n_rho=len(rhos)))


def default_split_candidates(n: int, rho_sweep: SweepSpec | None = None) -> list[SplitVector]:
    """Per-antenna grid (11 values, only for N <= 2), every uniform split, every partition."""
    rho_sweep = rho_sweep or SweepSpec(51)
    cands = [SplitVector.uniform(r, n) for r in rho_sweep.grid(0.0, 1.0)]
    if n <= PER_ANTENNA_MAX_N:
        grid = np.linspace(0.0, 1.0, PER_ANTENNA_GRID)
        cands += [SplitVector(c) for c in itertools.product(grid, repeat=n)]
    if n <= AS_ENUM_LIMIT:
        cands += [p.split_vector() for p in AntennaPartition.all_partitions(n)]
    seen, out = set(), []
    for c in cands:
        if c.rho not in seen:
            seen.add(c.rho)
            out.append(c)
    return out


def _candidate_rates(h_matrix, gains, power, cand: SplitVector, energies, tol):
    """Rates of one split sub-region on the energy grid (``-inf`` where unreachable)."""
    if cand.is_uniform:
        return [_ups_rate(gains, power, cand.rho[0], q, tol) for q in energies]
    ch = cand.channels(h_matrix)
    q_max = ch.g1 * power
    out = []
    for q in energies:
        if q > q_max * (1.0 + 1e-12):
            out.append((-math.inf, True))
            continue
        sol = solve_p3(ch, power, min(q, q_max), tol=tol)
        out.append((sol.rate, sol.converged))
    return out


def trace_ps_general(h_matrix, power: float, zeta: float = 1.0,
                     split_candidates: Sequence[SplitVector] | None = None,
                     qbar_sweep: SweepSpec | None = None, tol: float = TRACE_TOL,
                     scheme: Scheme = Scheme.PS) -> REBoundary:
    """Upper envelope over candidate split vectors of their sub-regions.

    Uniform candidates use the commuting-mode solver, so a list of uniform
    splits reproduces ``trace_ups(..., refine=False)`` exactly; other
    candidates run the general solver on ``(H', G')``. The energy grid
    spans ``[0, max candidate Q_max]``.
    """
    _check_zeta(zeta)
    h = np.asarray(h_matrix, dtype=np.complex128)
    if h.ndim == 1:
        h = h[:, None]
    if split_candidates is None:
        split_candidates = default_split_candidates(h.shape[0])
    split_candidates = list(split_candidates)
    if not split_candidates:
        raise ValueError("at least one split candidate is required")
    qbar_sweep = qbar_sweep or SweepSpec()
    gains = hermitian_eig_and_svd(h).gains
    top = max(c.channels(h).g1 * power for c in split_candidates)
    energies = qbar_sweep.grid(0.0, top)
    per_cand = parallel_map(lambda c: _candidate_rates(h, gains, power, c, energies, tol),
                            split_candidates)
    rows = []
    for j, q in enumerate(energies):
        rate, ok = max((pc[j] for pc in per_cand), key=lambda v: v[0])
        rows.append((q, rate, ok, None))
    cn = corners(ChannelPair.shared(h), power)
    return _assemble(rows, zeta, scheme,
                     _corner_meta(cn, zeta, n_candidates=len(split_candidates)))


def trace_antenna_switching(h_matrix, power: float, zeta: float = 1.0,
                            partition: AntennaPartition | None = None,
                            qbar_sweep: SweepSpec | None = None,
                            tol: float = TRACE_TOL) -> REBoundary:
    """Region of one antenna partition (``rho_i`` in {0, 1}).

    ``partition=None`` takes the best partition per energy over all
    ``2^N`` subsets (N <= 8). Switching every antenna to the harvester
    leaves the decoder nothing; the zero-rate energy axis is returned with
    ``metadata['degenerate'] = True``.
    """
    h = np.asarray(h_matrix, dtype=np.complex128)
    n = h.shape[0]
    if partition is None:
        cands = [p.split_vector() for p in AntennaPartition.all_partitions(n)]
        degenerate = False
    else:
        if partition.n_antennas != n:
            raise DimensionError(f"partition is for {partition.n_antennas} antennas, H has {n}")
        cands = [partition.split_vector()]
        degenerate = len(partition.omega) == n
    b = trace_ps_general(h, power, zeta, cands, qbar_sweep, tol, scheme=Scheme.AS)
    meta = dict(b.metadata, degenerate=degenerate)
    if partition is not None:
        meta["omega"] = sorted(partition.omega)
    return REBoundary(b.points, b.scheme, meta, b.failures)


def trace_simo_closed(h_vector, power: float, zeta: float = 1.0,
                      sweep: SweepSpec | None = None) -> REBoundary:
    """Single transmit antenna: ``R(Q) = log2(1 + |h|^2 P - Q)`` on ``[0, |h|^2 P]``."""
    _check_zeta(zeta)
    sweep = sweep or SweepSpec()
    hsq = float(np.sum(np.abs(np.asarray(h_vector, dtype=np.complex128)) ** 2))
    rows = [(q, math.log2(1.0 + max(hsq * power - q, 0.0)), True, None)
            for q in sweep.grid(0.0, hsq * power)]
    return _assemble(rows, zeta, Scheme.SIMO_CLOSED, {"zeta": zeta, "r_max": math.log2(1 + hsq * power),
                                                       "q_max": hsq * power})


def siso_ps_snr(h: float, power: float, rho: float, noise: NoiseSplit) -> float:
    """Decoder SNR when a fraction ``rho`` of the received signal is harvested.

    Antenna noise is split along with the signal, processing noise is not:
    ``tau = (1 - rho) P h / ((1 - rho) sigma_A^2 + sigma_P^2)``. With all
    noise at the antenna the SNR does not depend on ``rho``.
    """
    den = (1.0 - rho) * noise.sigma_a_sq + noise.sigma_p_sq
    if den <= 0.0:
        return power * h
    return (1.0 - rho) * power * h / den


def trace_siso_ps_case(h: float, power: float, noise: NoiseSplit, zeta: float = 1.0,
                       sweep: SweepSpec | None = None) -> REBoundary:
    """SISO power splitting swept over ``rho`` in ``[0, 1]``; energy is ``rho P h``."""
    _check_zeta(zeta)
    h = float(h)
    if not h > 0:
        raise ValueError(f"channel gain must be > 0, got {h}")
    sweep = sweep or SweepSpec()
    rows = [(rho * power * h, math.log2(1.0 + siso_ps_snr(h, power, rho, noise)), True, None)
            for rho in sweep.grid(0.0, 1.0)]
    return _assemble(rows, zeta, Scheme.SISO_CASE,
                     {"zeta": zeta, "sigma_a_sq": noise.sigma_a_sq,
                      "sigma_p_sq": noise.sigma_p_sq})
