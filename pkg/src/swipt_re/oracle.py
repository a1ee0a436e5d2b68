"""
Brute-force reference solvers used to check the optimizers.

They share no code with :mod:`swipt_re.solvers`: the harvest-constrained
problems are solved by exhaustive grids, energy beamforming by random
search, and regions are compared by interpolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import comb

import numpy as np

from . import kernels
from .core import REBoundary, TransmitCovariance
from .errors import InfeasibleError, SwiptError

__all__ = [
    "OracleResult",
    "ContainmentReport",
    "DisjointRegionsError",
    "grid_search_p3_diag",
    "grid_search_p3_m2",
    "random_rank_search_p1",
    "region_contains",
]


@dataclass(frozen=True)
class OracleResult:
    """Best objective found and the covariance achieving it.

    ``best_rate`` is in bits for the rate searches; for
    :func:`random_rank_search_p1` it holds the harvested power and
    ``objective`` is ``"energy"``.
    """

    best_rate: float
    best_covariance: TransmitCovariance
    grid_size: int
    resolution: float
    objective: str = "rate"


class DisjointRegionsError(SwiptError, ValueError):
    """The two boundaries share no energy range."""


def grid_search_p3_diag(h_diag, g_diag, power: float, q_bar: float,
                        resolution: float = 1e-3) -> OracleResult:
    """Best diagonal covariance on the simplex grid of step ``resolution * power``.

    Evaluates every power vector ``k * resolution * power`` with integer
    ``k`` summing to at most ``1 / resolution`` and keeps the highest rate
    among those harvesting at least ``q_bar``.

    Raises
    ------
    InfeasibleError
        If no grid point meets the harvest target.
    """
    a = np.asarray(h_diag, dtype=float).ravel()
    b = np.asarray(g_diag, dtype=float).ravel()
    if a.shape != b.shape:
        raise ValueError("h_diag and g_diag must have equal length")
    steps = int(round(1.0 / resolution))
    if steps < 1:
        raise ValueError(f"resolution must be <= 1, got {resolution}")
    best, counts = kernels.simplex_grid_search(a, b, float(power), float(q_bar), steps)
    if not np.isfinite(best):
        raise InfeasibleError(f"no grid point harvests {q_bar}")
    s = np.diag(np.asarray(counts, dtype=float) * (power / steps)).astype(np.complex128)
    return OracleResult(float(best), TransmitCovariance(s, power), comb(steps + a.size, a.size),
                        resolution)


def _bloch_matrix(power, x, y, z):
    return 0.5 * power * np.array([[1 + x, y - 1j * z], [y + 1j * z, 1 - x]])


def grid_search_p3_m2(h_matrix, g_matrix, power: float, q_bar: float, n: int = 41,
                      levels: int = 10, shrink: float = 4.0,
                      complex_valued: bool | None = None) -> OracleResult:
    """Coarse-to-fine grid over all 2x2 covariances with trace ``power``.

    Every such covariance is ``(P/2)(I + x Z + y X + z Y)`` with
    ``x^2 + y^2 + z^2 <= 1`` (Pauli matrices), and both objectives are
    closed-form in ``(x, y, z)``. Full trace is optimal since adding power
    along the identity raises both rate and harvest. Each level re-centres
    a finer grid on the best point. For real channels the imaginary
    coordinate is pinned to zero.
    """
    h = np.asarray(h_matrix, dtype=np.complex128)
    g = np.asarray(g_matrix, dtype=np.complex128)
    if h.shape[1] != 2 or g.shape[1] != 2:
        raise ValueError("grid_search_p3_m2 needs two transmit antennas")
    if complex_valued is None:
        complex_valued = bool(np.any(h.imag) or np.any(g.imag))
    k = h.conj().T @ h
    j = g.conj().T @ g
    centre, half = (0.0, 0.0, 0.0), 1.0
    best = -math.inf
    evaluated = 0
    for _ in range(levels):
        rate, x, y, z = kernels.bloch_grid_search(k, j, float(power), float(q_bar), centre, half,
                                                   n, complex_valued)
        evaluated += n ** (3 if complex_valued else 2)
        if np.isfinite(rate) and rate >= best:
            best, centre = rate, (x, y, z)
        half /= shrink
    if not np.isfinite(best):
        raise InfeasibleError(f"no grid point harvests {q_bar}")
    s = _bloch_matrix(power, *centre)
    return OracleResult(float(best), TransmitCovariance(s, power), evaluated,
                        2.0 * half * shrink / (n - 1))


def random_rank_search_p1(g_matrix, power: float, n_samples: int, seed: int,
                          inject=None, chunk: int = 20000) -> OracleResult:
    """Largest ``P ||G v||^2`` over random unit vectors ``v`` (plus any injected ones).

    Directions are complex Gaussian vectors normalized to unit length,
    drawn from ``numpy.random.default_rng(seed)``.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    g = np.asarray(g_matrix, dtype=np.complex128)
    m = g.shape[1]
    rng = np.random.default_rng(seed)
    best, best_v = -math.inf, None

    def consider(v):
        nonlocal best, best_v
        v = v / np.linalg.norm(v, axis=0, keepdims=True)
        q = power * np.sum(np.abs(g @ v) ** 2, axis=0)
        i = int(np.argmax(q))
        if q[i] > best:
            best, best_v = float(q[i]), v[:, i].copy()

    if inject is not None:
        consider(np.asarray(inject, dtype=np.complex128).reshape(m, -1))
    left = n_samples - (0 if inject is None else np.asarray(inject).reshape(m, -1).shape[1])
    while left > 0:
        c = min(chunk, left)
        consider(rng.standard_normal((m, c)) + 1j * rng.standard_normal((m, c)))
        left -= c
    s = power * np.outer(best_v, best_v.conj())
    return OracleResult(best, TransmitCovariance(0.5 * (s + s.conj().T), power), n_samples,
                        math.nan, objective="energy")


@dataclass(frozen=True)
class ContainmentReport:
    """Outcome of :func:`region_contains`; truthy iff contained."""

    contained: bool
    checked: int
    violations: list = field(default_factory=list)  # (energy, inner_rate, outer_rate)

    def __bool__(self):
        return self.contained


def region_contains(outer: REBoundary, inner: REBoundary, tol: float = 1e-6) -> ContainmentReport:
    """Whether every sample of ``inner`` lies under ``outer`` (linear interpolation).

    Inner samples with energy past the end of ``outer`` always count as
    violations. Below outer's first sample its first rate applies, since
    harvesting less never costs rate.

    Raises
    ------
    DisjointRegionsError
        If the energy ranges do not overlap.
    """
    if len(outer) == 0 or len(inner) == 0:
        raise DisjointRegionsError("empty boundary")
    oe, ie = outer.energies, inner.energies
    e_tol = 1e-9 * max(1.0, oe[-1])
    if ie[0] > oe[-1] + e_tol or oe[0] > ie[-1] + e_tol:
        raise DisjointRegionsError(
            f"energy ranges [{oe[0]}, {oe[-1]}] and [{ie[0]}, {ie[-1]}] do not overlap"
        )
    violations = []
    for e, r in zip(ie, inner.rates):
        if e > oe[-1] + e_tol:
            violations.append((float(e), float(r), math.nan))
            continue
        bound = float(np.interp(e, oe, outer.rates))
        if r > bound + tol:
            violations.append((float(e), float(r), bound))
    return ContainmentReport(not violations, len(ie), violations)
