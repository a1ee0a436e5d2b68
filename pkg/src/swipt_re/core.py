"""
Domain types and the rate / energy primitives shared by all solvers.

All rates are in bits per channel use (log base 2). Energies are
normalized received powers; the conversion efficiency ``zeta`` is applied
only by :func:`harvested_power` and by the region tracers, never inside the
optimization routines.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DimensionError, NonFiniteError, NotPSDError

__all__ = [
    "Factorization",
    "hermitian_eig_and_svd",
    "hermitian_eig",
    "ChannelPair",
    "TransmitCovariance",
    "REPoint",
    "REBoundary",
    "Scheme",
    "SweepFailure",
    "NoiseSplit",
    "mutual_information",
    "harvested_power",
]

PSD_CLAMP = 1e-10
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-8


def _as_matrix(a, name="matrix") -> np.ndarray:
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim == 1:
        m = m[None, :]
    if m.ndim != 2 or m.shape[0] == 0 or m.shape[1] == 0:
        raise DimensionError(f"{name} must be a non-empty 2-D array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NonFiniteError(f"{name} has non-finite entries")
    return m


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


# ---------------------------------------------------------------------------
# Factorizations
# ---------------------------------------------------------------------------
class Factorization(NamedTuple):
    """Reduced SVD ``M = U diag(s) V^H`` with the package phase convention.

    ``gains`` are the squared singular values, i.e. the non-zero part of the
    spectrum of ``M^H M``; the columns of ``v`` are the matching eigenvectors.
    """

    u: np.ndarray
    s: np.ndarray
    vh: np.ndarray

    @property
    def gains(self) -> np.ndarray:
        return self.s**2

    @property
    def v(self) -> np.ndarray:
        return self.vh.conj().T

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.s) @ self.vh


def _phase_fix(v: np.ndarray) -> np.ndarray:
    """Per-column unit phases making the first non-negligible entry real positive."""
    mags = np.abs(v)
    scale = mags.max(axis=0, initial=0.0)
    phases = np.ones(v.shape[1], dtype=np.complex128)
    for k in range(v.shape[1]):
        if scale[k] == 0.0:
            continue
        j = int(np.argmax(mags[:, k] > 1e-12 * scale[k]))
        phases[k] = v[j, k] / mags[j, k]
    return phases


def hermitian_eig_and_svd(matrix) -> Factorization:
    """Reduced SVD of ``matrix`` (equivalently the eigensystem of ``M^H M``).

    Singular values are returned non-increasing. Each right-singular vector
    is rotated so that its first non-negligible component is real and
    positive, and the left vector is rotated with it, so the product
    ``U diag(s) V^H`` is unchanged and repeated calls agree exactly.

    Raises
    ------
    NonFiniteError
        If the input has NaN or infinite entries.
    """
    m = _as_matrix(matrix)
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    v = vh.conj().T
    ph = _phase_fix(v)
    v = v / ph
    u = u / ph
    return Factorization(u, s, v.conj().T)


def hermitian_eig(a) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (non-increasing) and eigenvectors of a Hermitian matrix."""
    a = _as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got {a.shape}")
    w, v = np.linalg.eigh(0.5 * (a + a.conj().T))
    w = w[::-1]
    v = v[:, ::-1]
    v = v / _phase_fix(v)
    return w, v


# ---------------------------------------------------------------------------
# Channels and covariances
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class ChannelPair:
    """Information channel ``H`` (N_ID x M) and energy channel ``G`` (N_EH x M).

    With ``colocated=True`` the two receivers share one channel and
    ``g_matrix`` is forced to equal ``h_matrix``.
    """

    h_matrix: np.ndarray
    g_matrix: np.ndarray | None = None
    colocated: bool = False

    def __post_init__(self):
        h = _as_matrix(self.h_matrix, "h_matrix")
        if self.colocated:
            if self.g_matrix is not None and not np.array_equal(
                _as_matrix(self.g_matrix, "g_matrix"), h
            ):
                raise DimensionError("colocated channels require g_matrix == h_matrix")
            g = h
        else:
            if self.g_matrix is None:
                raise DimensionError("g_matrix is required for separated receivers")
            g = _as_matrix(self.g_matrix, "g_matrix")
        if g.shape[1] != h.shape[1]:
            raise DimensionError(
                f"transmit dimensions differ: H has {h.shape[1]}, G has {g.shape[1]}"
            )
        object.__setattr__(self, "h_matrix", _frozen(h))
        object.__setattr__(self, "g_matrix", _frozen(g))

    @classmethod
    def shared(cls, h) -> "ChannelPair":
        """Co-located receivers seeing the same channel ``h``."""
        return cls(h, None, colocated=True)

    @classmethod
    def miso(cls, h_vec, g_vec) -> "ChannelPair":
        """MISO links given as column vectors: ``H = h^H`` and ``G = g^H``."""
        h = np.asarray(h_vec, dtype=np.complex128).ravel()
        g = np.asarray(g_vec, dtype=np.complex128).ravel()
        return cls(h.conj()[None, :], g.conj()[None, :])

    @property
    def n_tx(self) -> int:
        return self.h_matrix.shape[1]

    @cached_property
    def h_svd(self) -> Factorization:
        return hermitian_eig_and_svd(self.h_matrix)

    @cached_property
    def g_svd(self) -> Factorization:
        if self.colocated:
            return self.h_svd
        return hermitian_eig_and_svd(self.g_matrix)

    @cached_property
    def g_gram_eig(self) -> tuple[np.ndarray, np.ndarray]:
        """Full eigensystem of ``G^H G`` (M values, non-increasing)."""
        w, v = hermitian_eig(self.g_matrix.conj().T @ self.g_matrix)
        return np.maximum(w, 0.0), v

    @property
    def g1(self) -> float:
        """Largest eigenvalue of ``G^H G``."""
        return float(self.g_svd.s[0] ** 2)

    @property
    def h1(self) -> float:
        return float(self.h_svd.s[0] ** 2)


@dataclass(frozen=True, eq=False)
class TransmitCovariance:
    """Hermitian PSD transmit covariance with its trace budget.

    Eigenvalues in ``[-1e-10, 0)`` are clamped to zero; anything more
    negative is rejected, as is a trace above ``power_budget + 1e-8``.
    """

    s_matrix: np.ndarray
    power_budget: float

    def __post_init__(self):
        s = _as_matrix(self.s_matrix, "s_matrix")
        if s.shape[0] != s.shape[1]:
            raise DimensionError(f"covariance must be square, got {s.shape}")
        budget = float(self.power_budget)
        if not budget >= 0.0:
            raise NotPSDError(f"power budget must be >= 0, got {budget}")
        scale = max(1.0, float(np.abs(s).max()))
        if np.abs(s - s.conj().T).max() > HERMITIAN_TOL * scale:
            raise NotPSDError("covariance is not Hermitian")
        s = 0.5 * (s + s.conj().T)
        w, v = np.linalg.eigh(s)
        if w.min() < -PSD_CLAMP * scale:
            raise NotPSDError(f"covariance has eigenvalue {w.min():.3e} < 0")
        if w.min() < 0.0:
            s = (v * np.maximum(w, 0.0)) @ v.conj().T
            s = 0.5 * (s + s.conj().T)
        if np.trace(s).real > budget + TRACE_TOL * max(1.0, budget):
            raise NotPSDError(f"trace {np.trace(s).real:.12g} exceeds budget {budget:.12g}")
        object.__setattr__(self, "s_matrix", _frozen(s))
        object.__setattr__(self, "power_budget", budget)

    @classmethod
    def zeros(cls, m: int, power_budget: float = 0.0) -> "TransmitCovariance":
        return cls(np.zeros((m, m), dtype=np.complex128), power_budget)

    @property
    def trace(self) -> float:
        return float(np.trace(self.s_matrix).real)

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.s_matrix)[::-1]


def _cov_matrix(cov) -> np.ndarray:
    if isinstance(cov, TransmitCovariance):
        return cov.s_matrix
    s = _as_matrix(cov, "covariance")
    return TransmitCovariance(s, max(np.trace(s).real, 0.0) + 1.0).s_matrix


def mutual_information(channel, cov) -> float:
    """``log2 det(I + H S H^H)`` in bits per channel use."""
    h = _as_matrix(channel, "channel")
    s = _cov_matrix(cov)
    if s.shape[0] != h.shape[1]:
        raise DimensionError(f"channel {h.shape} does not conform with covariance {s.shape}")
    k = h @ s @ h.conj().T
    ev = np.linalg.eigvalsh(0.5 * (k + k.conj().T))
    return float(np.sum(np.log2(1.0 + np.maximum(ev, 0.0))))


def harvested_power(channel, cov, zeta: float = 1.0) -> float:
    """``zeta * tr(G S G^H)``; received noise contributes nothing."""
    if not 0.0 < zeta <= 1.0:
        raise ValueError(f"zeta must lie in (0, 1], got {zeta}")
    g = _as_matrix(channel, "channel")
    s = _cov_matrix(cov)
    if s.shape[0] != g.shape[1]:
        raise DimensionError(f"channel {g.shape} does not conform with covariance {s.shape}")
    q = np.trace(g @ s @ g.conj().T).real
    return float(zeta * max(q, 0.0))


# ---------------------------------------------------------------------------
# Rate-energy boundaries
# ---------------------------------------------------------------------------
class Scheme(str, enum.Enum):
    OUTER_BOUND = "outer"
    SEPARATED = "separated"
    TS1 = "ts1"
    TS2 = "ts2"
    TS2_PEAK = "ts2peak"
    UPS = "ups"
    PS = "ps"
    AS = "as"
    SIMO_CLOSED = "simo"
    SISO_CASE = "siso_ps"


@dataclass(frozen=True)
class REPoint:
    rate: float
    energy: float
    converged: bool = True

    def __post_init__(self):
        if not (math.isfinite(self.rate) and math.isfinite(self.energy)):
            raise ValueError(f"non-finite rate-energy pair ({self.rate}, {self.energy})")
        if self.rate < 0.0 or self.energy < 0.0:
            raise ValueError(f"negative rate-energy pair ({self.rate}, {self.energy})")


@dataclass(frozen=True)
class SweepFailure:
    index: int
    target: float
    reason: str


# Solver outputs are accurate to ~1e-9; monotonicity is checked with slack.
MONOTONE_TOL = 1e-6


@dataclass(frozen=True)
class REBoundary:
    """Sampled Pareto boundary: energy strictly increasing, rate non-increasing."""

    points: tuple[REPoint, ...]
    scheme: Scheme
    metadata: dict = field(default_factory=dict)
    failures: tuple[SweepFailure, ...] = ()

    def __post_init__(self):
        pts = tuple(self.points)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "failures", tuple(self.failures))
        for a, b in zip(pts, pts[1:]):
            if not b.energy > a.energy:
                raise ValueError(f"energies not strictly increasing: {a.energy} then {b.energy}")
            if b.rate > a.rate + MONOTONE_TOL:
                raise ValueError(f"rate increases along boundary: {a.rate} then {b.rate}")

    @classmethod
    def from_arrays(cls, energies: Sequence[float], rates: Sequence[float], scheme: Scheme,
                    converged: Sequence[bool] | None = None, **kw) -> "REBoundary":
        if converged is None:
            converged = [True] * len(energies)
        pts = [REPoint(max(float(r), 0.0), float(e), bool(c))
               for e, r, c in zip(energies, rates, converged)]
        return cls(tuple(pts), scheme, **kw)

    def __len__(self):
        return len(self.points)

    @property
    def energies(self) -> np.ndarray:
        return np.array([p.energy for p in self.points])

    @property
    def rates(self) -> np.ndarray:
        return np.array([p.rate for p in self.points])

    @property
    def all_converged(self) -> bool:
        return all(p.converged for p in self.points) and not self.failures

    def rate_at(self, energy) -> np.ndarray:
        """Linear interpolation of the boundary; ``nan`` beyond the last energy."""
        e = np.asarray(energy, dtype=float)
        out = np.interp(e, self.energies, self.rates)
        return np.where(e > self.energies[-1] * (1 + 1e-12) + 1e-15, np.nan, out)

    def chord_violations(self, tol: float = 1e-6) -> list[int]:
        """Indices of interior points lying below the chord of their neighbours."""
        e, r = self.energies, self.rates
        bad = []
        for i in range(1, len(e) - 1):
            t = (e[i] - e[i - 1]) / (e[i + 1] - e[i - 1])
            chord = (1 - t) * r[i - 1] + t * r[i + 1]
            if r[i] < chord - tol:
                bad.append(i)
        return bad

    def is_concave(self, tol: float = 1e-6) -> bool:
        return not self.chord_violations(tol)


@dataclass(frozen=True)
class NoiseSplit:
    """Antenna noise ``sigma_a_sq`` and processing noise ``sigma_p_sq`` summing to one."""

    sigma_a_sq: float
    sigma_p_sq: float | None = None

    def __post_init__(self):
        a = float(self.sigma_a_sq)
        p = 1.0 - a if self.sigma_p_sq is None else float(self.sigma_p_sq)
        if not (0.0 <= a <= 1.0 and 0.0 <= p <= 1.0):
            raise ValueError("noise powers must lie in [0, 1]")
        if abs(a + p - 1.0) > 1e-12:
            raise ValueError(f"noise powers must sum to one, got {a} + {p}")
        object.__setattr__(self, "sigma_a_sq", a)
        object.__setattr__(self, "sigma_p_sq", p)
