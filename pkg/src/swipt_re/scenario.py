"""
Scenario configuration, seeded channel generation and batch region tracing.

A scenario is a flat JSON object. Matrices are nested lists of
``[re, im]`` pairs, one inner list per row::

    {
      "channel_source": "explicit",
      "h_matrix": [[[1, 0], [0.5, 0]], [[0.5, 0], [1, 0]]],
      "power": 100,
      "schemes": ["outer", "ts1", "ups"]
    }

Omitting ``g_matrix`` makes the receivers co-located (``G = H``).
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import kernels
from .core import ChannelPair, NoiseSplit, REBoundary, Scheme
from .errors import ConfigError
from .regions import (
    AntennaPartition,
    CornerHandling,
    SweepSpec,
    TRACE_TOL,
    trace_antenna_switching,
    trace_colocated_outer,
    trace_ps_general,
    trace_separated,
    trace_simo_closed,
    trace_siso_ps_case,
    trace_ts1,
    trace_ts2,
    trace_ups,
)
from .solvers import corners

__all__ = [
    "PhysicalUnits",
    "ScenarioConfig",
    "generate_rayleigh_channel",
    "matrix_to_literal",
    "matrix_from_literal",
    "load_config",
    "list_presets",
    "build_channels",
    "trace_scheme",
    "boundary_csv",
    "run_scenario",
    "EXIT_OK",
    "EXIT_CONFIG",
    "EXIT_NONCONVERGED",
    "EXIT_INFEASIBLE",
]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NONCONVERGED = 3
EXIT_INFEASIBLE = 4


# ---------------------------------------------------------------------------
# Channels
# ---------------------------------------------------------------------------
def _draw(rng: np.random.Generator, n: int, m: int, variance: float) -> np.ndarray:
    re = rng.standard_normal((n, m))
    im = rng.standard_normal((n, m))
    return math.sqrt(variance / 2.0) * (re + 1j * im)


def generate_rayleigh_channel(m: int, n: int, per_element_variance: float, seed: int) -> np.ndarray:
    """``n x m`` matrix of independent circularly-symmetric complex Gaussians.

    Real parts are drawn first, then imaginary parts, each as an ``n x m``
    block of standard normals from ``numpy.random.default_rng(seed)``
    (PCG64) and scaled by ``sqrt(per_element_variance / 2)``.
    """
    if not per_element_variance > 0:
        raise ValueError(f"variance must be > 0, got {per_element_variance}")
    if m < 1 or n < 1:
        raise ValueError("dimensions must be >= 1")
    return _draw(np.random.default_rng(seed), n, m, per_element_variance)


def matrix_to_literal(a) -> list:
    a = np.atleast_2d(np.asarray(a, dtype=np.complex128))
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def matrix_from_literal(lit, name: str = "matrix") -> np.ndarray:
    """Parse nested ``[re, im]`` pairs (plain numbers are taken as real)."""
    try:
        rows = []
        for row in lit:
            vals = []
            for z in row:
                if isinstance(z, (int, float)):
                    vals.append(complex(z, 0.0))
                elif len(z) == 2:
                    vals.append(complex(float(z[0]), float(z[1])))
                else:
                    raise ValueError(f"entry {z!r} is not an [re, im] pair")
            rows.append(vals)
        a = np.array(rows, dtype=np.complex128)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name}: {exc}") from None
    if a.ndim != 2 or a.size == 0:
        raise ConfigError(f"{name}: expected a non-empty list of equal-length rows")
    if not np.all(np.isfinite(a)):
        raise ConfigError(f"{name}: non-finite entry")
    return a


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class PhysicalUnits:
    """Presentation scaling: solver energy to mW and bits/use to Mbit/s.

    The solver power stands for ``tx_power_dbm``; harvested energy is
    rescaled to that power and attenuated by ``pathloss_eh_db``.
    ``pathloss_id_db`` is recorded for reference only.
    """

    bandwidth_hz: float
    tx_power_dbm: float
    pathloss_eh_db: float
    pathloss_id_db: float | None = None

    def energy_mw(self, energy: float, solver_power: float) -> float:
        tx_mw = 10.0 ** (self.tx_power_dbm / 10.0)
        return energy * (tx_mw / solver_power) * 10.0 ** (-self.pathloss_eh_db / 10.0)

    def rate_mbps(self, rate: float) -> float:
        return rate * self.bandwidth_hz / 1e6


@dataclass(frozen=True)
class ScenarioConfig:
    channel_source: str
    power: float
    schemes: tuple
    h_matrix: np.ndarray | None = None
    g_matrix: np.ndarray | None = None
    m: int | None = None
    n_id: int | None = None
    n_eh: int | None = None
    var_id: float = 1.0
    var_eh: float = 1.0
    seed: int | None = None
    zeta: float = 1.0
    peak_power: float | None = None
    noise_split: NoiseSplit | None = None
    sweep: SweepSpec = field(default_factory=SweepSpec)
    n_rho: int = 51
    as_omega: tuple | None = None
    tol: float = TRACE_TOL
    physical_units: PhysicalUnits | None = None
    name: str = "scenario"

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "channel_source": self.channel_source,
            "power": self.power,
            "zeta": self.zeta,
            "schemes": [s.value for s in self.schemes],
            "n_points": self.sweep.n_points,
            "corner_handling": self.sweep.corner_handling.value,
            "n_rho": self.n_rho,
            "tol": self.tol,
        }
        if self.channel_source == "explicit":
            d["h_matrix"] = matrix_to_literal(self.h_matrix)
            if self.g_matrix is not None:
                d["g_matrix"] = matrix_to_literal(self.g_matrix)
        else:
            d.update(m=self.m, n_id=self.n_id, n_eh=self.n_eh, var_id=self.var_id,
                     var_eh=self.var_eh, seed=self.seed)
        if self.peak_power is not None:
            d["peak_power"] = self.peak_power
        if self.noise_split is not None:
            d["sigma_a_sq"] = self.noise_split.sigma_a_sq
        if self.as_omega is not None:
            d["as_omega"] = list(self.as_omega)
        if self.physical_units is not None:
            d["physical_units"] = dataclasses.asdict(self.physical_units)
        return d

    def with_seed(self, seed: int) -> "ScenarioConfig":
        return dataclasses.replace(self, seed=int(seed))

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioConfig":
        """Validate a parsed JSON object; every problem names the offending field."""
        if not isinstance(d, dict):
            raise ConfigError("top level must be a JSON object")
        known = {"name", "channel_source", "h_matrix", "g_matrix", "m", "n_id", "n_eh", "var_id",
                 "var_eh", "seed", "power", "zeta", "peak_power", "sigma_a_sq", "schemes",
                 "n_points", "corner_handling", "n_rho", "as_omega", "tol", "physical_units"}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ConfigError(f"unknown field(s): {', '.join(unknown)}")

        def num(key, default=None, positive=False, required=False):
            if key not in d or d[key] is None:
                if required:
                    raise ConfigError(f"{key}: required")
                return default
            v = d[key]
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ConfigError(f"{key}: expected a finite number, got {v!r}")
            if positive and not v > 0:
                raise ConfigError(f"{key}: must be > 0, got {v}")
            return v

        def integer(key, default=None, lo=None, required=False):
            v = num(key, default, required=required)
            if v is None:
                return None
            if int(v) != v or (lo is not None and v < lo):
                raise ConfigError(f"{key}: expected an integer >= {lo}, got {v!r}")
            return int(v)

        source = d.get("channel_source", "explicit")
        kw = {}
        if source == "explicit":
            if "h_matrix" not in d:
                raise ConfigError("h_matrix: required for an explicit channel source")
            kw["h_matrix"] = matrix_from_literal(d["h_matrix"], "h_matrix")
            if d.get("g_matrix") is not None:
                kw["g_matrix"] = matrix_from_literal(d["g_matrix"], "g_matrix")
                if kw["g_matrix"].shape[1] != kw["h_matrix"].shape[1]:
                    raise ConfigError("g_matrix: transmit dimension differs from h_matrix")
            for key in ("m", "n_id", "n_eh", "seed"):
                if key in d:
                    raise ConfigError(f"{key}: only valid for a rayleigh channel source")
        elif source == "rayleigh":
            if "h_matrix" in d or "g_matrix" in d:
                raise ConfigError("h_matrix: give either matrices or rayleigh parameters, not both")
            kw.update(m=integer("m", required=True, lo=1), n_id=integer("n_id", required=True, lo=1),
                      n_eh=integer("n_eh", required=True, lo=1),
                      var_id=num("var_id", 1.0, positive=True),
                      var_eh=num("var_eh", 1.0, positive=True),
                      seed=integer("seed", required=True, lo=0))
        else:
            raise ConfigError(f"channel_source: expected 'explicit' or 'rayleigh', got {source!r}")

        raw = d.get("schemes")
        if not isinstance(raw, list) or not raw:
            raise ConfigError("schemes: expected a non-empty list")
        try:
            schemes = tuple(Scheme(s) for s in raw)
        except ValueError:
            valid = ", ".join(s.value for s in Scheme)
            raise ConfigError(f"schemes: unknown entry in {raw!r} (valid: {valid})") from None

        zeta = num("zeta", 1.0)
        if not 0.0 < zeta <= 1.0:
            raise ConfigError(f"zeta: must lie in (0, 1], got {zeta}")
        power = num("power", required=True, positive=True)
        peak = num("peak_power", None, positive=True)
        if peak is not None and peak < power:
            raise ConfigError(f"peak_power: must be >= power ({power}), got {peak}")
        if Scheme.TS2_PEAK in schemes and peak is None:
            raise ConfigError("peak_power: required by scheme 'ts2peak'")
        noise = None
        if d.get("sigma_a_sq") is not None:
            try:
                noise = NoiseSplit(num("sigma_a_sq"))
            except ValueError as exc:
                raise ConfigError(f"sigma_a_sq: {exc}") from None
        if Scheme.SISO_CASE in schemes and noise is None:
            raise ConfigError("sigma_a_sq: required by scheme 'siso_ps'")
        try:
            sweep = SweepSpec(integer("n_points", 101, lo=2),
                              CornerHandling(d.get("corner_handling", "include")))
        except ValueError as exc:
            raise ConfigError(f"corner_handling: {exc}") from None
        omega = d.get("as_omega")
        if omega is not None:
            if not isinstance(omega, list) or not all(isinstance(i, int) for i in omega):
                raise ConfigError("as_omega: expected a list of 0-based antenna indices")
            omega = tuple(sorted(set(omega)))
        units = None
        if d.get("physical_units") is not None:
            pu = d["physical_units"]
            try:
                units = PhysicalUnits(**pu)
            except TypeError as exc:
                raise ConfigError(f"physical_units: {exc}") from None
        tol = num("tol", TRACE_TOL, positive=True)
        name = d.get("name", "scenario")
        if not isinstance(name, str) or not name:
            raise ConfigError("name: expected a non-empty string")
        return cls(channel_source=source, power=float(power), schemes=schemes, zeta=float(zeta),
                   peak_power=None if peak is None else float(peak), noise_split=noise,
                   sweep=sweep, n_rho=integer("n_rho", 51, lo=2), as_omega=omega,
                   tol=float(tol), physical_units=units, name=name, **kw)


def list_presets() -> list[str]:
    root = resources.files("swipt_re") / "presets"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_config(source: str) -> ScenarioConfig:
    """Load a scenario from a JSON file path or the name of a bundled preset."""
    path = Path(source)
    if path.is_file():
        text = path.read_text()
    elif source in list_presets():
        text = (resources.files("swipt_re") / "presets" / f"{source}.json").read_text()
    else:
        raise ConfigError(f"{source}: no such file or preset (presets: {', '.join(list_presets())})")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return ScenarioConfig.from_dict(data)


def build_channels(cfg: ScenarioConfig) -> ChannelPair:
    """Channel pair for the scenario; Rayleigh draws take H first, then G, from one generator."""
    if cfg.channel_source == "rayleigh":
        rng = np.random.default_rng(cfg.seed)
        h = _draw(rng, cfg.n_id, cfg.m, cfg.var_id)
        g = _draw(rng, cfg.n_eh, cfg.m, cfg.var_eh)
        return ChannelPair(h, g)
    if cfg.g_matrix is None:
        return ChannelPair.shared(cfg.h_matrix)
    return ChannelPair(cfg.h_matrix, cfg.g_matrix)


# ---------------------------------------------------------------------------
# Tracing and output
# ---------------------------------------------------------------------------
def trace_scheme(cfg: ScenarioConfig, channels: ChannelPair, scheme: Scheme) -> REBoundary:
    h, p, z, sw = channels.h_matrix, cfg.power, cfg.zeta, cfg.sweep
    if scheme is Scheme.SEPARATED:
        return trace_separated(channels, p, z, sw, tol=cfg.tol)
    if scheme is Scheme.OUTER_BOUND:
        return trace_colocated_outer(h, p, z, sw, tol=cfg.tol)
    if scheme is Scheme.TS1:
        return trace_ts1(h, p, z, sw)
    if scheme is Scheme.TS2:
        return trace_ts2(h, p, z, sw)
    if scheme is Scheme.TS2_PEAK:
        return trace_ts2(h, p, z, sw, peak_power=cfg.peak_power)
    if scheme is Scheme.UPS:
        return trace_ups(h, p, z, SweepSpec(cfg.n_rho), sw, tol=cfg.tol)
    if scheme is Scheme.PS:
        return trace_ps_general(h, p, z, None, sw, tol=cfg.tol)
    if scheme is Scheme.AS:
        part = None
        if cfg.as_omega is not None:
            try:
                part = AntennaPartition(frozenset(cfg.as_omega), h.shape[0])
            except ValueError as exc:
                raise ConfigError(f"as_omega: {exc}") from None
        return trace_antenna_switching(h, p, z, part, sw, tol=cfg.tol)
    if scheme is Scheme.SIMO_CLOSED:
        if h.shape[1] != 1:
            raise ConfigError(f"schemes: 'simo' needs one transmit antenna, H is {h.shape}")
        return trace_simo_closed(h[:, 0], p, z, sw)
    if scheme is Scheme.SISO_CASE:
        if h.shape != (1, 1):
            raise ConfigError(f"schemes: 'siso_ps' needs a 1x1 channel, H is {h.shape}")
        return trace_siso_ps_case(abs(h[0, 0]) ** 2, p, cfg.noise_split, z, sw)
    raise ConfigError(f"schemes: unsupported scheme {scheme!r}")


def boundary_csv(boundary: REBoundary, cfg: ScenarioConfig) -> str:
    """CSV text; failed sweep points appear in energy order with ``nan`` rate."""
    rows = [(p.energy, p.rate, p.converged) for p in boundary.points]
    rows += [(f.target, math.nan, False) for f in boundary.failures]
    rows.sort(key=lambda r: r[0])
    units = cfg.physical_units
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = ["energy", "rate", "converged"]
    if units is not None:
        header += ["energy_mw", "rate_mbps"]
    w.writerow(header)
    for e, r, ok in rows:
        row = [repr(float(e)), repr(float(r)), "true" if ok else "false"]
        if units is not None:
            row += [repr(units.energy_mw(e, cfg.power)), repr(units.rate_mbps(r))]
        w.writerow(row)
    return buf.getvalue()


def run_scenario(cfg: ScenarioConfig, output_path) -> int:
    """Trace every scheme, write ``<scheme>.csv`` files and ``manifest.json``.

    Returns 0 when every sweep point converged and 3 otherwise. Schemes
    that do not fit the channel raise :class:`ConfigError` before anything
    is written.
    """
    out = Path(output_path)
    channels = build_channels(cfg)
    boundaries = {s: trace_scheme(cfg, channels, s) for s in cfg.schemes}
    cn = corners(channels, cfg.power)
    manifest = {
        "config": cfg.to_dict(),
        "backend": kernels.BACKEND,
        "tolerances": {"duality_gap_nats": cfg.tol, "psd_clamp": 1e-10, "trace": 1e-8,
                       "monotone": 1e-6},
        "corners": {"r_max": cn.r_max, "q_id": cfg.zeta * cn.q_id, "r_eh": cn.r_eh,
                    "q_max": cfg.zeta * cn.q_max},
        "channel": {"h_matrix": matrix_to_literal(channels.h_matrix),
                    "g_matrix": matrix_to_literal(channels.g_matrix)},
        "schemes": {},
    }
    if cfg.physical_units is not None:
        manifest["corners"]["q_max_mw"] = cfg.physical_units.energy_mw(
            cfg.zeta * cn.q_max, cfg.power)
        manifest["corners"]["r_max_mbps"] = cfg.physical_units.rate_mbps(cn.r_max)
    texts = {}
    for s, b in boundaries.items():
        texts[s] = boundary_csv(b, cfg)
        manifest["schemes"][s.value] = {
            "file": f"{s.value}.csv",
            "n_points": len(b),
            "all_converged": b.all_converged,
            "n_unconverged": sum(not p.converged for p in b.points),
            "failures": [dataclasses.asdict(f) for f in b.failures],
        }
    out.mkdir(parents=True, exist_ok=True)
    for s, text in texts.items():
        (out / f"{s.value}.csv").write_text(text)
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    ok = all(b.all_converged for b in boundaries.values())
    return EXIT_OK if ok else EXIT_NONCONVERGED
