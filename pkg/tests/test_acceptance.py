"""One test per acceptance criterion, each printing a PASS/FAIL line."""

import math
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swipt_re.core import (
    ChannelPair,
    NoiseSplit,
    harvested_power,
    mutual_information,
)
from swipt_re.oracle import grid_search_p3_diag, random_rank_search_p1, region_contains
from swipt_re.regions import (
    SweepSpec,
    siso_ps_snr,
    trace_colocated_outer,
    trace_separated,
    trace_simo_closed,
    trace_siso_ps_case,
    trace_ts1,
    trace_ts2,
    trace_ups,
)
from swipt_re.scenario import build_channels, list_presets, load_config, run_scenario
from swipt_re.solvers import (
    corners,
    solve_p1,
    solve_p3,
    solve_p3_colocated,
    solve_p3_miso,
    solve_p3_miso_miso_closed,
    waterfill,
)

from conftest import ACCEPTANCE_LINES, crandn, random_psd


def report(label, ok, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] {label}" + (f": {detail}" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def preset_h(name):
    return build_channels(load_config(name)).h_matrix


# 1 ---------------------------------------------------------------------------
def test_ac01_miso_closed_form_agreement():
    t0 = time.perf_counter()
    worst = 0.0
    for seed in range(50):
        rng = np.random.default_rng(seed)
        m = 2 + seed % 3
        h, g = crandn(rng, m), crandn(rng, m)
        ch = ChannelPair.miso(h, g)
        q_max = corners(ch, 1.0).q_max
        for q in np.linspace(0.0, q_max, 10):
            r_ell = solve_p3(ch, 1.0, q).rate
            r_miso = solve_p3_miso(ch, 1.0, q).rate
            r_cf = solve_p3_miso_miso_closed(h, g, 1.0, q).rate
            scale = max(abs(r_cf), 1e-12)
            worst = max(worst, abs(r_ell - r_cf) / scale, abs(r_miso - r_cf) / scale)
    elapsed = time.perf_counter() - t0
    report("AC1 MISO ellipsoid / scalar dual / closed form", worst <= 1e-4 and elapsed < 60,
           f"max rel diff {worst:.2e}, {elapsed:.1f}s")


# 2 ---------------------------------------------------------------------------
def test_ac02_diagonal_oracle_equivalence():
    t0 = time.perf_counter()
    worst = 0.0
    for seed in range(20):
        rng = np.random.default_rng(1000 + seed)
        t = 2 if seed < 10 else 3
        gains = np.sort(rng.uniform(0.2, 4.0, t))[::-1]
        cn = corners(ChannelPair.shared(np.diag(np.sqrt(gains))), 1.0)
        q = cn.q_id + 0.5 * (cn.q_max - cn.q_id)
        sol = solve_p3_colocated(np.diag(np.sqrt(gains)), 1.0, q)
        ref = grid_search_p3_diag(gains, gains, 1.0, q, resolution=1e-3)
        worst = max(worst, abs(sol.rate - ref.best_rate))
    elapsed = time.perf_counter() - t0
    report("AC2 co-located solver vs simplex grid", worst <= 1e-2 and elapsed < 300,
           f"max abs diff {worst:.2e}, {elapsed:.1f}s")


# 3 ---------------------------------------------------------------------------
def test_ac03_energy_beam_optimal():
    bad_search, worst_eig = 0, 0.0
    for seed in range(100):
        rng = np.random.default_rng(2000 + seed)
        # one transmit antenna makes every direction optimal, so strictness needs m >= 2
        n, m = int(rng.integers(1, 5)), int(rng.integers(2, 5))
        g = crandn(rng, n, m)
        q_max = solve_p1(ChannelPair(g, g), 1.0).q_max
        lam = float(np.max(np.linalg.eigvalsh(g.conj().T @ g)))
        worst_eig = max(worst_eig, abs(q_max - lam) / max(1.0, lam))
        if random_rank_search_p1(g, 1.0, 100_000, seed=seed).best_rate >= q_max:
            bad_search += 1
    report("AC3 random search below q_max, q_max = P lambda_max",
           bad_search == 0 and worst_eig <= 1e-9,
           f"{bad_search} searches reached q_max, eig diff {worst_eig:.1e}")


# 4 ---------------------------------------------------------------------------
def _ts2_rate_alpha(gains, h1, power, q, alpha):
    # harvesting share alpha, decoding share 1 - alpha with the leftover energy budget
    budget = (power - q / h1) / (1.0 - alpha)
    return (1.0 - alpha) * waterfill(gains, budget).rate


def test_ac04_ts2_vanishing_harvest_slot():
    worst, strict = math.inf, True
    for seed in range(10):
        rng = np.random.default_rng(3000 + seed)
        h = crandn(rng, 3, 3)
        gains = np.linalg.eigvalsh(h.conj().T @ h)[::-1]
        b = trace_ts2(h, 10.0, sweep=SweepSpec(21))
        for q, r0 in zip(b.energies[:-1], b.rates[:-1]):
            for alpha in (0.1, 0.3, 0.5):
                diff = r0 - _ts2_rate_alpha(gains, gains[0], 10.0, q, alpha)
                worst = min(worst, diff)
                strict &= diff > 0
    report("AC4 TS2 rate dominates every fixed harvest share",
           worst >= -1e-9 and strict, f"smallest margin {worst:.2e}")


# 5 ---------------------------------------------------------------------------
def test_ac05_ts_ups_ordering():
    msgs, ok = [], True
    for name in ("fig6", "fig7"):
        h = preset_h(name)
        ts1, ups, ts2 = trace_ts1(h, 100.0), trace_ups(h, 100.0), trace_ts2(h, 100.0)
        a, b = region_contains(ups, ts1, 1e-6), region_contains(ts2, ups, 1e-6)
        ok &= bool(a) and bool(b)
        msgs.append(f"{name} TS1<=UPS {bool(a)} UPS<=TS2 {bool(b)}")
    h = np.diag([2.0, 1.0])  # h1 = 4, h2 = 1, threshold 0.75
    ups, ts2 = trace_ups(h, 0.5), trace_ts2(h, 0.5)
    equal = bool(region_contains(ups, ts2, 1e-6)) and bool(region_contains(ts2, ups, 1e-6))
    ups, ts2 = trace_ups(h, 1.0), trace_ts2(h, 1.0)
    gap = float(np.max(ts2.rates - ups.rates))
    ok &= equal and gap > 1e-3
    msgs.append(f"equal at P=0.5 {equal}, gap at P=1.0 {gap:.3e}")
    report("AC5 TS1 <= UPS <= TS2 with equality threshold", ok, "; ".join(msgs))


# 6 ---------------------------------------------------------------------------
def test_ac06_simo_ups_closed_form():
    worst = 0.0
    for seed in range(10):
        h = crandn(np.random.default_rng(4000 + seed), 1 + seed % 4 + 1, 1)
        ups = trace_ups(h, 5.0, qbar_sweep=SweepSpec(20))
        cf = trace_simo_closed(h[:, 0], 5.0, sweep=SweepSpec(20))
        worst = max(worst, float(np.max(np.abs(ups.rates - cf.rates))),
                    float(np.max(np.abs(ups.energies - cf.energies))))
    report("AC6 SIMO UPS equals closed form", worst <= 1e-6, f"max diff {worst:.2e}")


# 7 ---------------------------------------------------------------------------
def test_ac07_fig5_nesting():
    b = {r: trace_separated(build_channels(load_config(f"fig5_rho{r}" if r != 0.5 else "fig5")), 10.0)
         for r in (0.1, 0.5, 0.9)}
    ok = bool(region_contains(b[0.5], b[0.1], 1e-6)) and bool(region_contains(b[0.9], b[0.5], 1e-6))
    report("AC7 larger correlation gives a larger region", ok,
           "R(0.1) <= R(0.5) <= R(0.9)" if ok else "nesting violated")


# 8 ---------------------------------------------------------------------------
def test_ac08_fig4_statistical_band():
    t0 = time.perf_counter()
    cfg = load_config("fig4")
    r_max, q_mw = [], []
    for seed in range(200):
        c = cfg.with_seed(seed)
        cn = corners(build_channels(c), c.power)
        r_max.append(cn.r_max)
        q_mw.append(c.physical_units.energy_mw(c.zeta * cn.q_max, c.power))
    mr, mq = float(np.mean(r_max)), float(np.mean(q_mw))
    elapsed = time.perf_counter() - t0
    report("AC8 Rayleigh 4x4 corner statistics",
           18 <= mr <= 27 and 0.3 <= mq <= 1.2 and elapsed < 120,
           f"mean R_max {mr:.2f} bits, mean Q_max {mq:.3f} mW, {elapsed:.1f}s")


# 9 ---------------------------------------------------------------------------
def test_ac09_siso_power_splitting_cases():
    h, p = 0.7, 10.0
    sweep = SweepSpec(41)
    case1 = trace_siso_ps_case(h, p, NoiseSplit(0.0), sweep=sweep)
    ts2 = trace_ts2([[math.sqrt(h)]], p, sweep=sweep)
    d1 = float(np.max(np.abs(case1.rates - ts2.rates)))
    case3 = trace_siso_ps_case(h, p, NoiseSplit(1.0), sweep=sweep)
    box = np.allclose(case3.rates, math.log2(1 + p * h), atol=1e-12, rtol=0) and \
        math.isclose(case3.energies[-1], p * h)
    rates = [math.log2(1 + siso_ps_snr(h, p, 0.5, NoiseSplit(s))) for s in np.linspace(0.0, 1.0, 10)]
    increasing = bool(np.all(np.diff(rates) > 0))
    report("AC9 SISO power splitting noise cases", d1 <= 1e-9 and box and increasing,
           f"case I diff {d1:.1e}, case III box {box}, case II increasing {increasing}")


# 10 --------------------------------------------------------------------------
def _chord_instances():
    out = [(name, preset_h(name), 100.0) for name in ("fig6", "fig7")]
    for seed in range(5):
        out.append((f"seed{seed}", crandn(np.random.default_rng(5000 + seed), 2, 2), 5.0))
    return out


def test_ac10a_chord_tests_provable_regions():
    bad = []
    for name, h, p in _chord_instances():
        for b in (trace_colocated_outer(h, p), trace_ts2(h, p),
                  trace_separated(ChannelPair.shared(h), p)):
            if not b.is_concave(1e-6):
                bad.append(f"{name}/{b.scheme.value}")
    report("AC10a concavity of outer bound, TS2 and separated boundaries", not bad,
           ", ".join(bad) or "all chords hold")


def test_ac10b_chord_tests_ups():
    bad = []
    for name, h, p in _chord_instances():
        b = trace_ups(h, p)
        if not b.is_concave(1e-6):
            bad.append(f"{name} ({len(b.chord_violations(1e-6))} points)")
    report("AC10b concavity of the UPS union boundary", not bad,
           "non-concave on " + ", ".join(bad) if bad else "all chords hold")


def test_ac10c_complementary_slackness():
    worst = 0.0
    tol = 1e-7
    for seed in range(20):
        rng = np.random.default_rng(6000 + seed)
        n, m, k = (int(x) for x in rng.integers(1, 4, size=3))
        ch = ChannelPair(crandn(rng, n, m), crandn(rng, k, m))
        cn = corners(ch, 2.0)
        for frac in (0.25, 0.75):
            q = cn.q_id + frac * (cn.q_max - cn.q_id)
            sol = solve_p3(ch, 2.0, q, tol=tol)
            if sol.dual is None:
                continue
            res = max(sol.dual.lam * abs(sol.harvested - q),
                      sol.dual.mu * abs(2.0 - sol.covariance.trace))
            worst = max(worst, res)
    report("AC10c complementary slackness residuals", worst <= tol, f"max {worst:.1e}")


_PROPS = {"mi": True, "hp": True}


@settings(max_examples=1000, derandomize=True)
@given(st.integers(0, 2**32 - 1), st.floats(0.0, 1.0))
def _mi_concave(seed, t):
    rng = np.random.default_rng(seed)
    h = crandn(rng, 3, 3)
    s1, s2 = random_psd(rng, 3, 5.0, rank=1), random_psd(rng, 3, 2.0)
    mix = mutual_information(h, t * s1 + (1 - t) * s2)
    assert mix >= t * mutual_information(h, s1) + (1 - t) * mutual_information(h, s2) - 1e-9


@settings(max_examples=1000, derandomize=True)
@given(st.integers(0, 2**32 - 1), st.floats(0.0, 5.0), st.floats(0.0, 5.0))
def _hp_linear(seed, a, b):
    rng = np.random.default_rng(seed)
    g = crandn(rng, 3, 3)
    s1, s2 = random_psd(rng, 3, 2.0), random_psd(rng, 3, 3.0)
    rhs = a * harvested_power(g, s1) + b * harvested_power(g, s2)
    assert abs(harvested_power(g, a * s1 + b * s2) - rhs) <= 1e-10 * max(1.0, abs(rhs))


@pytest.mark.parametrize("prop", ["mi", "hp"])
def test_ac10d_property_suites(prop):
    fn = {"mi": _mi_concave, "hp": _hp_linear}[prop]
    label = {"mi": "mutual information concavity", "hp": "harvested power linearity"}[prop]
    try:
        fn()
        ok, detail = True, "1000 trials"
    except AssertionError as exc:
        ok, detail = False, str(exc).splitlines()[0]
    report(f"AC10d {label}", ok, detail)


# 11 --------------------------------------------------------------------------
def test_ac11_determinism(tmp_path):
    differing = []
    for name in list_presets():
        cfg = load_config(name)
        a, b = tmp_path / f"{name}_a", tmp_path / f"{name}_b"
        run_scenario(cfg, a)
        run_scenario(cfg, b)
        for f in sorted(a.glob("*.csv")):
            if f.read_bytes() != (b / f.name).read_bytes():
                differing.append(f"{name}/{f.name}")
    report("AC11 byte-identical CSVs across runs", not differing,
           ", ".join(differing) or f"{len(list_presets())} presets")
