import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from swipt_re.core import (
    ChannelPair,
    NoiseSplit,
    REBoundary,
    REPoint,
    Scheme,
    TransmitCovariance,
    harvested_power,
    hermitian_eig,
    hermitian_eig_and_svd,
    mutual_information,
)
from swipt_re.errors import DimensionError, NonFiniteError, NotPSDError

from conftest import crandn, random_psd


class TestMutualInformation:
    def test_scalar(self):
        assert mutual_information([[1.0]], [[1.0]]) == pytest.approx(1.0, abs=1e-15)

    def test_zero_covariance(self):
        assert mutual_information(np.eye(2), np.zeros((2, 2))) == 0.0

    def test_diagonal_hand_value(self):
        r = mutual_information(np.diag([2.0, 1.0]), np.diag([0.875, 0.125]))
        assert r == pytest.approx(math.log2(4.5) + math.log2(1.125), abs=1e-12)
        assert r == pytest.approx(2.3399, abs=1e-4)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            mutual_information(np.eye(2), np.eye(3))

    def test_non_psd_rejected(self):
        with pytest.raises(NotPSDError):
            mutual_information(np.eye(2), np.diag([1.0, -0.1]))

    def test_zero_iff_hsh_zero(self, rng):
        h = np.array([[1.0, 0.0]])
        assert mutual_information(h, np.diag([0.0, 3.0])) == 0.0
        assert mutual_information(h, np.diag([1e-3, 3.0])) > 0.0


class TestHarvestedPower:
    def test_scalar(self):
        assert harvested_power([[2.0]], [[1.0]]) == 4.0

    def test_zero(self, rng):
        assert harvested_power(crandn(rng, 3, 2), np.zeros((2, 2))) == 0.0

    def test_diagonal_with_efficiency(self):
        assert harvested_power(np.diag([2.0, 1.0]), np.diag([1.0, 0.0]), zeta=0.5) == 2.0

    @pytest.mark.parametrize("zeta", [0.0, -0.1, 1.5])
    def test_bad_zeta(self, zeta):
        with pytest.raises(ValueError):
            harvested_power([[1.0]], [[1.0]], zeta)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            harvested_power(np.eye(3), np.eye(2))


class TestFactorization:
    def test_diagonal(self):
        f = hermitian_eig_and_svd(np.diag([3.0, 1.0]))
        np.testing.assert_allclose(f.s, [3.0, 1.0])
        np.testing.assert_allclose(f.v, np.eye(2), atol=1e-15)

    def test_zero_matrix(self):
        assert np.all(hermitian_eig_and_svd(np.zeros((2, 3))).s == 0.0)

    def test_reconstruction(self, rng):
        a = crandn(rng, 3, 2)
        f = hermitian_eig_and_svd(a)
        assert np.linalg.norm(f.reconstruct() - a) <= 1e-10 * np.linalg.norm(a)

    def test_phase_convention_and_determinism(self, rng):
        a = crandn(rng, 4, 3)
        f1, f2 = hermitian_eig_and_svd(a), hermitian_eig_and_svd(a.copy())
        assert np.array_equal(f1.vh, f2.vh) and np.array_equal(f1.s, f2.s)
        for k in range(3):
            col = f1.v[:, k]
            j = np.argmax(np.abs(col) > 1e-12 * np.abs(col).max())
            assert abs(col[j].imag) < 1e-15 and col[j].real > 0

    def test_nonfinite(self):
        with pytest.raises(NonFiniteError):
            hermitian_eig_and_svd([[1.0, np.nan]])

    def test_eig_descending(self, rng):
        s = random_psd(rng, 4)
        w, v = hermitian_eig(s)
        assert np.all(np.diff(w) <= 0)
        np.testing.assert_allclose((v * w) @ v.conj().T, s, atol=1e-12)

    @given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 2**32 - 1))
    def test_ordering_and_top_vector(self, n, m, seed):
        g = crandn(np.random.default_rng(seed), n, m)
        f = hermitian_eig_and_svd(g)
        assert np.all(np.diff(f.s) <= 1e-12)
        v1 = f.v[:, 0]
        lam_max = np.linalg.eigvalsh(g.conj().T @ g)[-1]
        assert np.linalg.norm(g @ v1) ** 2 == pytest.approx(lam_max, rel=1e-10)


class TestChannelPair:
    def test_colocated_shares(self, rng):
        h = crandn(rng, 2, 3)
        ch = ChannelPair.shared(h)
        assert np.array_equal(ch.g_matrix, ch.h_matrix) and ch.colocated

    def test_colocated_mismatch(self):
        with pytest.raises(DimensionError):
            ChannelPair(np.eye(2), 2 * np.eye(2), colocated=True)

    def test_transmit_dims(self):
        with pytest.raises(DimensionError):
            ChannelPair(np.ones((2, 3)), np.ones((2, 2)))

    def test_missing_g(self):
        with pytest.raises(DimensionError):
            ChannelPair(np.eye(2))

    def test_immutable(self):
        ch = ChannelPair(np.eye(2), np.eye(2))
        with pytest.raises(ValueError):
            ch.h_matrix[0, 0] = 5.0

    def test_miso_rows(self):
        h = np.array([1.0, 1j])
        ch = ChannelPair.miso(h, h)
        np.testing.assert_allclose(ch.h_matrix, [[1.0, -1j]])

    def test_svd_cache_reconstructs(self, rng):
        ch = ChannelPair(crandn(rng, 3, 4), crandn(rng, 2, 4))
        for m, f in ((ch.h_matrix, ch.h_svd), (ch.g_matrix, ch.g_svd)):
            assert np.linalg.norm(f.reconstruct() - m) <= 1e-10 * np.linalg.norm(m)
        assert ch.g1 == pytest.approx(np.linalg.eigvalsh(ch.g_matrix.conj().T @ ch.g_matrix)[-1])


class TestTransmitCovariance:
    def test_clamps_tiny_negative(self):
        c = TransmitCovariance(np.diag([1.0, -5e-11]), 1.0)
        assert c.eigenvalues.min() >= 0.0

    def test_rejects_negative(self):
        with pytest.raises(NotPSDError):
            TransmitCovariance(np.diag([1.0, -1e-6]), 2.0)

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotPSDError):
            TransmitCovariance(np.array([[1.0, 0.5], [0.0, 1.0]]), 3.0)

    def test_trace_budget(self):
        TransmitCovariance(np.eye(2) * 0.5 * (1 + 1e-9), 1.0)
        with pytest.raises(NotPSDError):
            TransmitCovariance(np.eye(2), 1.5)

    def test_zeros(self):
        assert TransmitCovariance.zeros(3).trace == 0.0


class TestREBoundary:
    def test_ordering_enforced(self):
        with pytest.raises(ValueError):
            REBoundary.from_arrays([0.0, 0.0], [1.0, 0.5], Scheme.TS1)
        with pytest.raises(ValueError):
            REBoundary.from_arrays([0.0, 1.0], [1.0, 1.5], Scheme.TS1)

    def test_point_validation(self):
        with pytest.raises(ValueError):
            REPoint(-1.0, 0.0)
        with pytest.raises(ValueError):
            REPoint(math.inf, 0.0)

    def test_chord_and_interp(self):
        b = REBoundary.from_arrays([0, 1, 2], [2.0, 1.0, 0.0], Scheme.TS1)
        assert b.is_concave(0.0)
        assert b.rate_at(0.5) == pytest.approx(1.5)
        assert np.isnan(b.rate_at(2.5))
        bad = REBoundary.from_arrays([0, 1, 2], [2.0, 0.5, 0.0], Scheme.TS1)
        assert bad.chord_violations() == [1]


class TestNoiseSplit:
    def test_default_complement(self):
        assert NoiseSplit(0.25).sigma_p_sq == 0.75

    def test_sum_enforced(self):
        with pytest.raises(ValueError):
            NoiseSplit(0.5, 0.6)


# --- property suites ------------------------------------------------------
def _instance(seed, n=3, m=3):
    rng = np.random.default_rng(seed)
    return rng, crandn(rng, n, m)


@given(st.integers(0, 2**32 - 1), st.floats(0.0, 1.0), st.floats(0.0, 5.0), st.floats(0.0, 5.0))
def test_harvested_power_linear(seed, _t, a, b):
    rng, g = _instance(seed)
    s1, s2 = random_psd(rng, 3, 2.0), random_psd(rng, 3, 3.0)
    lhs = harvested_power(g, a * s1 + b * s2)
    rhs = a * harvested_power(g, s1) + b * harvested_power(g, s2)
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(rhs))


@given(st.integers(0, 2**32 - 1), st.floats(0.0, 1.0))
def test_mutual_information_concave(seed, t):
    rng, h = _instance(seed)
    s1, s2 = random_psd(rng, 3, 5.0, rank=1), random_psd(rng, 3, 2.0)
    mix = mutual_information(h, t * s1 + (1 - t) * s2)
    assert mix >= t * mutual_information(h, s1) + (1 - t) * mutual_information(h, s2) - 1e-9


@given(st.integers(0, 2**32 - 1), st.floats(0.01, 0.99))
def test_duty_cycle_loses_rate(seed, alpha):
    rng, h = _instance(seed)
    s = random_psd(rng, 3, 4.0)
    assert alpha * mutual_information(h, s / alpha) <= mutual_information(h, s) + 1e-12
