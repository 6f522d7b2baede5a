import numpy as np
import pytest
from scipy.special import iv, kv

from necrotumor.bessel import log_mod_sph_i, log_mod_sph_k

R_SAMPLES = np.array([0.05, 0.5, 1.0, 4.3, 5.8, 12.7, 40.0])


def _ref_log_i(n, r):
    return np.log(np.sqrt(np.pi / (2.0 * r)) * iv(n + 0.5, r))


def _ref_log_k(n, r):
    return np.log(np.sqrt(np.pi / (2.0 * r)) * kv(n + 0.5, r))


@pytest.mark.parametrize("kmax", [0, 1, 5, 40, 80])
def test_log_i_matches_scipy(kmax):
    L = log_mod_sph_i(kmax, R_SAMPLES)
    assert L.shape == (kmax + 2, R_SAMPLES.size)
    for n in range(-1, kmax + 1):
        ref = _ref_log_i(n, R_SAMPLES)
        assert np.max(np.abs(L[n + 1] - ref)) < 1e-11


@pytest.mark.parametrize("kmax", [0, 1, 5, 40, 80])
def test_log_k_matches_scipy(kmax):
    L = log_mod_sph_k(kmax, R_SAMPLES)
    for n in range(-1, kmax + 1):
        ref = _ref_log_k(n, R_SAMPLES)
        assert np.max(np.abs(L[n + 1] - ref)) < 1e-11


def test_zeroth_order_closed_forms():
    r = R_SAMPLES
    i0 = np.exp(log_mod_sph_i(0, r)[1])
    k0 = np.exp(log_mod_sph_k(0, r)[1])
    assert np.allclose(i0, np.sinh(r) / r, rtol=1e-13)
    assert np.allclose(k0, np.pi / (2.0 * r) * np.exp(-r), rtol=1e-13)


def test_order_minus_one_rows():
    r = R_SAMPLES
    im1 = np.exp(log_mod_sph_i(3, r)[0])
    km1 = np.exp(log_mod_sph_k(3, r)[0])
    assert np.allclose(im1, np.cosh(r) / r, rtol=1e-12)
    # k_{-1} = k_0 for modified spherical Bessel functions
    assert np.allclose(km1, np.exp(log_mod_sph_k(3, r)[1]), rtol=1e-13)


def test_high_order_no_overflow():
    # scipy's iv underflows/overflows where the log recurrences stay
    # finite; check finiteness and the Wronskian identity in log space:
    # i_k(r) k_{k-1}(r) + i_{k-1}(r) k_k(r) = pi / (2 r^2)
    r = np.array([0.5, 5.8, 60.0])
    kmax = 300
    Li = log_mod_sph_i(kmax, r)
    Lk = log_mod_sph_k(kmax, r)
    assert np.all(np.isfinite(Li)) and np.all(np.isfinite(Lk))
    for k in (150, 300):
        lhs = np.exp(Li[k + 1] + Lk[k]) + np.exp(Li[k] + Lk[k + 1])
        rhs = np.pi / (2.0 * r * r)
        assert np.allclose(lhs, rhs, rtol=1e-10)


def test_monotone_in_order():
    # at fixed r, i_k decreases and k_k increases with the order
    r = np.array([3.7])
    Li = log_mod_sph_i(60, r)[1:, 0]
    Lk = log_mod_sph_k(60, r)[1:, 0]
    assert np.all(np.diff(Li) < 0.0)
    assert np.all(np.diff(Lk) > 0.0)


def test_scalar_input():
    out = log_mod_sph_i(2, 1.3)
    assert out.shape == (4, 1)
