"""Kernel-level special functions against frozen high-precision values.

Oracle values were computed with mpmath at 40 decimal digits (log-gamma,
the spectral constant, fractional differencing weights via the gamma-ratio
closed form, and the lattice sum via Hurwitz zeta) and frozen here.
"""

import math

import numpy as np
import pytest
import scipy.special

from lrdlab.errors import ConvergenceError, DomainError
from lrdlab.kernel_special import (
    HurstParam,
    Tolerance,
    c_of_H,
    fgn_lattice_sum,
    frac_diff_coeffs,
    log_gamma,
)

LOGGAMMA_ORACLE = {
    0.3: 1.0957979948180755606,
    1.0: 0.0,
    2.5: 0.28468287047291915963,
    7.7: 7.9265413562690047789,
    123.456: 469.6055471299294835,
}

C_ORACLE = {
    0.6: 0.16677471495612405693,
    0.75: 0.14960335515053725423,
    0.8: 0.13373984546548752074,
    0.9: 0.082452469409151362449,
}

# psi_j = Gamma(j - d) / (Gamma(-d) Gamma(j + 1)), the (1 - B)^d weights
PSI_ORACLE = {
    (-0.3, 1): 0.3,
    (-0.3, 2): 0.195,
    (-0.3, 5): 0.10607025,
    (-0.3, 50): 0.021572911058049805461,
    (-0.3, 100): 0.013293663028481409014,
    (-0.3, 400): 0.0050413280910318061043,
    (-0.3, 768): 0.0031936604656905491151,
    (-0.3, 1000): 0.0026549440522692217025,
    (0.3, 1): -0.3,
    (0.3, 2): -0.105,
    (0.3, 5): -0.02972025,
    (0.3, 50): -0.0014350593720515521903,
    (0.3, 100): -0.00058167069881579957474,
    (0.3, 400): -0.000095799208320459581944,
    (0.3, 768): -0.000041017460768735451659,
    (0.3, 1000): -0.000029101324728067146643,
}

# S(x) = (2 pi)^(-s) (zeta(s, x) + zeta(s, 1 - x)), s = 2H + 1
LATTICE_ORACLE = {
    (0.25, 0.8): 0.33695839488634343918,
    (0.5, 0.8): 0.11115481691346673201,
    (0.0001, 0.8): 211218688.81264464125,
    (0.5, 0.6): 0.1879545343476045878,
    (0.037, 0.9): 59.461828778470051379,
    (0.31, 0.51): 0.35770470565100334607,
}


def test_log_gamma_matches_oracle():
    for x, want in LOGGAMMA_ORACLE.items():
        assert log_gamma(x) == pytest.approx(want, rel=1e-14, abs=1e-14)


@pytest.mark.parametrize("bad", [0.0, -1.0, -0.5, math.nan, math.inf])
def test_log_gamma_domain(bad):
    with pytest.raises(DomainError):
        log_gamma(bad)


def test_c_of_h_matches_oracle():
    for h, want in C_ORACLE.items():
        assert c_of_H(h) == pytest.approx(want, rel=1e-14)
        assert c_of_H(HurstParam(h)) == pytest.approx(want, rel=1e-14)
    # Closed form at the white-noise point.
    assert c_of_H(0.5) == pytest.approx(1.0 / (2.0 * math.pi), rel=1e-15)


def test_c_of_h_positive_and_continuous():
    for h in np.linspace(1e-3, 1.0 - 1e-6, 53):
        assert c_of_H(float(h)) > 0.0
    for h in np.linspace(0.55, 0.95, 41):
        assert abs(c_of_H(float(h) + 1e-6) - c_of_H(float(h))) <= 1e-4


@pytest.mark.parametrize("bad", [0.0, 1.0, 1.5, -0.8, math.nan])
def test_c_of_h_domain(bad):
    with pytest.raises(DomainError):
        c_of_H(bad)


@pytest.mark.parametrize("bad", [0.0, 1.5, -0.8, math.nan])
def test_hurst_param_domain(bad):
    with pytest.raises(DomainError):
        HurstParam(bad)


def test_hurst_param_band_and_d():
    assert HurstParam(0.8).d == pytest.approx(0.3, abs=1e-15)
    assert HurstParam(0.8).is_lrd
    # Boundary values are representable; long-range dependence is a flag.
    assert not HurstParam(0.5).is_lrd
    assert HurstParam(1.0).H == 1.0


def test_tolerance_validation():
    with pytest.raises(DomainError):
        Tolerance(abs_tol=0.0)
    with pytest.raises(DomainError):
        Tolerance(rel_tol=-1e-9)
    with pytest.raises(DomainError):
        Tolerance(max_terms=0)


def test_frac_diff_coeffs_matches_gamma_ratio():
    # Frozen 40-digit gamma-ratio values at lags up to 1000: the recursion
    # must track the closed form to 1e-12 relative across the whole range.
    for d in (0.3, -0.3):
        psi = frac_diff_coeffs(d, 1000)
        assert psi[0] == 1.0
        for (dd, j), want in PSI_ORACLE.items():
            if dd == d:
                assert psi[j] == pytest.approx(want, rel=1e-12)
    # Float-precision gamma-ratio route for d < 0 as a dense cross-check
    # (the gammaln difference itself carries a few e-13 of noise).
    d = -0.3
    psi = frac_diff_coeffs(d, 1000)
    j = np.arange(1, 1001, dtype=np.float64)
    want = np.exp(
        scipy.special.gammaln(j - d) - scipy.special.gammaln(-d) - scipy.special.gammaln(j + 1)
    )
    assert np.allclose(psi[1:], want, rtol=5e-12, atol=0.0)


def test_frac_diff_coeffs_degenerate_and_signs():
    psi = frac_diff_coeffs(0.0, 10)
    assert psi[0] == 1.0
    assert np.all(psi[1:] == 0.0)
    # (1-B)^d with d > 0 differences: psi_j < 0 for j >= 1; with d < 0 it
    # integrates: all weights positive.
    assert np.all(frac_diff_coeffs(0.3, 50)[1:] < 0.0)
    assert np.all(frac_diff_coeffs(-0.3, 50) > 0.0)


@pytest.mark.parametrize("bad_d", [0.5, -1.0, 0.7, math.nan])
def test_frac_diff_coeffs_domain(bad_d):
    with pytest.raises(DomainError):
        frac_diff_coeffs(bad_d, 5)


def test_frac_diff_coeffs_negative_length():
    with pytest.raises(DomainError):
        frac_diff_coeffs(0.3, -1)


def test_lattice_sum_matches_hurwitz_oracle():
    for (x, h), want in LATTICE_ORACLE.items():
        got = fgn_lattice_sum(x, h, Tolerance(abs_tol=1e-14))
        assert got == pytest.approx(want, rel=1e-12)
        assert fgn_lattice_sum(-x, h) == pytest.approx(want, rel=1e-12)


def test_lattice_sum_against_scipy_hurwitz_zeta():
    # Independent route: zeta(s, x) + zeta(s, 1 - x), scaled.
    for h in (0.6, 0.8, 0.95):
        s = 2.0 * h + 1.0
        for x in (0.01, 0.125, 0.5):
            want = (2.0 * math.pi) ** (-s) * (
                scipy.special.zeta(s, x) + scipy.special.zeta(s, 1.0 - x)
            )
            assert fgn_lattice_sum(x, h) == pytest.approx(want, rel=1e-12)


def test_lattice_sum_against_brute_force_partial_sum():
    # Raw truncated sum with a crude integral tail; agreement to the tail's
    # own accuracy confirms the accelerated version sums the same series.
    h, x = 0.8, 0.2
    s = 2.0 * h + 1.0
    j = np.arange(1, 200_001, dtype=np.float64)
    brute = abs(x) ** (-s) + np.sum((j + x) ** (-s) + (j - x) ** (-s))
    brute += 2.0 * 200_001.0 ** (1.0 - s) / (s - 1.0)
    brute *= (2.0 * math.pi) ** (-s)
    assert fgn_lattice_sum(x, h) == pytest.approx(brute, rel=1e-8)


def test_lattice_sum_closed_form_at_half():
    # s = 2 gives sum_j (j + x)^(-2) = pi^2 / sin^2(pi x), so the scaled sum
    # collapses to 1 / (4 sin^2(pi x)).
    for x in (0.08, 0.25, 0.41, 0.5):
        want = 0.25 / math.sin(math.pi * x) ** 2
        assert fgn_lattice_sum(x, 0.5, Tolerance(abs_tol=1e-13)) == pytest.approx(want, rel=1e-12)


def test_lattice_sum_array_and_scalar_agree():
    xs = np.array([-0.5, -0.1, 0.003, 0.25, 0.5])
    arr = fgn_lattice_sum(xs, 0.8)
    assert isinstance(arr, np.ndarray) and arr.shape == xs.shape
    for xi, vi in zip(xs, arr):
        assert fgn_lattice_sum(float(xi), 0.8) == pytest.approx(float(vi), rel=1e-15)
    assert isinstance(fgn_lattice_sum(0.25, 0.8), float)


def test_lattice_sum_domain_and_budget():
    with pytest.raises(DomainError):
        fgn_lattice_sum(0.0, 0.8)
    with pytest.raises(DomainError):
        fgn_lattice_sum(0.6, 0.8)
    with pytest.raises(ConvergenceError):
        fgn_lattice_sum(0.25, 0.51, Tolerance(abs_tol=1e-30, max_terms=16))
