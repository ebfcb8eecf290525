import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import special

from ia_tails import moments
from ia_tails.dist import CoupledParams
from ia_tails.errors import (DomainError, InversionError, MomentDivergenceError,
                             NoSolutionError)
from ia_tails.sampler import RandomStream, sample_coupled

SIGMAS = (0.5, 1.0, 2.0)
KAPPAS = (0.25, 0.5, 1.0, 2.0)


def table1_rows(sigma, kappa):
    return {(1, 2): sigma / 2,
            (2, 3): 2 * sigma ** 2 / (3 * (3 + kappa)),
            (3, 4): 3 * sigma ** 3 / (2 * (4 + kappa) * (4 + 2 * kappa))}


@pytest.mark.parametrize("sigma", SIGMAS)
@pytest.mark.parametrize("kappa", KAPPAS)
def test_gpd_rows(sigma, kappa):
    for (m, n), ref in table1_rows(sigma, kappa).items():
        assert moments.gpd_power_moment(m, n, sigma, kappa) == pytest.approx(ref, rel=1e-10)


@pytest.mark.parametrize("sigma", SIGMAS)
@pytest.mark.parametrize("kappa", KAPPAS)
def test_gauss_rows(sigma, kappa):
    g = moments.gauss_power_moment
    assert g(2, 3, sigma, kappa) == pytest.approx(sigma ** 2 / 3, rel=1e-10)
    assert g(4, 5, sigma, kappa) == pytest.approx(3 * sigma ** 4 / (25 + 10 * kappa), rel=1e-10)
    assert g(3, 4, sigma, kappa) == 0.0
    assert g(1, 2, sigma, kappa) == 0.0


def test_moment_examples():
    assert moments.gpd_power_moment(2, 3, 0.5, 1.0) == pytest.approx(1 / 24, rel=1e-12)
    assert moments.gpd_power_moment(0, 1, 0.7, 0.3) == pytest.approx(1.0, rel=1e-14)
    assert moments.gauss_power_moment(2, 3, 0.5, 1.0) == pytest.approx(1 / 12, rel=1e-12)
    assert moments.gauss_power_moment(4, 5, 0.5, 1.0) == pytest.approx(3 * 0.0625 / 35, rel=1e-12)


def test_zero_coupling_limit():
    assert moments.gpd_power_moment(2, 3, 0.5, 0.0) == pytest.approx(2 * 0.25 / 9, rel=1e-12)
    assert moments.gpd_power_moment(2, 3, 0.5, 1e-9) == pytest.approx(2 * 0.25 / 9, rel=1e-8)
    assert moments.gauss_power_moment(4, 5, 0.5, 1e-9) == pytest.approx(3 * 0.0625 / 25, rel=1e-8)
    assert moments.gauss_power_moment(4, 5, 0.5, 0.0) == pytest.approx(3 * 0.0625 / 25, rel=1e-12)


@pytest.mark.parametrize("m,n", [(1, 1), (2, 1), (2, 2), (3, 2), (4, 3), (5, 3)])
def test_divergence_boundary(m, n):
    # the moment integral converges iff kappa < n / (m + 1 - n)
    bound = n / (m + 1 - n)
    assert moments.gpd_divergence_bound(m, n) == bound
    assert math.isfinite(moments.gpd_power_moment(m, n, 1.0, bound - 1e-9))
    with pytest.raises(MomentDivergenceError) as exc:
        moments.gpd_power_moment(m, n, 1.0, bound + 1e-9)
    assert exc.value.diagnostics["bound"] == bound


def test_divergence_bound_matches_quadrature():
    # E[X^2] of the one-sided coupled exponential diverges at kappa = 1/2
    from ia_tails.quadrature import integrate_halfline
    from ia_tails import dist
    for kappa, finite in ((0.45, True), (0.55, False)):
        p = CoupledParams(1, 0.0, 1.0, kappa)
        f = dist.scalar_pdf(p)
        if finite:
            v = integrate_halfline(lambda x: x * x * f(x), 0.0, 1.0, kappa)
            assert v == pytest.approx(moments.gpd_power_moment(2, 1, 1.0, kappa), rel=1e-6)
        else:
            with pytest.raises(MomentDivergenceError):
                moments.gpd_power_moment(2, 1, 1.0, kappa)


def test_no_bound_when_power_is_high():
    assert moments.gpd_divergence_bound(2, 3) == math.inf
    assert math.isfinite(moments.gpd_power_moment(2, 3, 1.0, 50.0))


def test_gauss_divergence():
    with pytest.raises(MomentDivergenceError):
        moments.gauss_power_moment(2, 1, 1.0, 0.6)
    assert moments.gauss_power_moment(2, 1, 1.0, 0.4) == pytest.approx(2.5 / 0.5, rel=1e-12)


def test_invert_gpd_examples():
    assert moments.invert_gpd(0.25, 1 / 24) == pytest.approx((0.5, 1.0), rel=1e-14)
    s, k = moments.invert_gpd(0.25, 2 * 0.25 / 9)
    assert s == 0.5 and abs(k) < 1e-14
    with pytest.raises(InversionError):
        moments.invert_gpd(0.25, 1.0)
    with pytest.raises(DomainError):
        moments.invert_gpd(-1.0, 1.0)


@pytest.mark.parametrize("sigma", SIGMAS)
@pytest.mark.parametrize("kappa", KAPPAS)
def test_inversion_round_trips(sigma, kappa):
    s, k = moments.invert_gpd(moments.gpd_power_moment(1, 2, sigma, kappa),
                              moments.gpd_power_moment(2, 3, sigma, kappa))
    assert s == pytest.approx(sigma, rel=1e-12)
    assert k == pytest.approx(kappa, rel=1e-12, abs=1e-12)
    s = moments.invert_gauss_sigma(moments.gauss_power_moment(2, 3, sigma, kappa))
    assert s == pytest.approx(sigma, rel=1e-12)
    m4 = moments.gauss_power_moment(4, 5, sigma, kappa)
    assert moments.invert_gauss_kappa_quint(m4, sigma) == pytest.approx(kappa, rel=1e-12)


def test_gauss_inversion_examples():
    assert moments.invert_gauss_sigma(1 / 12) == pytest.approx(0.5, rel=1e-15)
    assert moments.invert_gauss_sigma(1 / 3) == pytest.approx(1.0, rel=1e-15)
    assert moments.invert_gauss_sigma(3.0) == pytest.approx(3.0, rel=1e-15)
    with pytest.raises(DomainError):
        moments.invert_gauss_sigma(0.0)
    s = 0.8
    assert moments.invert_gauss_kappa_quint(3 * s ** 4 / 35, s) == pytest.approx(1.0, rel=1e-12)
    assert moments.invert_gauss_kappa_quint(3 * s ** 4 / 25, s) == pytest.approx(0.0, abs=1e-12)
    assert moments.invert_gauss_kappa_quint(3 * s ** 4 / 20, s) < 0


@given(st.floats(0.05, 10.0), st.floats(0.0, 5.0))
def test_gpd_inversion_property(sigma, kappa):
    s, k = moments.invert_gpd(moments.gpd_power_moment(1, 2, sigma, kappa),
                              moments.gpd_power_moment(2, 3, sigma, kappa))
    assert s == pytest.approx(sigma, rel=1e-12)
    assert k == pytest.approx(kappa, rel=1e-9, abs=1e-9)


# ---------------------------------------------------------------- log-average

def gpd_log_mean(sigma, kappa):
    # ln X = ln(sigma/kappa) + ln(V - 1) with V = U^-kappa
    return math.log(sigma / kappa) - np.euler_gamma - special.digamma(1.0 / kappa)


def t_log_mean(sigma, kappa):
    nu = 1.0 / kappa
    return (math.log(sigma) + 0.5 * math.log(nu)
            + 0.5 * (special.digamma(0.5) - special.digamma(0.5 * nu)))


@pytest.mark.parametrize("kappa", [0.05, 0.25, 0.5, 1.0, 2.0, 5.0])
def test_log_mean_closed_forms(kappa):
    for sigma in (0.5, 3.0):
        got = moments.theoretical_log_abs_mean(CoupledParams(1, 0.0, sigma, kappa))
        assert got == pytest.approx(gpd_log_mean(sigma, kappa), abs=1e-9)
        got = moments.theoretical_log_abs_mean(CoupledParams(2, 0.0, sigma, kappa))
        assert got == pytest.approx(t_log_mean(sigma, kappa), abs=1e-9)


def test_log_mean_limits():
    got = moments.theoretical_log_abs_mean(CoupledParams(1, 0.0, 1.0, 1e-8))
    assert got == pytest.approx(-np.euler_gamma, abs=1e-4)
    gauss = 0.5 * (special.digamma(0.5) + math.log(2.0))
    assert moments.theoretical_log_abs_mean(CoupledParams(2, 0.0, 1.0, 0.0)) == pytest.approx(gauss, abs=1e-9)


@pytest.mark.parametrize("alpha", [1, 2])
@pytest.mark.parametrize("kappa", [0.0, 0.3, 1.0, 2.0])
def test_log_mean_scale_shift(alpha, kappa):
    base = moments.theoretical_log_abs_mean(CoupledParams(alpha, 0.0, 1.0, kappa))
    for sigma in (0.2, 2.0, 17.0):
        v = moments.theoretical_log_abs_mean(CoupledParams(alpha, 0.0, sigma, kappa))
        assert v - math.log(sigma) == pytest.approx(base, abs=1e-9)


def test_log_mean_monte_carlo():
    p = CoupledParams(2, 0.0, 0.5, 1.0)
    x = np.log(np.abs(sample_coupled(1_000_000, p, RandomStream(77)).values))
    se = x.std() / math.sqrt(x.size)
    assert abs(moments.theoretical_log_abs_mean(p) - x.mean()) < 4 * se


@pytest.mark.parametrize("alpha", [1, 2])
@pytest.mark.parametrize("kappa", [0.25, 1.0, 2.0])
def test_solve_round_trip(alpha, kappa):
    target = moments.theoretical_log_abs_mean(CoupledParams(alpha, 0.0, 0.5, kappa))
    assert moments.solve_kappa_from_log_mean(target, 0.5, alpha) == pytest.approx(kappa, abs=1e-8)


def test_solve_boundary_and_failure():
    target = moments.theoretical_log_abs_mean(CoupledParams(1, 0.0, 0.5, 1e-9))
    assert moments.solve_kappa_from_log_mean(target, 0.5, 1) < 1e-4
    with pytest.raises(NoSolutionError) as exc:
        moments.solve_kappa_from_log_mean(-50.0, 0.5, 1)
    assert "g_lo" in exc.value.diagnostics
    with pytest.raises(DomainError):
        moments.solve_kappa_from_log_mean(0.0, -1.0, 1)


def test_solve_monte_carlo():
    x = sample_coupled(1_000_000, CoupledParams(1, 0.0, 0.5, 0.5), RandomStream(78)).values
    k = moments.solve_kappa_from_log_mean(np.log(x).mean(), 0.5, 1)
    assert abs(k - 0.5) < 0.05
