"""Power-moments of the coupled family and their inversion to (sigma, kappa).

The m-th moment of the n-th power density, ``E[(X^(n))^m]``, is finite for
``m <= n - 1`` whatever the coupling.  All gamma ratios are evaluated in log
space because their arguments scale like ``n / kappa``.
"""

from dataclasses import dataclass
import math

from scipy import optimize

from . import dist, kernels
from .errors import (DomainError, InversionError, MomentDivergenceError, NoSolutionError,
                     ParameterError)
from .quadrature import integrate_halfline

KAPPA_BRACKET = (0.0, 20.0)


@dataclass(frozen=True)
class PowerMoment:
    m: int
    n: int
    value: float


def gpd_divergence_bound(m, n):
    """Largest coupling (exclusive) with a finite ``mu_m^(n)``; ``inf`` if none."""
    excess = m + 1 - n
    return math.inf if excess <= 0 else n / excess


def gpd_power_moment(m, n, sigma, kappa):
    """Centered power-moment of the one-sided coupled exponential.

    ``(sigma/kappa)**m * m! * Gamma(n - 1 - m + n/kappa) / Gamma(n - 1 + n/kappa)``
    """
    if m < 0 or n < 1 or sigma <= 0 or kappa < 0:
        raise ParameterError(f"invalid moment request m={m}, n={n}, sigma={sigma}, kappa={kappa}")
    bound = gpd_divergence_bound(m, n)
    if kappa >= bound:
        raise MomentDivergenceError(
            f"mu_{m}^({n}) diverges for kappa >= {bound:g} (kappa = {kappa!r})",
            {"bound": bound, "kappa": kappa})
    if kappa < dist.KAPPA_ZERO:
        return math.factorial(m) * (sigma / n) ** m
    a = n / kappa + n - 1.0
    log_ratio = -kernels.lgamma_diff(a - m, m)
    return math.exp(m * math.log(sigma / kappa) + math.lgamma(m + 1.0) + log_ratio)


def gauss_power_moment(m, n, sigma, kappa):
    """Centered power-moment of the coupled Gaussian via the power-density transform.

    Odd orders vanish by symmetry.  Even orders are Student's t moments of the
    n-th power density.
    """
    if m < 0 or n < 1 or sigma <= 0 or kappa < 0:
        raise ParameterError(f"invalid moment request m={m}, n={n}, sigma={sigma}, kappa={kappa}")
    q = dist.power_density_params(dist.CoupledParams(alpha=2, sigma=sigma, kappa=kappa), n)
    if m * q.kappa >= 1.0:
        bound = n / (m + 1 - n) if m + 1 > n else math.inf
        raise MomentDivergenceError(
            f"mu_{m}^({n}) diverges for kappa >= {bound:g} (kappa = {kappa!r})",
            {"bound": bound, "kappa": kappa})
    if m % 2:
        return 0.0
    if q.is_limit:
        return q.sigma ** m * math.prod(range(m - 1, 0, -2))
    nu = 1.0 / q.kappa
    logv = (m * math.log(q.sigma) + 0.5 * m * math.log(nu)
            + math.lgamma(0.5 * (m + 1)) - kernels.lgamma_diff(0.5 * (nu - m), 0.5 * m)
            - 0.5 * math.log(math.pi))
    return math.exp(logv)


def power_moment(m, n, p):
    fn = gpd_power_moment if p.alpha == 1 else gauss_power_moment
    return PowerMoment(m, n, fn(m, n, p.sigma, p.kappa))


# --------------------------------------------------------------------------
# inversions
# --------------------------------------------------------------------------

def invert_gpd(pair_mean, triplet_m2):
    """(sigma, kappa) from the pair mean and triplet second moment.

    ``sigma = 2 * pair_mean``; ``kappa = 2 sigma**2 / (3 triplet_m2) - 3``.
    """
    if not (pair_mean > 0 and triplet_m2 > 0):
        raise DomainError("pair mean and triplet second moment must be positive")
    sigma = 2.0 * pair_mean
    kappa = 2.0 * sigma * sigma / (3.0 * triplet_m2) - 3.0
    if kappa <= -1.0:
        raise InversionError(f"moment inversion gave kappa = {kappa:.6g} <= -1",
                             {"sigma_hat": sigma, "kappa_hat": kappa})
    return sigma, kappa


def invert_gauss_sigma(triplet_m2):
    if not triplet_m2 > 0:
        raise DomainError(f"triplet second moment must be positive, got {triplet_m2!r}")
    return math.sqrt(3.0 * triplet_m2)


def invert_gauss_kappa_quint(m4, sigma_hat):
    """kappa from the quintuplet fourth moment; negative values mean the kappa=0 boundary."""
    if not m4 > 0:
        raise DomainError(f"quintuplet fourth moment must be positive, got {m4!r}")
    return (3.0 * sigma_hat ** 4 / m4 - 25.0) / 10.0


# --------------------------------------------------------------------------
# log-average (zeroth power-moment)
# --------------------------------------------------------------------------

def theoretical_log_abs_mean(p):
    """E[ln|X - mu|] by quadrature over the tail-mapped support."""
    f = dist.scalar_pdf(p)
    mu = p.mu

    def integrand(x):
        d = x - mu
        return math.log(d) * f(x) if d > 0 else 0.0

    half = integrate_halfline(integrand, mu, p.sigma, p.kappa)
    # ln|x - mu| f(x) is symmetric about mu on two-sided support.
    return 2.0 * half if p.two_sided else half


def solve_kappa_from_log_mean(sample_log_mean, sigma_hat, alpha, two_sided=None, bracket=KAPPA_BRACKET):
    """Coupling whose theoretical log-average matches ``sample_log_mean``.

    The log-average grows monotonically with kappa at fixed scale.  The
    lower bracket end kappa=0 is evaluated on the exponential/Gaussian
    branch.
    """
    if not sigma_hat > 0:
        raise DomainError(f"sigma_hat must be positive, got {sigma_hat!r}")
    base = dist.CoupledParams(alpha=alpha, sigma=sigma_hat, two_sided=two_sided)

    def g(kappa):
        return theoretical_log_abs_mean(base.replace(kappa=kappa)) - sample_log_mean

    lo, hi = bracket
    g_lo, g_mid, g_hi = g(lo), g(0.5 * (lo + hi)), g(hi)
    if not g_lo < g_mid < g_hi:
        raise NoSolutionError("log-average is not monotone over the kappa bracket",
                              {"g_lo": g_lo, "g_mid": g_mid, "g_hi": g_hi})
    if g_lo > 0 or g_hi < 0:
        raise NoSolutionError(
            f"no sign change of the log-average residual on kappa in [{lo}, {hi}]",
            {"g_lo": g_lo, "g_hi": g_hi, "target": sample_log_mean})
    return optimize.brentq(g, lo, hi, xtol=1e-12, rtol=1e-12, maxiter=200)
