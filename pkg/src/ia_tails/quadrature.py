"""Adaptive quadrature over the coupled-family support.

Heavy tails are handled by splitting at the scale and mapping the outer part
``x = mu + sigma * s**(-c)`` onto ``s in (0, 1]``.  With ``c >= kappa`` the
transformed integrand of any quantity that decays at least as fast as the
density stays bounded, so QUADPACK sees a finite interval.
"""

import warnings

import numpy as np
from scipy import integrate

from .errors import NumericError

EPSABS = 1e-10
EPSREL = 1e-12
_LIMIT = 400


def _quad(func, a, b, epsabs, epsrel, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(func, a, b, epsabs=epsabs, epsrel=epsrel, limit=_LIMIT, **kw)
    tol = max(100 * epsabs, 100 * epsrel * abs(val))
    if not np.isfinite(val) or err > tol:
        raise NumericError(
            f"quadrature on [{a}, {b}] did not converge (estimate {val!r}, error {err:.3g})",
            {"value": val, "abserr": err, "target": epsabs},
        )
    return val, err


def integrate_halfline(func, mu, sigma, kappa, epsabs=EPSABS, epsrel=EPSREL):
    """Integrate ``func(x)`` over ``[mu, inf)``.

    ``func`` must decay at least like the coupled density with coupling
    ``kappa`` (power law of order ``(1 + kappa) / kappa``).
    """
    c = max(float(kappa), 1.0)
    inner, _ = _quad(func, mu, mu + sigma, epsabs, epsrel)

    def outer(s):
        if s <= 0.0:
            return 0.0
        ls = -c * np.log(s)
        if ls > 700.0:
            return 0.0
        x = mu + sigma * np.exp(ls)
        return func(x) * sigma * c * np.exp(ls) / s

    tail, _ = _quad(outer, 0.0, 1.0, epsabs, epsrel)
    return inner + tail


def integrate_support(func, params, epsabs=EPSABS, epsrel=EPSREL):
    """Integrate ``func`` over the support of ``params`` (one- or two-sided)."""
    mu, sigma, kappa = params.mu, params.sigma, params.kappa
    right = integrate_halfline(func, mu, sigma, kappa, epsabs, epsrel)
    if not params.two_sided:
        return right
    left = integrate_halfline(lambda x: func(2.0 * mu - x), mu, sigma, kappa, epsabs, epsrel)
    return left + right
