"""Maximum-likelihood baseline with the location fixed at zero."""

from dataclasses import dataclass
import math

import numpy as np
from scipy import optimize

from .dist import CoupledParams, _log_norm, logpdf
from .errors import FitError, InsufficientDataError, ParameterError
from .ia import EstimateResult

KAPPA_FLOOR = 1e-6
XATOL = 1e-8
FATOL = 1e-8
SIGMA_GRID = (0.5, 1.0, 2.0)
KAPPA_GRID = (0.1, 1.0)
N_RESTARTS = 4
MIN_SAMPLES = 10


@dataclass
class FitDiagnostics:
    nll_at_optimum: float
    iterations: int
    converged: bool
    restarts_used: int


def nll(params, samples):
    """Negative log-likelihood, summed in log space."""
    x = np.asarray(getattr(samples, "values", samples), dtype=np.float64)
    return float(-np.sum(logpdf(x, params)))


def _mad(x):
    return float(np.median(np.abs(x - np.median(x))))


def ml_fit(samples, alpha, max_iter=4000):
    """Fit (sigma, kappa) by Nelder-Mead over (ln sigma, ln kappa).

    Starting points are the best ``N_RESTARTS`` cells of the grid
    ``sigma in {0.5, 1, 2} * MAD`` by ``kappa in {0.1, 1}``.
    """
    if alpha not in (1, 2):
        raise ParameterError(f"alpha must be 1 or 2, got {alpha!r}")
    x = np.asarray(getattr(samples, "values", samples), dtype=np.float64).ravel()
    if x.size < MIN_SAMPLES:
        raise InsufficientDataError(f"ML fit needs at least {MIN_SAMPLES} samples, got {x.size}")
    if not np.isfinite(x).all():
        raise ParameterError(f"sample {int(np.flatnonzero(~np.isfinite(x))[0])} is not finite")
    # support check once, up front, so the objective can skip it
    logpdf(x, CoupledParams(alpha=alpha))

    z = np.abs(x)
    zp = z ** alpha

    def objective(theta):
        ls, lk = theta
        s = math.exp(ls)
        k = max(math.exp(lk), KAPPA_FLOOR)
        p = CoupledParams(alpha=alpha, sigma=s, kappa=k)
        lz = _log_norm(p)
        u = zp * (k / s ** alpha)
        val = (1.0 + k) / (alpha * k) * np.sum(np.log1p(u)) + x.size * lz
        return float(val) if np.isfinite(val) else np.inf

    scale = _mad(x) or float(np.mean(z)) or 1.0
    grid = [(math.log(c * scale), math.log(k)) for c in SIGMA_GRID for k in KAPPA_GRID]
    starts = sorted(grid, key=objective)[:N_RESTARTS]

    bounds = [(None, None), (math.log(KAPPA_FLOOR), None)]
    best, iters, used = None, 0, 0
    for theta0 in starts:
        res = optimize.minimize(objective, theta0, method="Nelder-Mead", bounds=bounds,
                                options={"xatol": XATOL, "fatol": FATOL, "maxiter": max_iter,
                                         "maxfev": 2 * max_iter})
        iters += int(res.nit)
        used += 1
        if not np.isfinite(res.fun):
            continue
        if best is None or res.fun < best.fun:
            best = res
    if best is None:
        raise FitError("every ML restart diverged", {"starts": starts, "iterations": iters})

    sigma_hat = math.exp(best.x[0])
    kappa_hat = max(math.exp(best.x[1]), KAPPA_FLOOR)
    diag = FitDiagnostics(nll_at_optimum=float(best.fun), iterations=iters,
                          converged=bool(best.success), restarts_used=used)
    return EstimateResult(sigma_hat=sigma_hat, kappa_hat=kappa_hat, k_selected=0,
                          per_permutation_estimates=[], dispersion_at_k=0.0, method_tag="ML",
                          diagnostics=vars(diag).copy())
