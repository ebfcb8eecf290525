"""Monte Carlo comparison of estimators over a grid of couplings.

Each (kappa, trial) cell owns its random streams, so the table does not
depend on how cells are scheduled over worker threads.
"""

from concurrent.futures import ThreadPoolExecutor
import math
import os

import numpy as np

from .dist import CoupledParams
from .errors import IATailsError, NumericError
from .ia import ia_fit
from .metrics import TrialReport, avg_deviation, cvm, mse_report, nll_metric
from .mle import ml_fit
from .sampler import RandomStream, sample_coupled

METHODS = ("IA_GM", "IA", "ML")
DATA_STREAM = 0
FIT_STREAM = 1


def worker_count():
    """Pool size from ``IA_TAILS_THREADS``; default is the CPU count."""
    env = os.environ.get("IA_TAILS_THREADS", "").strip()
    if env:
        n = int(env)
        if n < 1:
            raise ValueError(f"IA_TAILS_THREADS must be >= 1, got {env!r}")
        return n
    return os.cpu_count() or 1


def fit(method, samples, alpha, rs):
    if method == "ML":
        return ml_fit(samples, alpha)
    return ia_fit(samples, alpha, method, rs=rs)


def run_trial(alpha, sigma, kappa, n, methods, seed, kappa_index, trial):
    """Fit every method to one synthetic data set.

    Returns ``{method: (sigma_hat, kappa_hat, ad, cvm, nll)}``; failed fits map to ``None``.
    """
    p = CoupledParams(alpha=alpha, sigma=sigma, kappa=kappa)
    path = (kappa_index, trial)
    x = sample_coupled(n, p, RandomStream(seed, DATA_STREAM, path)).values
    out = {}
    for method in methods:
        try:
            r = fit(method, x, alpha, RandomStream(seed, FIT_STREAM, path))
            q = CoupledParams(alpha=alpha, sigma=r.sigma_hat, kappa=r.kappa_hat)
            out[method] = (r.sigma_hat, r.kappa_hat, avg_deviation(x, q), cvm(x, q),
                           nll_metric(x, q))
        except (IATailsError, NumericError, ValueError, ArithmeticError):
            out[method] = None
    return out


def summarize(method, kappa, sigma, n, rows):
    ok = [r for r in rows if r is not None]
    failures = len(rows) - len(ok)
    if not ok:
        nan = math.nan
        return TrialReport(method, kappa, sigma, nan, nan, nan, nan, nan, nan, nan, 0, n, failures)
    a = np.array(ok, dtype=np.float64)
    mk, sk = mse_report(a[:, 1], kappa)
    ms, ss = mse_report(a[:, 0], sigma)
    return TrialReport(method, kappa, sigma, mk, sk, ms, ss, float(a[:, 2].mean()),
                       float(a[:, 3].mean()), float(a[:, 4].mean()), len(ok), n, failures)


def mc_study(alpha, kappas, sigma=0.5, n=10_000, trials=100, methods=METHODS, seed=0,
             workers=None):
    """One :class:`TrialReport` per (kappa, method), kappa-major order."""
    methods = tuple(methods)
    cells = [(ki, t) for ki in range(len(kappas)) for t in range(trials)]

    def task(cell):
        ki, t = cell
        return run_trial(alpha, sigma, kappas[ki], n, methods, seed, ki, t)

    workers = workers or worker_count()
    if workers == 1:
        results = [task(c) for c in cells]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(task, cells))

    reports = []
    for ki, kappa in enumerate(kappas):
        block = results[ki * trials:(ki + 1) * trials]
        for m in methods:
            reports.append(summarize(m, kappa, sigma, n, [b[m] for b in block]))
    return reports
