"""Goodness-of-fit battery: MSE over trials, average quantile deviation, CvM, NLL."""

from dataclasses import dataclass, asdict

import numpy as np

from . import dist
from .mle import nll


@dataclass
class TrialReport:
    method_tag: str
    kappa_true: float
    sigma_true: float
    mse_kappa: float
    sd_kappa: float
    mse_sigma: float
    sd_sigma: float
    ad: float
    cvm: float
    nll: float
    trials: int
    n_per_trial: int
    failures: int = 0

    def as_dict(self):
        return asdict(self)


def mse_report(estimates, truth):
    """(mean squared error, sample SD of the squared errors; 0 for one trial)."""
    e = np.asarray(estimates, dtype=np.float64)
    if not e.size:
        raise ValueError("mse_report needs at least one estimate")
    sq = (e - truth) ** 2
    return float(sq.mean()), float(sq.std(ddof=1)) if sq.size > 1 else 0.0


def _sorted(samples):
    x = np.asarray(getattr(samples, "values", samples), dtype=np.float64).ravel()
    if not x.size:
        raise ValueError("metric needs at least one sample")
    return np.sort(x)


def cvm(samples, fitted):
    """Cramer-von Mises W^2 = 1/(12n) + sum (F(x_(i)) - (2i-1)/(2n))^2."""
    x = _sorted(samples)
    n = x.size
    u = np.asarray(dist.cdf(x, fitted), dtype=np.float64)
    ref = (2.0 * np.arange(1, n + 1) - 1.0) / (2.0 * n)
    return float(1.0 / (12.0 * n) + np.sum((u - ref) ** 2))


def avg_deviation(samples, fitted):
    """Mean |x_(i) - Q((i - 0.5)/n)|: the average Q-Q deviation."""
    x = _sorted(samples)
    n = x.size
    q = np.asarray(dist.quantile((np.arange(1, n + 1) - 0.5) / n, fitted), dtype=np.float64)
    return float(np.mean(np.abs(x - q)))


def nll_metric(samples, fitted):
    return nll(fitted, samples)
