"""Independent Approximates: near-equal tuples as draws from a power density.

Samples are randomly partitioned into n-tuples, the tuples are ranked by
their spread ``max - min``, and the medians of the ``k`` tightest tuples
stand in for independent draws from ``f**n / int f**n``.  The subsample
count ``k`` is chosen where the estimate is most stable across random
permutations.
"""

from dataclasses import dataclass, field, replace
import math

import numpy as np

from . import moments
from .errors import InsufficientDataError, InversionError, ParameterError
from .sampler import RandomStream, SampleSet, sample_power_density
from .dist import CoupledParams

# moment order of the selection statistic for each tuple size
STAT_ORDER = {2: 1, 3: 2, 5: 4}
STAT_NAMES = {2: "pair_mean", 3: "triplet_m2", 5: "quint_m4"}
METHODS = ("IA", "IA_GM")


@dataclass(frozen=True)
class IAConfig:
    """Settings of the subsample-count search.

    ``k_max=None`` caps the search at ``ceil(k_max_fraction * floor(N/n))``
    tuples.  Using every tuple is degenerate: the full-set statistic is
    nearly permutation invariant, so its dispersion collapses while the
    tolerance grows far beyond the density scale.
    """

    tuple_size: int = 2
    permutations: int = 25
    k_min: int = 10
    k_step: int = 1
    k_max: int | None = None
    k_max_fraction: float = 0.02
    dispersion: str = "lad"
    aggregator: str = "median"

    def __post_init__(self):
        if self.tuple_size not in STAT_ORDER:
            raise ParameterError(f"tuple_size must be one of {sorted(STAT_ORDER)}, got {self.tuple_size!r}")
        if self.permutations < 1:
            raise ParameterError("permutations must be >= 1")
        if self.k_min < 2:
            raise ParameterError("k_min must be >= 2")
        if self.k_step < 1:
            raise ParameterError("k_step must be >= 1")
        if self.k_max is not None and self.k_max < self.k_min:
            raise ParameterError(f"k_max ({self.k_max}) is below k_min ({self.k_min})")
        if not 0.0 < self.k_max_fraction <= 1.0:
            raise ParameterError("k_max_fraction must lie in (0, 1]")
        if self.dispersion not in ("lad", "sd"):
            raise ParameterError(f"dispersion must be 'lad' or 'sd', got {self.dispersion!r}")
        if self.aggregator != "median":
            raise ParameterError("only the median aggregator is supported")

    @property
    def selection_stat(self):
        return STAT_NAMES[self.tuple_size]

    def candidate_ks(self, n_samples):
        n_tuples = n_samples // self.tuple_size
        cap = self.k_max
        if cap is None:
            cap = max(self.k_min, math.ceil(self.k_max_fraction * n_tuples))
        cap = min(cap, n_tuples)
        if cap < self.k_min:
            raise InsufficientDataError(
                f"{n_samples} samples give {n_tuples} tuples of size {self.tuple_size}; "
                f"at least k_min={self.k_min} are needed")
        return np.arange(self.k_min, cap + 1, self.k_step)


@dataclass
class EstimateResult:
    sigma_hat: float
    kappa_hat: float
    k_selected: int
    per_permutation_estimates: list
    dispersion_at_k: float
    method_tag: str
    diagnostics: dict = field(default_factory=dict)


@dataclass
class Selection:
    """Outcome of the k search for one tuple size."""

    k: int
    estimates: np.ndarray       # (P,) estimate at k for each permutation
    stats: np.ndarray           # (P,) raw statistic at k
    ks: np.ndarray
    dispersion: np.ndarray      # dispersion at each candidate k
    epsilon: float              # median over permutations of the k-th spread


def _values(samples):
    x = np.asarray(samples.values if isinstance(samples, SampleSet) else samples, dtype=np.float64)
    return x.ravel()


def partition_tuples(samples, n, rs):
    """Split a uniform random permutation of the samples into ``floor(N/n)`` n-tuples.

    Returns an ``(N // n, n)`` array; the ``N mod n`` leftover samples are dropped.
    """
    x = _values(samples)
    if n < 1 or x.size < n:
        raise InsufficientDataError(f"need at least {n} samples to form a tuple, got {x.size}")
    m = x.size // n
    perm = rs.generator().permutation(x.size)
    return x[perm[:m * n]].reshape(m, n)


def tuple_spread(t):
    t = np.asarray(t, dtype=np.float64)
    return np.ptp(t, axis=-1)


def _ranked_medians(tuples):
    spread = tuple_spread(tuples)
    order = np.argsort(spread, kind="stable")
    # for pairs the median is the midpoint
    return np.median(tuples[order], axis=1), spread[order]


def ia_medians(tuples, k):
    """Medians of the ``k`` tuples with the smallest spread."""
    tuples = np.asarray(tuples, dtype=np.float64)
    if tuples.ndim != 2:
        raise ParameterError("tuples must be a 2-d array (count, size)")
    if not 1 <= k <= tuples.shape[0]:
        raise InsufficientDataError(f"k={k} outside 1..{tuples.shape[0]} available tuples")
    med, _ = _ranked_medians(tuples)
    return SampleSet(med[:k], {"generator": "ia_medians", "k": int(k), "tuple_size": tuples.shape[1]})


def dispersion(estimates, kind="lad", axis=0):
    """Spread of per-permutation estimates: mean |e - median| or the SD."""
    e = np.asarray(estimates, dtype=np.float64)
    if kind == "sd":
        return np.std(e, axis=axis)
    return np.mean(np.abs(e - np.median(e, axis=axis, keepdims=True)), axis=axis)


def argmin_k(ks, disp):
    """First (smallest) k attaining the minimum dispersion.  NaNs never win."""
    d = np.asarray(disp, dtype=np.float64)
    if not np.isfinite(d).any():
        raise InsufficientDataError("no candidate k gave a finite dispersion")
    i = int(np.nanargmin(np.where(np.isfinite(d), d, np.nan)))
    return int(ks[i]), i


def _stat_curves(x, cfg, ks, rs):
    """Per-permutation running statistic ``mean(median**m)`` over the top-k tuples."""
    order = STAT_ORDER[cfg.tuple_size]
    kmax = int(ks[-1])
    curves = np.empty((cfg.permutations, ks.size))
    eps = np.empty((cfg.permutations, ks.size))
    counts = np.arange(1, kmax + 1)
    for p in range(cfg.permutations):
        med, spread = _ranked_medians(partition_tuples(x, cfg.tuple_size, rs.child(p)))
        running = np.cumsum(med[:kmax] ** order) / counts
        curves[p] = running[ks - 1]
        eps[p] = spread[ks - 1]
    return curves, eps


def select_optimal_k(samples, cfg, estimator=None, rs=None):
    """Search k in ``cfg.candidate_ks`` for the least dispersed estimate.

    ``estimator`` maps an array of statistic values to estimates (default:
    identity).  Ties go to the smallest k.
    """
    x = _values(samples)
    rs = rs if rs is not None else RandomStream(0)
    ks = cfg.candidate_ks(x.size)
    curves, eps = _stat_curves(x, cfg, ks, rs)
    est = curves if estimator is None else np.asarray(estimator(curves), dtype=np.float64)
    disp = dispersion(est, cfg.dispersion, axis=0)
    k, i = argmin_k(ks, disp)
    return Selection(k=k, estimates=est[:, i].copy(), stats=curves[:, i].copy(), ks=ks,
                     dispersion=disp, epsilon=float(np.median(eps[:, i])))


def _clamp_kappa(kappa, diag):
    if kappa < 0.0:
        diag["kappa_clamped"] = True
        diag["kappa_raw"] = float(kappa)
        return 0.0
    diag["kappa_clamped"] = False
    return float(kappa)


def _log_mean(x, diag):
    pos = x[x > 0]
    diag["zeros_excluded"] = int(x.size - pos.size)
    if not pos.size:
        raise InsufficientDataError("log-average needs at least one nonzero sample")
    return float(np.mean(np.log(pos)))


def ia_fit(samples, alpha, method="IA_GM", cfg=None, rs=None):
    """Fit (sigma, kappa) with location fixed at zero.

    alpha=1 takes sigma from the pair mean; alpha=2 folds the data to |x| and
    takes sigma from the triplet second moment.  kappa comes from the
    log-average of all samples (IA_GM) or a higher power-moment (IA: triplet
    second moment for alpha=1, quintuplet fourth moment for alpha=2).
    """
    if alpha not in (1, 2):
        raise ParameterError(f"alpha must be 1 or 2, got {alpha!r}")
    if method not in METHODS:
        raise ParameterError(f"method must be one of {METHODS}, got {method!r}")
    cfg = cfg or IAConfig()
    rs = rs if rs is not None else RandomStream(0)
    x = _values(samples)
    if not np.isfinite(x).all():
        bad = int(np.flatnonzero(~np.isfinite(x))[0])
        raise ParameterError(f"sample {bad} is not finite")
    if alpha == 1 and (x < 0).any():
        raise ParameterError("coupled exponential fit needs nonnegative samples")
    if alpha == 2:
        x = np.abs(x)

    def stage(n, estimator=None):
        return select_optimal_k(x, replace(cfg, tuple_size=n), estimator, rs.child(n))

    diag = {"n_samples": int(x.size), "permutations": cfg.permutations}
    if alpha == 1:
        scale = stage(2, lambda s: 2.0 * s)
    else:
        scale = stage(3, lambda s: np.sqrt(3.0 * s))
    sig = scale.estimates
    sigma_hat = float(np.median(sig))
    diag.update(scale_stat=STAT_NAMES[2 if alpha == 1 else 3], scale_k=scale.k,
                scale_epsilon=scale.epsilon)

    if method == "IA_GM":
        target = _log_mean(x, diag)
        diag["log_mean"] = target
        kappa = moments.solve_kappa_from_log_mean(target, sigma_hat, alpha,
                                                  two_sided=(alpha == 2))
    elif alpha == 1:
        shape = stage(3)
        with np.errstate(divide="ignore"):
            kap = 2.0 * sig ** 2 / (3.0 * shape.stats) - 3.0
        diag.update(shape_stat="triplet_m2", shape_k=shape.k, shape_epsilon=shape.epsilon,
                    kappa_per_permutation=kap.tolist(), shape_dispersion=float(shape.dispersion.min()))
        kappa = float(np.median(kap))
        if kappa <= -1.0:
            raise InversionError(f"moment inversion gave kappa = {kappa:.6g} <= -1",
                                 {"sigma_hat": sigma_hat, "kappa_hat": kappa, **diag})
    else:
        shape = stage(5)
        kap = (3.0 * sig ** 4 / shape.stats - 25.0) / 10.0
        diag.update(shape_stat="quint_m4", shape_k=shape.k, shape_epsilon=shape.epsilon,
                    kappa_per_permutation=kap.tolist(), shape_dispersion=float(shape.dispersion.min()))
        kappa = float(np.median(kap))
    kappa = _clamp_kappa(kappa, diag)

    return EstimateResult(sigma_hat=sigma_hat, kappa_hat=kappa, k_selected=scale.k,
                          per_permutation_estimates=sig.tolist(),
                          dispersion_at_k=float(scale.dispersion[scale.ks == scale.k][0]),
                          method_tag=method, diagnostics=diag)


@dataclass
class ConsistencyCurve:
    counts: np.ndarray
    var_sigma: np.ndarray
    var_kappa: np.ndarray
    kappa_bias: np.ndarray
    slope_sigma: float
    slope_kappa: float


def lemma2_consistency_probe(sigma, kappa, counts, trials, rs=None):
    """Variance decay of the independent-equals estimators with the count I.

    Pairs and triplets are drawn exactly from the 2nd and 3rd power densities;
    ``sigma_hat = 2 mean`` and ``kappa_hat`` from the triplet second moment.
    """
    counts = np.asarray(counts, dtype=np.int64)
    if counts.ndim != 1 or counts.size < 2 or (np.diff(counts) <= 0).any():
        raise ParameterError("counts must be an ascending sequence of at least two sizes")
    rs = rs if rs is not None else RandomStream(0)
    p = CoupledParams(alpha=1, sigma=sigma, kappa=kappa)
    var_s, var_k, bias_k = [], [], []
    for ci, count in enumerate(counts):
        s_hat = np.empty(trials)
        k_hat = np.empty(trials)
        for t in range(trials):
            trs = rs.child(ci).child(t)
            pairs = sample_power_density(int(count), p, 2, trs.child(2)).values
            trips = sample_power_density(int(count), p, 3, trs.child(3)).values
            s_hat[t] = 2.0 * pairs.mean()
            k_hat[t] = 2.0 * s_hat[t] ** 2 / (3.0 * np.mean(trips ** 2)) - 3.0
        var_s.append(s_hat.var(ddof=1))
        var_k.append(k_hat.var(ddof=1))
        bias_k.append(k_hat.mean() - kappa)
    lc = np.log(counts.astype(float))
    slope_s = float(np.polyfit(lc, np.log(var_s), 1)[0])
    slope_k = float(np.polyfit(lc, np.log(var_k), 1)[0])
    return ConsistencyCurve(counts, np.array(var_s), np.array(var_k), np.array(bias_k),
                            slope_s, slope_k)
