"""Hot numeric loops, each in a numba flavour and a numpy flavour.

The ``*_loop`` functions are written in the numba-compatible subset and are
compiled by :func:`ia_tails._accel.njit`; the ``*_numpy`` functions are the
vectorized (or builtin-RNG) fallbacks used when ``IA_TAILS_BACKEND=numpy``.
Public wrappers at the bottom dispatch on the backend flag.
"""

import math

import numpy as np

from . import _accel
from ._accel import njit

FPMIN = 1e-300
CF_EPS = 1e-16
CF_MAXIT = 20000
TWO_PI = 2.0 * math.pi
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


# --------------------------------------------------------------------------
# log-gamma / log-beta
# --------------------------------------------------------------------------

def _lgamma_diff_py(a, b):
    # ln Gamma(a + b) - ln Gamma(a) without cancellation for large a.
    if a < 50.0:
        return math.lgamma(a + b) - math.lgamma(a)
    s = a + b
    return ((a - 0.5) * math.log1p(b / a) + b * math.log(s) - b
            + 1.0 / (12.0 * s) - 1.0 / (12.0 * a)
            - 1.0 / (360.0 * s ** 3) + 1.0 / (360.0 * a ** 3)
            + 1.0 / (1260.0 * s ** 5) - 1.0 / (1260.0 * a ** 5))


_lgamma_diff = njit(_lgamma_diff_py)


def _log_beta_py(a, b):
    if a < b:
        a, b = b, a
    return math.lgamma(b) - _lgamma_diff(a, b)


_log_beta = njit(_log_beta_py)


def lgamma_diff(a, b):
    """ln Gamma(a + b) - ln Gamma(a) for a, a + b > 0, accurate when a is huge."""
    return _lgamma_diff_py(float(a), float(b))


def log_beta(a, b):
    """ln B(a, b) for positive scalars, stable when one argument is huge."""
    return _log_beta_py(float(a), float(b))


# --------------------------------------------------------------------------
# regularized incomplete beta, continued fraction (modified Lentz)
# --------------------------------------------------------------------------

def _betacf_py(a, b, x):
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < FPMIN:
        d = FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, CF_MAXIT + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if abs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if abs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < CF_EPS:
            return h
    return np.nan


_betacf = njit(_betacf_py)


def _betainc_scalar_py(x, y, a, b):
    # y = 1 - x, supplied separately so callers can keep its low digits
    if x <= 0.0:
        return 0.0
    if y <= 0.0:
        return 1.0
    lfront = a * math.log(x) + b * math.log(y) - _log_beta(a, b)
    if x < (a + 1.0) / (a + b + 2.0):
        return math.exp(lfront) * _betacf(a, b, x) / a
    return 1.0 - math.exp(lfront) * _betacf(b, a, y) / b


_betainc_scalar = njit(_betainc_scalar_py)


@njit
def _betainc_loop(x, y, a, b, out):
    for i in range(x.size):
        out[i] = _betainc_scalar(x[i], y[i], a[i], b[i])
    return out


def _complement(x, y):
    return 1.0 - np.asarray(x, dtype=np.float64) if y is None else y


def betainc_numba(x, a, b, y=None):
    x, y, a, b = (np.array(v, dtype=np.float64).ravel()
                  for v in np.broadcast_arrays(x, _complement(x, y), a, b))
    return _betainc_loop(x, y, a, b, np.empty_like(x))


def _betacf_numpy(a, b, x):
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = np.ones_like(x)
    d = 1.0 - qab * x / qap
    d = np.where(np.abs(d) < FPMIN, FPMIN, d)
    d = 1.0 / d
    h = d.copy()
    active = np.ones(x.shape, dtype=bool)
    for m in range(1, CF_MAXIT + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < FPMIN, FPMIN, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < FPMIN, FPMIN, c)
        d = 1.0 / d
        h = np.where(active, h * d * c, h)
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < FPMIN, FPMIN, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < FPMIN, FPMIN, c)
        d = 1.0 / d
        delta = d * c
        h = np.where(active, h * delta, h)
        active &= np.abs(delta - 1.0) >= CF_EPS
        if not active.any():
            return h
    return np.where(active, np.nan, h)


def betainc_numpy(x, a, b, y=None):
    x, y, a, b = (np.asarray(v, dtype=np.float64).ravel().copy()
                  for v in np.broadcast_arrays(x, _complement(x, y), a, b))
    out = np.empty_like(x)
    lo = x <= 0.0
    hi = (y <= 0.0) & ~lo
    out[lo] = 0.0
    out[hi] = 1.0
    mid = ~(lo | hi)
    if not mid.any():
        return out
    xm, ym, am, bm = x[mid], y[mid], a[mid], b[mid]
    lbeta = np.array([_log_beta_py(p, q) for p, q in zip(am, bm)])
    lfront = am * np.log(xm) + bm * np.log(ym) - lbeta
    direct = xm < (am + 1.0) / (am + bm + 2.0)
    res = np.empty_like(xm)
    if direct.any():
        res[direct] = (np.exp(lfront[direct])
                       * _betacf_numpy(am[direct], bm[direct], xm[direct]) / am[direct])
    swap = ~direct
    if swap.any():
        res[swap] = 1.0 - (np.exp(lfront[swap])
                           * _betacf_numpy(bm[swap], am[swap], ym[swap]) / bm[swap])
    out[mid] = res
    return out


def betainc(x, a, b, y=None):
    """Regularized incomplete beta I(x; a, b), elementwise; NaN where the CF stalls.

    ``y`` optionally gives ``1 - x`` computed without cancellation.
    """
    shape = np.broadcast(np.asarray(x), np.asarray(a), np.asarray(b)).shape
    impl = betainc_numba if _accel.USE_NUMBA else betainc_numpy
    return impl(x, a, b, y).reshape(shape)


# --------------------------------------------------------------------------
# Coherent noise model
#
# Agents are exchangeable, so the state is kept as groups of agents whose
# thresholds are iid Uniform(floor, 1).  A stress eta removes a Binomial share
# of each group with floor < eta and lifts the survivors' floor to eta; a
# random refresh removes a multivariate-hypergeometric share from every group.
# Fresh agents join the floor-0 group.  This reproduces the agent-level
# dynamics in distribution at O(#groups) cost per step.
# --------------------------------------------------------------------------

@njit
def _log_choose(n, k):
    return math.lgamma(n + 1.0) - math.lgamma(k + 1.0) - math.lgamma(n - k + 1.0)


@njit
def _hypergeom(rng, good, bad, draws):
    # Number of "good" items among `draws` taken without replacement.
    lo = max(0, draws - bad)
    hi = min(good, draws)
    if lo == hi:
        return lo
    total = good + bad
    mode = int(math.floor((draws + 1.0) * (good + 1.0) / (total + 2.0)))
    if mode < lo:
        mode = lo
    if mode > hi:
        mode = hi
    pm = math.exp(_log_choose(good, mode) + _log_choose(bad, draws - mode)
                  - _log_choose(total, draws))
    u = rng.random() - pm
    if u <= 0.0:
        return mode
    up = mode
    dn = mode
    pu = pm
    pd = pm
    while up < hi or dn > lo:
        if up < hi:
            pu *= ((good - up) * (draws - up)) / ((up + 1.0) * (bad - draws + up + 1.0))
            up += 1
            u -= pu
            if u <= 0.0:
                return up
        if dn > lo:
            pd *= (dn * (bad - draws + dn)) / ((good - dn + 1.0) * (draws - dn + 1.0))
            dn -= 1
            u -= pd
            if u <= 0.0:
                return dn
    return mode


@njit
def _cnm_groups_loop(rng, n_agents, sigma_stress, f, steps, sizes):
    cap = 256
    floor = np.empty(cap)
    count = np.empty(cap, dtype=np.int64)
    floor[0] = 0.0
    count[0] = n_agents
    ng = 1
    for t in range(steps):
        eta = rng.exponential(sigma_stress)
        size = 0
        lifted = 0
        w = 0
        for j in range(ng):
            m = floor[j]
            c = count[j]
            if m < eta:
                if eta >= 1.0:
                    k = c
                else:
                    k = rng.binomial(c, (eta - m) / (1.0 - m))
                size += k
                lifted += c - k
            else:
                floor[w] = m
                count[w] = c
                w += 1
        ng = w
        if ng + 2 > cap:
            cap *= 2
            nf = np.empty(cap)
            nc = np.empty(cap, dtype=np.int64)
            nf[:ng] = floor[:ng]
            nc[:ng] = count[:ng]
            floor = nf
            count = nc
        if lifted > 0:
            floor[ng] = eta
            count[ng] = lifted
            ng += 1
        if size > 0:
            floor[ng] = 0.0
            count[ng] = size
            ng += 1
        pool = n_agents
        left = f
        for j in range(ng):
            if left == 0:
                break
            c = count[j]
            if j == ng - 1:
                k = left
            else:
                k = _hypergeom(rng, c, pool - c, left)
            count[j] = c - k
            left -= k
            pool -= c
        w = 0
        fresh = f
        for j in range(ng):
            if floor[j] == 0.0:
                fresh += count[j]
            elif count[j] > 0:
                floor[w] = floor[j]
                count[w] = count[j]
                w += 1
        ng = w
        if fresh > 0:
            floor[ng] = 0.0
            count[ng] = fresh
            ng += 1
        sizes[t] = size
    return sizes


def cnm_groups_numba(rng, n_agents, sigma_stress, f, steps):
    sizes = np.empty(steps, dtype=np.int64)
    return _cnm_groups_loop(rng, int(n_agents), float(sigma_stress), int(f), int(steps), sizes)


def cnm_groups_numpy(rng, n_agents, sigma_stress, f, steps):
    sizes = np.empty(steps, dtype=np.int64)
    groups = [[0.0, int(n_agents)]]
    etas = rng.exponential(sigma_stress, size=steps)
    for t in range(steps):
        eta = etas[t]
        size = 0
        lifted = 0
        kept = []
        for m, c in groups:
            if m < eta:
                k = c if eta >= 1.0 else int(rng.binomial(c, (eta - m) / (1.0 - m)))
                size += k
                lifted += c - k
            else:
                kept.append([m, c])
        if lifted:
            kept.append([eta, lifted])
        if size:
            kept.append([0.0, size])
        if f:
            counts = np.array([c for _, c in kept], dtype=np.int64)
            taken = rng.multivariate_hypergeometric(counts, f)
            for g, k in zip(kept, taken):
                g[1] -= int(k)
        fresh = f + sum(c for m, c in kept if m == 0.0)
        groups = [g for g in kept if g[0] != 0.0 and g[1] > 0]
        if fresh:
            groups.append([0.0, fresh])
        sizes[t] = size
    return sizes


def cnm_agents(rng, n_agents, sigma_stress, f, steps):
    """Agent-level reference simulation (explicit thresholds); O(n_agents) per step."""
    thresholds = rng.random(n_agents)
    sizes = np.empty(steps, dtype=np.int64)
    for t in range(steps):
        eta = rng.exponential(sigma_stress)
        hit = thresholds < eta
        k = int(hit.sum())
        thresholds[hit] = rng.random(k)
        sizes[t] = k
        if f:
            idx = rng.choice(n_agents, size=f, replace=False)
            thresholds[idx] = rng.random(f)
    return sizes, thresholds


def cnm_sizes(rng, n_agents, sigma_stress, f, steps):
    impl = cnm_groups_numba if _accel.USE_NUMBA else cnm_groups_numpy
    return impl(rng, n_agents, sigma_stress, f, steps)


# --------------------------------------------------------------------------
# Standard map orbit sums
# --------------------------------------------------------------------------

@njit
def _wrap(v):
    r = v - TWO_PI * math.floor(v / TWO_PI)
    if r >= TWO_PI or r < 0.0:
        r = 0.0
    return r


@njit
def _stdmap_loop(x0, y0, K, transient, length, sums, bounds):
    lo = TWO_PI
    hi = 0.0
    for j in range(x0.size):
        x = x0[j]
        y = y0[j]
        for _ in range(transient):
            y = _wrap(y - K * math.sin(x))
            x = _wrap(x + y)
        s = 0.0
        for _ in range(length):
            y = _wrap(y - K * math.sin(x))
            x = _wrap(x + y)
            s += x
            lo = min(lo, x, y)
            hi = max(hi, x, y)
        sums[j] = s
    bounds[0] = lo
    bounds[1] = hi
    return sums


def stdmap_sums_numba(x0, y0, K, transient, length):
    sums = np.empty(x0.size)
    bounds = np.empty(2)
    _stdmap_loop(np.array(x0, dtype=np.float64),
                 np.array(y0, dtype=np.float64),
                 float(K), int(transient), int(length), sums, bounds)
    return sums, (bounds[0], bounds[1])


def stdmap_sums_numpy(x0, y0, K, transient, length):
    x = np.array(x0, dtype=np.float64)
    y = np.array(y0, dtype=np.float64)
    for _ in range(transient):
        y = np.mod(y - K * np.sin(x), TWO_PI)
        x = np.mod(x + y, TWO_PI)
    sums = np.zeros_like(x)
    lo, hi = TWO_PI, 0.0
    for _ in range(length):
        y = np.mod(y - K * np.sin(x), TWO_PI)
        x = np.mod(x + y, TWO_PI)
        sums += x
        lo = min(lo, x.min(), y.min())
        hi = max(hi, x.max(), y.max())
    return sums, (lo, hi)


def stdmap_sums(x0, y0, K, transient, length):
    impl = stdmap_sums_numba if _accel.USE_NUMBA else stdmap_sums_numpy
    return impl(x0, y0, K, transient, length)
