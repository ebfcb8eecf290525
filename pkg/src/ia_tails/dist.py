"""The coupled distribution family: densities, distribution functions and identities.

``alpha = 1`` is the coupled exponential (generalized Pareto) and ``alpha = 2``
the coupled Gaussian (Student's t with ``nu = 1 / kappa``).  Only the
heavy-tailed side ``kappa >= 0`` is supported.
"""

from dataclasses import dataclass, replace
import math

import numpy as np
from scipy import integrate, special

from . import kernels
from .errors import DomainError, NumericError, ParameterError
from .quadrature import integrate_support

KAPPA_ZERO = 1e-12
# below this coupling the alpha=2 tail comes from scipy's Student t routines
STUDENT_T_KAPPA = 1e-5
_BISECT_ITERS = 64
_LOG_TINY = -745.0


@dataclass(frozen=True)
class CoupledParams:
    """Parameters of one coupled distribution.

    ``two_sided`` defaults to ``False`` for ``alpha=1`` and ``True`` for
    ``alpha=2`` when left as ``None``.
    """

    alpha: int = 1
    mu: float = 0.0
    sigma: float = 1.0
    kappa: float = 0.0
    two_sided: bool = None

    def __post_init__(self):
        if self.alpha not in (1, 2):
            raise ParameterError(f"alpha must be 1 or 2, got {self.alpha!r}")
        if not (np.isfinite(self.sigma) and self.sigma > 0):
            raise ParameterError(f"sigma must be > 0, got {self.sigma!r}")
        if not (np.isfinite(self.kappa) and self.kappa >= 0):
            raise ParameterError(f"kappa must be >= 0, got {self.kappa!r}")
        if not np.isfinite(self.mu):
            raise ParameterError(f"mu must be finite, got {self.mu!r}")
        if self.two_sided is None:
            object.__setattr__(self, "two_sided", self.alpha == 2)
        for name in ("mu", "sigma", "kappa"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @property
    def is_limit(self):
        """True when the kappa -> 0 (exponential / Gaussian) branch applies."""
        return self.kappa < KAPPA_ZERO

    def replace(self, **changes):
        return replace(self, **changes)


@dataclass(frozen=True)
class QBetaParams:
    q: float
    beta: float


# --------------------------------------------------------------------------
# normalization
# --------------------------------------------------------------------------

def log_partition_function(sigma, kappa, alpha):
    if not sigma > 0 or not kappa >= 0 or alpha not in (1, 2):
        raise ParameterError(f"invalid (sigma, kappa, alpha) = ({sigma}, {kappa}, {alpha})")
    if alpha == 1:
        return math.log(sigma)
    if kappa < KAPPA_ZERO:
        return math.log(sigma) + 0.5 * math.log(2.0 * math.pi)
    return math.log(sigma) + kernels.log_beta(0.5 / kappa, 0.5) - 0.5 * math.log(kappa)


def partition_function(sigma, kappa, alpha):
    """Normalizer Z: ``sigma`` for alpha=1, ``sigma B(1/2k, 1/2)/sqrt(k)`` for alpha=2.

    For alpha=1 this normalizes the one-sided density, for alpha=2 the
    two-sided one.
    """
    return math.exp(log_partition_function(sigma, kappa, alpha))


def _log_norm(p):
    # One-sided alpha=1 and two-sided alpha=2 use Z as is; the other
    # orientations double or halve the mass.
    lz = log_partition_function(p.sigma, p.kappa, p.alpha)
    if p.alpha == 1 and p.two_sided:
        lz += math.log(2.0)
    elif p.alpha == 2 and not p.two_sided:
        lz -= math.log(2.0)
    return lz


def _check_support(x, p):
    if not p.two_sided:
        bad = np.flatnonzero(x < p.mu)
        if bad.size:
            i = int(bad[0])
            raise DomainError(f"x[{i}] = {x.flat[i]!r} lies below the location {p.mu}", index=i)


def _scalar_or_array(values, like):
    return float(np.asarray(values).item()) if np.ndim(like) == 0 else values


# --------------------------------------------------------------------------
# density, distribution, quantile
# --------------------------------------------------------------------------

def logpdf(x, p):
    xa = np.asarray(x, dtype=float)
    _check_support(xa, p)
    z = np.abs(xa - p.mu) / p.sigma
    lz = _log_norm(p)
    if p.is_limit:
        out = -(z ** p.alpha) / p.alpha - lz
    else:
        out = -(1.0 + p.kappa) / (p.alpha * p.kappa) * np.log1p(p.kappa * z ** p.alpha) - lz
    return _scalar_or_array(out, x)


def scalar_pdf(p):
    """Plain-float density callable for quadrature loops (no support check)."""
    mu, s, k, a = p.mu, p.sigma, p.kappa, p.alpha
    lz = _log_norm(p)
    if p.is_limit:
        return lambda x: math.exp(-(abs(x - mu) / s) ** a / a - lz)
    c = (1.0 + k) / (a * k)
    return lambda x: math.exp(-c * math.log1p(k * (abs(x - mu) / s) ** a) - lz)


def pdf(x, p):
    """Coupled density at ``x``.

    Raises :class:`DomainError` for points left of ``mu`` on one-sided support.
    """
    return _scalar_or_array(np.exp(logpdf(x, p)), x)


def cdf(x, p):
    xa = np.asarray(x, dtype=float)
    _check_support(xa, p)
    z = np.abs(xa - p.mu) / p.sigma
    left = xa <= p.mu
    a, k = p.alpha, p.kappa
    if p.is_limit:
        if a == 1:
            tail = np.exp(-z)
            out = np.where(left, 0.5 * tail, 1.0 - 0.5 * tail) if p.two_sided else -np.expm1(-z)
        else:
            out = special.ndtr(np.where(left, -z, z)) if p.two_sided else special.erf(z / math.sqrt(2))
        return _scalar_or_array(out, x)
    t = k * z ** a
    # exceedance P(|X - mu| > |x - mu|) of the two-sided law
    if a == 1:
        exceed = np.exp(-np.log1p(t) / k)
    elif k < STUDENT_T_KAPPA:
        # the continued fraction is ill-conditioned for a = 1/(2k) this large
        exceed = 2.0 * special.stdtr(1.0 / k, -z)
    else:
        exceed = kernels.betainc(1.0 / (1.0 + t), 0.5 / k, 0.5, y=t / (1.0 + t))
    if p.two_sided:
        out = np.where(left, 0.5 * exceed, 1.0 - 0.5 * exceed)
    elif a == 1:
        out = -np.expm1(-np.log1p(t) / k)
    else:
        out = 1.0 - exceed
    if np.isnan(out).any():
        raise NumericError("incomplete beta continued fraction did not converge",
                           {"kappa": k, "alpha": a})
    return _scalar_or_array(out, x)


def _invert_betainc(target, a, b):
    """Solve I(v; a, b) = target for v in (0, 1] by bisection on ln v."""
    lo = np.full(target.shape, _LOG_TINY)
    hi = np.zeros(target.shape)
    floor = kernels.betainc(np.exp(lo), a, b)
    if np.any((target < floor) & (target > 0.0)):
        raise NumericError("quantile root bracket failed: probability too close to the boundary",
                           {"min_target": float(target.min())})
    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        below = kernels.betainc(np.exp(mid), a, b) < target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return np.where(target > 0.0, np.exp(0.5 * (lo + hi)), 0.0)


def _alpha2_abs_z(tail_mass, p):
    # |z| whose two-sided exceedance probability P(|Z| > |z|) equals tail_mass.
    k = p.kappa
    if k < STUDENT_T_KAPPA:
        return -special.stdtrit(1.0 / k, 0.5 * tail_mass)
    b = 0.5 / k
    z = np.empty(tail_mass.shape)
    far = tail_mass < 0.5
    if far.any():
        v = _invert_betainc(tail_mass[far], b, 0.5)
        z[far] = np.sqrt((1.0 - v) / (k * v))
    near = ~far
    if near.any():
        w = _invert_betainc(1.0 - tail_mass[near], 0.5, b)
        z[near] = np.sqrt(w / (k * (1.0 - w)))
    return z


def quantile(prob, p):
    """Inverse of :func:`cdf`; closed form except for alpha=2 with kappa > 0."""
    pa = np.asarray(prob, dtype=float)
    if np.any(~((pa > 0.0) & (pa < 1.0))):
        raise DomainError("probabilities must lie strictly inside (0, 1)")
    k, a = p.kappa, p.alpha
    if not p.two_sided:
        if a == 1:
            z = -np.log1p(-pa) if p.is_limit else np.expm1(-k * np.log1p(-pa)) / k
        elif p.is_limit:
            z = math.sqrt(2.0) * special.erfinv(pa)
        else:
            z = _alpha2_abs_z(np.atleast_1d(1.0 - pa), p).reshape(pa.shape)
        return _scalar_or_array(p.mu + p.sigma * z, prob)
    side = np.where(pa < 0.5, -1.0, 1.0)
    one_tail = np.minimum(pa, 1.0 - pa)
    if a == 1:
        z = -np.log(2.0 * one_tail) if p.is_limit else np.expm1(-k * np.log(2.0 * one_tail)) / k
    elif p.is_limit:
        z = -special.ndtri(one_tail)
    else:
        z = _alpha2_abs_z(np.atleast_1d(2.0 * one_tail), p).reshape(pa.shape)
    return _scalar_or_array(p.mu + side * p.sigma * z, prob)


# --------------------------------------------------------------------------
# parameter translations
# --------------------------------------------------------------------------

def to_q_beta(p):
    q = 1.0 + p.alpha * p.kappa / (1.0 + p.kappa)
    beta = (1.0 + p.kappa) / (p.alpha * p.sigma ** p.alpha)
    return QBetaParams(q=q, beta=beta)


def from_q_beta(q, beta, alpha, mu=0.0, two_sided=None):
    if alpha not in (1, 2):
        raise ParameterError(f"alpha must be 1 or 2, got {alpha!r}")
    if not (1.0 <= q < 1.0 + alpha):
        raise DomainError(f"q must lie in [1, {1 + alpha}), got {q!r}")
    if not beta > 0:
        raise ParameterError(f"beta must be > 0, got {beta!r}")
    kappa = (q - 1.0) / (alpha - q + 1.0)
    sigma = ((1.0 + kappa) / (alpha * beta)) ** (1.0 / alpha)
    return CoupledParams(alpha=alpha, mu=mu, sigma=sigma, kappa=kappa, two_sided=two_sided)


def power_density_params(p, n):
    """Parameters of ``f**n / integral(f**n)``, which stays in the family."""
    if int(n) != n or n < 1:
        raise DomainError(f"power n must be an integer >= 1, got {n!r}")
    d = n + (n - 1) * p.kappa
    sigma = p.sigma / d if p.alpha == 1 else p.sigma / math.sqrt(d)
    return p.replace(sigma=sigma, kappa=p.kappa / d)


# --------------------------------------------------------------------------
# log-log geometry
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class LogLogLandmarks:
    """Characteristic abscissae (distance from ``mu``) of the density's shape.

    ``inflection_x`` and ``derivative_inflection_x`` are ``None`` for
    alpha=1; ``half_slope_x`` and ``asymptotic_slope`` are ``None`` at
    kappa=0, where the log-log slope has no finite asymptote.
    """

    inflection_x: float
    derivative_inflection_x: float
    half_slope_x: float
    unit_slope_x: float
    asymptotic_slope: float


def loglog_landmarks(p):
    s, k = p.sigma, p.kappa
    if p.alpha == 2:
        infl = s / math.sqrt(1.0 + 2.0 * k)
        dinfl = s * math.sqrt(3.0) / math.sqrt(1.0 + 2.0 * k)
    else:
        infl = dinfl = None
    if p.is_limit:
        half = slope = None
    else:
        half = s * k ** (-1.0 / p.alpha)
        slope = -(1.0 + k) / k
    return LogLogLandmarks(infl, dinfl, half, s, slope)


def loglog_slope(x, p):
    """Analytic d ln f / d ln x at distance ``x - mu > 0``."""
    z = np.abs(np.asarray(x, dtype=float) - p.mu) / p.sigma
    za = z ** p.alpha
    if p.is_limit:
        return -za
    return -(1.0 + p.kappa) * za / (1.0 + p.kappa * za)


# --------------------------------------------------------------------------
# identities checked by quadrature
# --------------------------------------------------------------------------

def superstatistics_mixture_pdf(x, p, variant="B", C=1.0):
    """Gamma mixture of exponentials over the inverse scale, by quadrature.

    The inverse scale ``1/sigma'`` is Gamma distributed with shape ``1/kappa``
    and mean ``1/sigma``.  Variant ``"B"`` mixes normalized exponential
    densities and reproduces the coupled exponential exactly; variant ``"A"``
    mixes bare Boltzmann factors and returns ``C * (1 + kappa x/sigma)**(-1/kappa)``.
    """
    if p.alpha != 1 or p.is_limit:
        raise ParameterError("superstatistics mixture needs alpha=1 and kappa > 0")
    if variant not in ("A", "B"):
        raise ParameterError(f"variant must be 'A' or 'B', got {variant!r}")
    xs = np.atleast_1d(np.asarray(x, dtype=float)) - p.mu
    if np.any(xs < 0):
        raise DomainError("superstatistics mixture is defined for x >= mu")
    shape = 1.0 / p.kappa
    rate = p.sigma / p.kappa
    lconst = shape * math.log(rate) - math.lgamma(shape)
    extra = 1.0 if variant == "B" else 0.0
    split = 1.0 / p.sigma
    out = np.empty(xs.shape)
    for i, xv in enumerate(xs):
        def smooth(lam):
            return math.exp(lconst - (rate + xv) * lam) * lam ** extra

        def full(lam):
            return math.exp(lconst + (shape - 1.0 + extra) * math.log(lam) - (rate + xv) * lam)

        with np.errstate(all="ignore"):
            head, e1 = integrate.quad(smooth, 0.0, split, weight="alg", wvar=(shape - 1.0, 0.0),
                                      epsabs=1e-14, epsrel=1e-13, limit=200)
            tail, e2 = integrate.quad(full, split, np.inf, epsabs=1e-14, epsrel=1e-13, limit=200)
        if e1 + e2 > 1e-9:
            raise NumericError("superstatistics quadrature did not converge",
                               {"abserr": e1 + e2, "x": float(xv)})
        out[i] = head + tail
    out *= C if variant == "A" else 1.0
    return _scalar_or_array(out, x)


@dataclass(frozen=True)
class DensityMeanCheck:
    lhs: float
    rhs: float


def generalized_mean_density_check(p):
    """Density at the scale versus the generalized mean of the density."""
    if p.is_limit:
        raise ParameterError("generalized-mean identity needs kappa > 0")
    q = 1.0 + p.alpha * p.kappa / (1.0 + p.kappa)
    lz = _log_norm(p)
    c = (1.0 + p.kappa) / (p.alpha * p.kappa)

    def fq(xv):
        z = abs(xv - p.mu) / p.sigma
        return math.exp(q * (-c * math.log1p(p.kappa * z ** p.alpha) - lz))

    integral = integrate_support(fq, p, epsabs=1e-13, epsrel=1e-13)
    lhs = pdf(p.mu + p.sigma, p)
    return DensityMeanCheck(lhs=lhs, rhs=integral ** c)
