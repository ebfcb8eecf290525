"""Exact random variates for the coupled family and its power densities.

Randomness comes from :class:`RandomStream` values: a Philox counter-based
generator keyed by ``(seed, stream_id, path)``.  Any task can rebuild its own
generator from the key, so results do not depend on scheduling.
"""

from dataclasses import dataclass, field

import numpy as np

from .dist import CoupledParams, power_density_params
from .errors import ParameterError, SampleParseError

_U64 = 1 << 64


@dataclass(frozen=True)
class RandomStream:
    seed: int
    stream_id: int = 0
    path: tuple = ()

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            v = getattr(self, name)
            if int(v) != v or not 0 <= v < _U64:
                raise ParameterError(f"{name} must be an unsigned 64-bit integer, got {v!r}")

    def generator(self):
        ss = np.random.SeedSequence(entropy=int(self.seed),
                                    spawn_key=(int(self.stream_id),) + tuple(self.path))
        return np.random.Generator(np.random.Philox(ss))

    def child(self, index):
        """Independent sub-stream, e.g. one per permutation inside a trial."""
        return RandomStream(self.seed, self.stream_id, self.path + (int(index),))


@dataclass
class SampleSet:
    """Sample vector plus a record of how it was produced."""

    values: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64).ravel()

    def __len__(self):
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def to_text(self):
        # repr() of a Python float is the shortest string that round-trips.
        if not self.values.size:
            return ""
        return "\n".join(repr(v) for v in self.values.tolist()) + "\n"

    @classmethod
    def from_text(cls, text, provenance=None):
        values = []
        for lineno, line in enumerate(text.split("\n"), start=1):
            s = line.strip()
            if not s:
                continue
            try:
                values.append(float(s))
            except ValueError:
                raise SampleParseError(f"line {lineno}: cannot parse {s!r} as a number",
                                       lineno=lineno) from None
        return cls(np.array(values, dtype=np.float64), dict(provenance or {}))


def _check_count(n):
    if int(n) != n or n < 1:
        raise ParameterError(f"sample count must be a positive integer, got {n!r}")
    return int(n)


def _draw_coupled(rng, n, p):
    if p.alpha == 1:
        u = rng.random(n)
        if p.is_limit:
            z = -np.log1p(-u)
        else:
            z = np.expm1(-p.kappa * np.log1p(-u)) / p.kappa
        if p.two_sided:
            z *= np.where(rng.random(n) < 0.5, -1.0, 1.0)
    else:
        z = rng.standard_normal(n)
        if not p.is_limit:
            nu = 1.0 / p.kappa
            chi2 = 2.0 * rng.standard_gamma(0.5 * nu, n)
            z /= np.sqrt(chi2 / nu)
        if not p.two_sided:
            z = np.abs(z)
    return p.mu + p.sigma * z


def sample_coupled(n, p, rs):
    """Draw ``n`` variates from ``p``.

    alpha=1 uses the closed-form inverse CDF; alpha=2 builds ``sigma * T_nu``
    with ``nu = 1/kappa`` from a Gaussian over a scaled chi-square.
    """
    n = _check_count(n)
    values = _draw_coupled(rs.generator(), n, p)
    prov = {"generator": "coupled", "alpha": p.alpha, "mu": p.mu, "sigma": p.sigma,
            "kappa": p.kappa, "two_sided": p.two_sided,
            "seed": rs.seed, "stream_id": rs.stream_id}
    return SampleSet(values, prov)


def sample_power_density(n, p, power, rs):
    """Independent-equals draws: samples from ``f**power`` renormalized."""
    if p.mu != 0.0 or p.is_limit:
        raise ParameterError("power-density sampling needs mu = 0 and kappa > 0")
    q = power_density_params(p, power)
    out = sample_coupled(n, q, rs)
    out.provenance.update(generator="power_density", power=int(power),
                          sigma=p.sigma, kappa=p.kappa)
    return out


def sample_gamma_mixture(n, sigma, kappa, rs):
    """Exponentials whose inverse scale is Gamma(shape 1/kappa, mean 1/sigma)."""
    n = _check_count(n)
    if not (sigma > 0 and kappa > 0):
        raise ParameterError("gamma mixture needs sigma > 0 and kappa > 0")
    rng = rs.generator()
    inv_scale = rng.gamma(1.0 / kappa, kappa / sigma, n)
    values = rng.standard_exponential(n) / inv_scale
    prov = {"generator": "gamma_mixture", "sigma": float(sigma), "kappa": float(kappa),
            "seed": rs.seed, "stream_id": rs.stream_id}
    return SampleSet(values, prov)

