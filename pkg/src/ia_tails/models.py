"""Generators for the two application data sets: CNM avalanches and standard-map sums."""

from dataclasses import dataclass, asdict
import math

import numpy as np

from . import kernels
from .errors import ParameterError
from .sampler import SampleSet


@dataclass(frozen=True)
class CnmConfig:
    """Coherent noise model: ``n_agents`` thresholds under exponential stress.

    Output sizes are fractions of ``n_agents`` unless ``normalize`` is off.
    """

    n_agents: int = 100_000
    sigma_stress: float = 0.05
    f: int = 8000
    steps: int = 1_000_000
    subsample_every: int = 1
    normalize: bool = True

    def __post_init__(self):
        if self.n_agents < 1:
            raise ParameterError("n_agents must be >= 1")
        if not 0 <= self.f <= self.n_agents:
            raise ParameterError(f"f must lie in [0, n_agents], got {self.f}")
        if not self.sigma_stress > 0:
            raise ParameterError("sigma_stress must be > 0")
        if self.steps < 1 or self.subsample_every < 1:
            raise ParameterError("steps and subsample_every must be >= 1")


@dataclass(frozen=True)
class StdMapConfig:
    K: float = 0.6
    n_initial_conditions: int = 10_000
    transient: int = 10_000
    sum_length: int = 10_000

    def __post_init__(self):
        if not self.K > 0:
            raise ParameterError("K must be > 0")
        if self.n_initial_conditions < 2 or self.sum_length < 1 or self.transient < 0:
            raise ParameterError("need >= 2 orbits, sum_length >= 1 and transient >= 0")

    @property
    def n_iterations(self):
        return self.transient + self.sum_length


def cnm_raw_sizes(cfg, rs):
    """Avalanche size (agents replaced) at every step, zeros included."""
    return kernels.cnm_sizes(rs.generator(), cfg.n_agents, cfg.sigma_stress, cfg.f, cfg.steps)


def cnm_run(cfg, rs):
    sizes = cnm_raw_sizes(cfg, rs)[::cfg.subsample_every]
    sizes = sizes[sizes > 0]
    values = sizes / cfg.n_agents if cfg.normalize else sizes.astype(np.float64)
    prov = {"generator": "cnm", **asdict(cfg), "seed": rs.seed, "stream_id": rs.stream_id}
    return SampleSet(values, prov)


def stdmap_run(cfg, rs):
    """One centered, sqrt(L)-scaled sum of x per orbit."""
    rng = rs.generator()
    n = cfg.n_initial_conditions
    x0 = rng.uniform(0.0, 2.0 * math.pi, n)
    y0 = rng.uniform(0.0, 2.0 * math.pi, n)
    sums, _ = kernels.stdmap_sums(x0, y0, cfg.K, cfg.transient, cfg.sum_length)
    L = cfg.sum_length
    xbar = sums.sum() / (n * L)
    u = (sums - L * xbar) / math.sqrt(L)
    prov = {"generator": "stdmap", **asdict(cfg), "seed": rs.seed, "stream_id": rs.stream_id}
    return SampleSet(u, prov)
