"""Independent Approximates estimation for heavy-tailed coupled distributions."""
__version__ = "0.1.0"

from .dist import CoupledParams, cdf, logpdf, pdf, quantile, to_q_beta  # noqa: E402
from .ia import IAConfig, ia_fit  # noqa: E402
from .mle import ml_fit, nll  # noqa: E402
from .sampler import RandomStream, SampleSet, sample_coupled  # noqa: E402

__all__ = ["CoupledParams", "IAConfig", "RandomStream", "SampleSet", "cdf", "ia_fit",
           "logpdf", "ml_fit", "nll", "pdf", "quantile", "sample_coupled", "to_q_beta"]
