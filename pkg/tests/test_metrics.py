import math

import numpy as np
import pytest
from scipy import stats

from ia_tails import dist
from ia_tails.dist import CoupledParams
from ia_tails.metrics import TrialReport, avg_deviation, cvm, mse_report, nll_metric
from ia_tails.quadrature import integrate_support
from ia_tails.sampler import RandomStream, sample_coupled


def test_mse_examples():
    assert mse_report([1, 1, 1], 1) == (0.0, 0.0)
    assert mse_report([0, 2], 1) == (1.0, 0.0)
    m, s = mse_report([1.1, 0.9, 1.0], 1)
    assert m == pytest.approx(0.006667, abs=5e-7)
    assert s == pytest.approx(0.005774, abs=5e-7)
    assert mse_report([3.0], 1) == (4.0, 0.0)
    with pytest.raises(ValueError):
        mse_report([], 1)


def test_cvm_examples():
    p = CoupledParams(2, 0.0, 0.5, 1.0)
    assert cvm([0.0], p) == pytest.approx(1 / 12, rel=1e-15)
    n = 100
    q = dist.quantile((2 * np.arange(1, n + 1) - 1) / (2 * n), p)
    assert cvm(q, p) == pytest.approx(1 / 1200, rel=1e-9)


def test_cvm_matches_scipy():
    p = CoupledParams(1, 0.0, 0.5, 0.5)
    x = sample_coupled(500, p, RandomStream(50)).values
    ref = stats.cramervonmises(x, lambda v: dist.cdf(v, p)).statistic
    assert cvm(x, p) == pytest.approx(ref, rel=1e-10)


def test_cvm_null_distribution():
    p = CoupledParams(1, 0.0, 0.5, 1.0)
    w = [cvm(sample_coupled(10_000, p, RandomStream(51, t)).values, p) for t in range(100)]
    assert 0.02 <= np.median(w) <= 0.5


def test_cvm_invariant_under_monotone_map():
    p = CoupledParams(1, 0.0, 1.0, 0.5)
    x = sample_coupled(300, p, RandomStream(52)).values
    u = dist.cdf(x, p)
    # data pushed through the model quantile of another law, compared against that law
    q = CoupledParams(2, 0.0, 2.0, 1.5)
    y = dist.quantile(u, q)
    assert cvm(y, q) == pytest.approx(cvm(x, p), rel=1e-9)


def test_ad_examples():
    p = CoupledParams(1, 0.0, 0.5, 1.0)
    n = 200
    q = dist.quantile((np.arange(1, n + 1) - 0.5) / n, p)
    assert avg_deviation(q, p) == pytest.approx(0.0, abs=1e-12)
    assert avg_deviation(q + 0.1, p) == pytest.approx(0.1, rel=1e-9)


def test_ad_scale_and_order():
    p = CoupledParams(2, 0.0, 0.5, 0.5)
    x = sample_coupled(2000, p, RandomStream(53)).values
    base = avg_deviation(x, p)
    assert avg_deviation(3.0 * x, p.replace(sigma=1.5)) == pytest.approx(3.0 * base, rel=1e-9)
    rng = np.random.default_rng(0)
    y = rng.permutation(x)
    assert avg_deviation(y, p) == base
    assert cvm(y, p) == cvm(x, p)
    assert nll_metric(y, p) == pytest.approx(nll_metric(x, p), rel=1e-12)


@pytest.mark.parametrize("alpha", [1, 2])
def test_ad_grows_with_kappa(alpha):
    ad = [avg_deviation(sample_coupled(10_000, CoupledParams(alpha, 0.0, 0.5, k),
                                       RandomStream(54, i)).values, CoupledParams(alpha, 0.0, 0.5, k))
          for i, k in enumerate((0.25, 2.0))]
    assert ad[1] > 10 * ad[0]


def test_nll_examples():
    assert nll_metric([0.0], CoupledParams(1, 0.0, 1.0, 0.0)) == 0.0
    p = CoupledParams(1, 0.0, 0.5, 0.25)
    v = nll_metric(sample_coupled(10_000, p, RandomStream(55)).values, p)
    assert v == pytest.approx(5500, rel=0.1)


@pytest.mark.parametrize("alpha,kappa", [(1, 0.25), (1, 1.0), (2, 0.5), (2, 2.0)])
def test_nll_per_sample_is_entropy(alpha, kappa):
    p = CoupledParams(alpha, 0.0, 0.5, kappa)
    f = dist.scalar_pdf(p)
    h = integrate_support(lambda v: -math.log(f(v)) * f(v) if f(v) > 0 else 0.0, p)
    x = sample_coupled(100_000, p, RandomStream(56, int(4 * kappa), (alpha,))).values
    assert nll_metric(x, p) / x.size == pytest.approx(h, rel=0.02)


def test_gpd_entropy_closed_form():
    p = CoupledParams(1, 0.0, 0.5, 0.7)
    f = dist.scalar_pdf(p)
    h = integrate_support(lambda v: -math.log(f(v)) * f(v), p)
    assert h == pytest.approx(math.log(0.5) + 0.7 + 1.0, rel=1e-8)


def test_report_dict():
    r = TrialReport("ML", 0.5, 0.5, 1e-3, 1e-3, 1e-4, 1e-4, 0.1, 0.2, 100.0, 10, 1000)
    assert r.as_dict()["failures"] == 0 and r.as_dict()["method_tag"] == "ML"
