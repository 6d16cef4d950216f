import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import norm

from irsfso.errors import ConfigurationError, ConvergenceError, PoleError
from irsfso.fading_ber import (GammaGammaParams, OokLink, ber_monte_carlo, ber_series,
                               conditional_ber, gg_sample, xi_coeff)

REF = GammaGammaParams(2.1, 2.0)


def xi_ref(l, a, b):
    with mp.workdps(40):
        a, b = mp.mpf(a), mp.mpf(b)
        v = (mp.sqrt(mp.pi) * (2 * mp.sqrt(2) * a * b) ** (l + b) * mp.gamma((l + b + 1) / 2)
             / (2 * mp.sin(mp.pi * (a - b)) * mp.gamma(a) * mp.gamma(b) * mp.gamma(l - a + b + 1)
                * (l + b) * mp.factorial(l)))
        return float(v)


def test_sample_moments():
    h = gg_sample(REF, 123, 10 ** 6)
    assert h.mean() == pytest.approx(1.0, abs=0.005)
    assert REF.variance == pytest.approx(1 / 2.1 + 1 / 2 + 1 / 4.2, rel=1e-15)
    assert REF.variance == pytest.approx(1.2143, abs=5e-5)
    assert h.var() == pytest.approx(REF.variance, rel=0.01)


def test_sampler_deterministic():
    assert np.array_equal(gg_sample(REF, 5, 100), gg_sample(REF, 5, 100))
    rng = np.random.default_rng(5)
    assert np.array_equal(gg_sample(REF, rng, 10), gg_sample(REF, np.random.default_rng(5), 10))


@pytest.mark.parametrize("l", [0, 1, 5, 30])
def test_xi_against_extended_precision(l):
    assert xi_coeff(l, 2.1, 2.0) == pytest.approx(xi_ref(l, 2.1, 2.0), rel=1e-12)
    assert xi_coeff(l, 2.0, 2.1) == pytest.approx(xi_ref(l, 2.0, 2.1), rel=1e-12)


def test_xi_first_coefficient_value():
    assert xi_coeff(0, 2.1, 2.0) == pytest.approx(160.36363636363636, rel=1e-12)


def test_integer_shape_difference_is_a_pole():
    with pytest.raises(PoleError):
        xi_coeff(0, 3.0, 2.0)
    with pytest.raises(PoleError):
        ber_series(1e10, GammaGammaParams(3.0, 2.0))


def test_series_terms_decay():
    g = 1e10
    terms = [abs(xi_coeff(l, 2.1, 2.0)) * g ** (-(l + 2.0) / 2) for l in range(0, 60, 5)]
    assert all(b < a for a, b in zip(terms, terms[1:]))
    assert terms[-1] < 1e-200


def test_series_vanishes_at_high_snr():
    vals = [ber_series(g, REF).value for g in (1e8, 1e10, 1e12, 1e16, 1e20)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1e-17


@given(st.floats(1.3, 6.0), st.floats(1.3, 6.0), st.floats(1e6, 1e14))
def test_series_symmetric_in_shapes(a, b, g):
    if abs((a - b) - round(a - b)) < 1e-3:
        return
    p = ber_series(g, GammaGammaParams(a, b)).value
    q = ber_series(g, GammaGammaParams(b, a)).value
    assert p == pytest.approx(q, rel=1e-9, abs=1e-300)


def test_series_against_monte_carlo():
    g = 1e10
    s = ber_series(g, REF).value
    mc = ber_monte_carlo(g, REF, 10 ** 6, seed=3)
    assert abs(s - mc.estimate) < 3 * mc.std_error


def test_series_refuses_low_snr():
    with pytest.raises(ConvergenceError):
        ber_series(1.0, REF)
    with pytest.raises(ConvergenceError):
        ber_series(1e-30, REF)
    with pytest.raises(ConfigurationError):
        ber_series(0.0, REF)


def test_conditional_kernel():
    for g, h in ((1e2, 0.3), (1e4, 1.0), (4.0, 2.0)):
        assert conditional_ber(g, h) == pytest.approx(norm.sf(math.sqrt(g) * h / 2), rel=1e-12)
    assert conditional_ber(0.0, 0.7) == 0.5


def test_monte_carlo_zero_snr():
    assert ber_monte_carlo(0.0, REF, 10 ** 4).estimate == 0.5


def test_monte_carlo_decreasing_in_snr():
    # common random numbers: the plain estimator inherits Q's monotonicity
    est = [ber_monte_carlo(g, REF, 10 ** 5, seed=1, method="plain").estimate
           for g in (1.0, 10.0, 100.0, 1e3)]
    assert all(b < a for a, b in zip(est, est[1:]))


def test_monte_carlo_methods_agree():
    g = 1e3
    a = ber_monte_carlo(g, REF, 10 ** 6, seed=2, method="plain")
    b = ber_monte_carlo(g, REF, 10 ** 6, seed=2, method="importance")
    assert abs(a.estimate - b.estimate) < 3 * math.hypot(a.std_error, b.std_error)


def test_monte_carlo_bit_identical():
    a = ber_monte_carlo(1e9, REF, 600_000, seed=11)
    b = ber_monte_carlo(1e9, REF, 600_000, seed=11)
    assert a == b


@pytest.mark.parametrize("kwargs", [dict(n_samples=10), dict(gamma=-1.0), dict(method="qmc")])
def test_monte_carlo_argument_checks(kwargs):
    args = dict(gamma=1e3, params=REF, n_samples=10 ** 4)
    args.update(kwargs)
    with pytest.raises(ConfigurationError):
        ber_monte_carlo(**args)


def test_parameter_checks():
    with pytest.raises(ConfigurationError):
        GammaGammaParams(0.0, 2.0)
    with pytest.raises(ConfigurationError):
        OokLink(1.0, 0.0)
    assert OokLink(2.0, 4.0).gamma(0.5, 2.0) == pytest.approx(0.5)
