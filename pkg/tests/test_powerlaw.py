import math

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from clanforge.powerlaw import FitError, fit_gamma_mle, model_pmf
from clanforge.synth import generate_powerlaw

degree_lists = st.lists(st.integers(1, 500), min_size=2, max_size=60)


def test_hand_example():
    fit = fit_gamma_mle([1, 1, 2, 4], xmin=1)
    assert fit.gamma == pytest.approx(1 + 4 / (math.log(2) + math.log(4)), rel=1e-15)
    assert fit.gamma == pytest.approx(2.9240, abs=5e-4)
    assert (fit.xmin, fit.sample_count) == (1, 4)


def test_zero_log_sum():
    with pytest.raises(FitError, match="undefined"):
        fit_gamma_mle([1, 1, 1])


def test_too_few_samples():
    with pytest.raises(FitError):
        fit_gamma_mle([1, 5], xmin=3)


def test_zero_degrees_excluded():
    assert fit_gamma_mle([0, 0, 1, 2]) == fit_gamma_mle([1, 2])


def test_xmin_filters_tail():
    fit = fit_gamma_mle([1, 1, 2, 3, 6], xmin=2)
    assert fit.sample_count == 3
    assert fit.gamma == pytest.approx(1 + 3 / (math.log(1.5) + math.log(3)))


def test_json_shape():
    assert set(fit_gamma_mle([1, 2, 3]).to_json()) == {"gamma", "xmin", "n"}


@given(degree_lists, st.integers(1, 5), st.integers(2, 9))
def test_scale_invariance(degrees, xmin, c):
    assume(any(d > xmin for d in degrees) and sum(d >= xmin for d in degrees) >= 2)
    a = fit_gamma_mle(degrees, xmin).gamma
    b = fit_gamma_mle([d * c for d in degrees], xmin * c).gamma
    assert a == pytest.approx(b, rel=1e-12)


@given(degree_lists, st.data())
def test_spreading_upward_lowers_gamma(degrees, data):
    assume(any(d > 1 for d in degrees))
    i = data.draw(st.integers(0, len(degrees) - 1))
    bump = data.draw(st.integers(1, 50))
    spread = list(degrees)
    spread[i] += bump
    assert fit_gamma_mle(spread).gamma < fit_gamma_mle(degrees).gamma


@given(degree_lists)
def test_gamma_above_one(degrees):
    assume(any(d > 1 for d in degrees))
    assert fit_gamma_mle(degrees).gamma > 1


def test_model_values():
    assert model_pmf(2.0, [1, 10]) == {1: 1.0, 10: pytest.approx(0.01, rel=1e-15)}
    assert model_pmf(2.22323429316, [2])[2] == pytest.approx(0.2142, abs=5e-5)


def test_model_bad_input():
    with pytest.raises(FitError):
        model_pmf(2.0, [0])
    with pytest.raises(FitError):
        model_pmf(1.0, [1])


RECOVERY = [
    2.05,
    2.22,
    2.5,
    pytest.param(3.0, marks=pytest.mark.xfail(
        strict=True, reason="continuous estimator at xmin=1 overestimates steep integer laws (~3.33 at 3.0)")),
]


@pytest.mark.slow
@pytest.mark.parametrize("planted", RECOVERY)
def test_fit_recovery_across_exponents(planted):
    hits = sum(abs(fit_gamma_mle(generate_powerlaw(10000, planted, seed).degrees).gamma - planted) <= 0.15
               for seed in range(1, 6))
    assert hits >= 4
