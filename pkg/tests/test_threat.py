import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geocoherence.errors import ConfigError, ThreatOverflowError
from geocoherence.threat import (
    ThreatParams,
    adversary_probability,
    format_probability,
    post_compromise_probability,
)


def test_four_tries_ten_symbols_six_digits():
    p = ThreatParams(pr_forge=1e-4, n_t=4, sigma=10, tau=6)
    assert adversary_probability(p) == pytest.approx(4e-10, rel=1e-12)


def test_six_tries_ten_symbols_six_digits():
    p = ThreatParams(pr_forge=1e-4, n_t=6, sigma=10, tau=6)
    assert adversary_probability(p) == pytest.approx(6e-10, rel=1e-12)


def test_zero_tries_zero_probability():
    assert adversary_probability(ThreatParams(1e-4, 0, 10, 6)) == 0.0


def test_zero_forge_rate_zero_probability():
    assert adversary_probability(ThreatParams(0.0, 4, 10, 6)) == 0.0


def test_post_compromise_is_forge_rate():
    assert post_compromise_probability(ThreatParams(1e-4, 4, 10, 6)) == 1e-4


def test_adversary_never_exceeds_post_compromise():
    p = ThreatParams(0.03, 7, 10, 4)
    assert adversary_probability(p) <= post_compromise_probability(p)


def test_exhaustive_tries_reduce_to_forge_rate():
    # with n_t equal to the whole PIN space the PIN adds nothing
    p = ThreatParams(0.5, 10**4, 10, 4)
    assert adversary_probability(p) == pytest.approx(0.5, rel=1e-12)


@given(
    st.floats(min_value=0.0, max_value=1.0),
    st.integers(0, 100),
    st.integers(2, 30),
    st.integers(1, 12),
)
@settings(max_examples=200, deadline=None)
def test_probability_bounds_property(pr_forge, n_t, sigma, tau):
    p = ThreatParams(pr_forge, min(n_t, sigma**tau), sigma, tau)
    value = adversary_probability(p)
    assert 0.0 <= value <= 1.0 + 1e-15
    # equal up to one rounding step when n_t covers the whole PIN space
    assert value <= post_compromise_probability(p) * (1.0 + 1e-15)


@given(st.integers(1, 50), st.integers(1, 50))
@settings(max_examples=100, deadline=None)
def test_more_tries_never_hurt_attacker(n_small, extra):
    base = ThreatParams(1e-3, n_small, 10, 6)
    more = ThreatParams(1e-3, n_small + extra, 10, 6)
    assert adversary_probability(more) > adversary_probability(base)


@given(st.integers(1, 10), st.integers(1, 11))
@settings(max_examples=100, deadline=None)
def test_longer_pins_help_defender(tau, _):
    base = ThreatParams(1e-3, 4, 10, tau)
    longer = ThreatParams(1e-3, 4, 10, tau + 1)
    assert adversary_probability(longer) < adversary_probability(base)


def test_validation_errors():
    with pytest.raises(ConfigError):
        adversary_probability(ThreatParams(1.5, 4, 10, 6))
    with pytest.raises(ConfigError):
        adversary_probability(ThreatParams(0.1, -1, 10, 6))
    with pytest.raises(ConfigError):
        adversary_probability(ThreatParams(0.1, 4, 0, 6))
    with pytest.raises(ConfigError):
        adversary_probability(ThreatParams(0.1, 4, 10, 0))
    with pytest.raises(ConfigError):
        adversary_probability(ThreatParams(0.1, 101, 10, 2))


def test_huge_pin_space_overflows_explicitly():
    with pytest.raises(ThreatOverflowError):
        adversary_probability(ThreatParams(0.1, 1, 10, 400))


def test_format_probability():
    assert format_probability(1e-4) == "0.0001 (0.01%)"
    assert "4e-10" in format_probability(4e-10)
