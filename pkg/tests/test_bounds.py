"""
Unit tests for src/bounds/inequalities.py and src/bounds/schemas.py
"""
import math

import pytest
import numpy as np
from hypothesis import given, settings, strategies as st
from pydantic import ValidationError

from src.bounds.inequalities import (
    PAULIN_320_NOTE,
    bennett_log_mgf,
    classical_bound,
    effective_gap,
    envelope_variance_proxy,
    g_components,
    mgf_bound,
    proxy_table,
    tail_bound,
)
from src.bounds.schemas import BoundQuery, BoundValue
from src.markov.errors import DomainError, NoGap, OutOfRange


def _proxy(table, setting, reference):
    row = table[(table["setting"] == setting) & (table["reference"] == reference)]
    assert len(row) == 1
    return float(row["variance_proxy"].iloc[0])


class TestSchemas:
    """Tests for BoundQuery and BoundValue validation."""

    def test_variance_above_c_squared_rejected(self):
        with pytest.raises(ValidationError):
            BoundQuery(n=10, eps=0.1, sigma2=2.0, c=1.0, lam=0.1)

    def test_non_positive_eps_rejected(self):
        with pytest.raises(ValidationError):
            BoundQuery(n=10, eps=0.0, sigma2=1.0, c=1.0, lam=0.1)

    def test_query_is_frozen(self):
        query = BoundQuery(n=10, eps=0.1, sigma2=1.0, c=1.0, lam=0.1)
        with pytest.raises(ValidationError):
            query.n = 20

    def test_value_consistency(self):
        value = BoundValue.from_exponent(0.01, 100, "thm11")
        assert value.probability_bound == pytest.approx(math.exp(-1.0))
        with pytest.raises(ValidationError):
            BoundValue(probability_bound=0.5, exponent=0.01, n=100, kind="thm11")


class TestGComponents:
    """Tests for the envelope exponents g1 and g2."""

    def test_origin(self):
        assert g_components(0.0, 1.0, 1.0, 0.4) == (0.0, 0.0)

    def test_independent_case(self):
        g1, g2 = g_components(0.1, 1.0, 1.0, 0.0)
        assert g1 == pytest.approx(0.00517092, abs=1e-8)
        assert g2 == 0.0

    def test_dependence_term(self):
        g1, g2 = g_components(0.1, 1.0, 1.0, 0.4)
        assert g1 == pytest.approx(0.00517092, abs=1e-8)
        assert g2 == pytest.approx(0.04)

    def test_pole_sentinel(self):
        _, g2 = g_components(0.12, 1.0, 1.0, 0.4)
        assert math.isinf(g2)

    def test_no_pole_without_dependence(self):
        for t in (0.19, 0.2, 1.0, 5.0):
            g1, g2 = g_components(t, 1.0, 1.0, 0.0)
            assert g2 == 0.0
            assert g1 == bennett_log_mgf(t, 1.0, 1.0)

    def test_mgf_bound_keeps_range_at_zero_lambda(self):
        # the dependence term is absent, but the envelope is still stated on t < 1/(5c)
        with pytest.raises(OutOfRange):
            mgf_bound(3, 0.2, 1.0, 1.0, 0.0)


class TestMgfBound:
    """Tests for exp(n (g1 + g2))."""

    def test_two_steps(self):
        assert mgf_bound(2, 0.1, 1.0, 1.0, 0.4) == pytest.approx(1.0945484, abs=1e-7)

    def test_zero_t(self):
        assert mgf_bound(50, 0.0, 1.0, 1.0, 0.4) == 1.0

    def test_negative_lambda_plus_clamps(self):
        expected = math.exp(7 * g_components(0.1, 0.5, 1.0, 0.0)[0])
        assert mgf_bound(7, 0.1, 0.5, 1.0, -0.5, "thm12") == pytest.approx(expected, rel=1e-15)

    def test_out_of_range(self):
        with pytest.raises(OutOfRange):
            mgf_bound(2, 0.12, 1.0, 1.0, 0.4)
        with pytest.raises(OutOfRange):
            mgf_bound(2, -0.01, 1.0, 1.0, 0.4)

    def test_no_gap(self):
        with pytest.raises(NoGap):
            mgf_bound(2, 0.01, 1.0, 1.0, 1.0)


class TestEffectiveGap:
    """Tests for the gap parameter each variant uses."""

    def test_tiny_gap_collapses_to_zero(self):
        assert effective_gap(1e-13, "thm11") == 0.0

    def test_thm12_clamps(self):
        assert effective_gap(-0.7, "thm12") == 0.0
        assert effective_gap(0.3, "thm12") == 0.3

    def test_unknown_variant(self):
        with pytest.raises(DomainError):
            effective_gap(0.3, "thm13")


class TestTailBound:
    """Tests for exp(-n eps^2 / (2 (A1 sigma2 + A2 c eps)))."""

    def test_independent_value(self):
        query = BoundQuery(n=1000, eps=0.1, sigma2=1.0, c=1.0, lam=0.0)
        assert tail_bound(query).probability_bound == pytest.approx(7.918e-3, rel=1e-3)

    def test_dependent_value(self):
        query = BoundQuery(n=1000, eps=0.1, sigma2=1.0, c=1.0, lam=0.4)
        value = tail_bound(query)
        assert value.probability_bound == pytest.approx(0.2062, rel=1e-3)
        assert value.exponent == pytest.approx(0.01 / (2 * (7 / 3 + 5 / 6)))
        assert value.kind == "thm11"

    def test_reduces_to_bernstein(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            c = float(rng.uniform(0.1, 5.0))
            sigma2 = float(rng.uniform(0.0, 1.0)) * c * c
            eps = float(rng.uniform(0.01, 1.0)) * c
            n = int(rng.integers(1, 5000))
            query = BoundQuery(n=n, eps=eps, sigma2=sigma2, c=c, lam=0.0, lam_plus=-0.2)
            bernstein = classical_bound("bernstein", n, eps, sigma2, c)
            for variant in ("thm11", "thm12"):
                value = tail_bound(query, variant)
                assert value.probability_bound == pytest.approx(bernstein.probability_bound, rel=1e-12)

    def test_increasing_in_lambda(self):
        values = [
            tail_bound(BoundQuery(n=500, eps=0.1, sigma2=0.5, c=1.0, lam=lam)).probability_bound
            for lam in np.arange(0.0, 1.0, 0.1)
        ]
        assert all(a < b for a, b in zip(values, values[1:]))

    @settings(max_examples=200, deadline=None)
    @given(
        lam_low=st.floats(min_value=0.0, max_value=0.98),
        step=st.floats(min_value=0.0, max_value=1.0),
        eps_fraction=st.floats(min_value=0.01, max_value=1.0),
        sigma2_fraction=st.floats(min_value=0.0, max_value=1.0),
    )
    def test_exponent_monotone_in_lambda(self, lam_low, step, eps_fraction, sigma2_fraction):
        lam_high = lam_low + step * (0.99 - lam_low)
        c = 2.0
        common = dict(n=100, eps=eps_fraction * c, sigma2=sigma2_fraction * c * c, c=c)
        low = tail_bound(BoundQuery(lam=lam_low, **common)).exponent
        high = tail_bound(BoundQuery(lam=lam_high, **common)).exponent
        assert high <= low * (1 + 1e-12)

    @settings(max_examples=200, deadline=None)
    @given(
        lam=st.floats(min_value=0.0, max_value=0.99),
        eps_low=st.floats(min_value=0.01, max_value=0.5),
        eps_step=st.floats(min_value=0.0, max_value=0.5),
    )
    def test_probability_monotone_in_eps(self, lam, eps_low, eps_step):
        common = dict(n=50, sigma2=0.5, c=1.0, lam=lam)
        low = tail_bound(BoundQuery(eps=eps_low, **common)).probability_bound
        high = tail_bound(BoundQuery(eps=eps_low + eps_step, **common)).probability_bound
        assert high <= low * (1 + 1e-12)

    def test_decreasing_in_n(self):
        values = [
            tail_bound(BoundQuery(n=n, eps=0.1, sigma2=0.5, c=1.0, lam=0.3)).probability_bound
            for n in (10, 100, 1000)
        ]
        assert values[0] > values[1] > values[2]

    def test_no_gap(self):
        with pytest.raises(NoGap):
            tail_bound(BoundQuery(n=10, eps=0.1, sigma2=1.0, c=1.0, lam=1.0))

    def test_missing_gap_parameter(self):
        with pytest.raises(DomainError):
            tail_bound(BoundQuery(n=10, eps=0.1, sigma2=1.0, c=1.0, lam=0.2), "thm12")


class TestClassicalBound:
    """Tests for the independent-case inequalities."""

    def test_hoeffding(self):
        value = classical_bound("hoeffding", 100, 0.2, 0.0, 1.0)
        assert value.probability_bound == pytest.approx(math.exp(-2.0))

    def test_bennett(self):
        value = classical_bound("bennett", 100, 0.1, 0.25, 1.0)
        assert value.probability_bound == pytest.approx(0.1692, abs=1e-4)

    def test_bennett_zero_variance(self):
        value = classical_bound("bennett", 100, 0.1, 0.0, 1.0)
        assert value.probability_bound == 0.0
        assert math.isinf(value.exponent)

    def test_bernstein_weaker_than_bennett(self):
        for sigma2 in (0.01, 0.1, 0.5, 1.0):
            for eps in (0.01, 0.1, 0.5, 1.0):
                bennett = classical_bound("bennett", 50, eps, sigma2, 1.0)
                bernstein = classical_bound("bernstein", 50, eps, sigma2, 1.0)
                assert bernstein.probability_bound >= bennett.probability_bound

    def test_unknown_kind(self):
        with pytest.raises(DomainError):
            classical_bound("chebyshev", 10, 0.1, 1.0, 1.0)


class TestProxyTable:
    """Tests for the variance-proxy comparison table."""

    def test_time_independent_rows(self):
        table = proxy_table(1.0, 1.0, 0.5, 0.5)
        assert _proxy(table, "time-independent", "Markov Bernstein (lambda_+)") == pytest.approx(3.0)
        assert _proxy(table, "time-independent", "Paulin (2015), (3.21)") == pytest.approx(4.0)
        assert _proxy(table, "time-independent", "Lezaud (1998), (1)") == pytest.approx(4.0)

    def test_ordering_favours_thm12(self):
        table = proxy_table(1.0, 1.0, 0.5, 0.5)
        independent = table[table["setting"] == "time-independent"]
        dependent_rows = independent[independent["condition"] != "independent"]
        assert _proxy(table, "time-independent", "Markov Bernstein (lambda_+)") <= dependent_rows["variance_proxy"].min()

    def test_zero_gap_matches_bernstein(self):
        table = proxy_table(0.7, 1.0, 0.0, 0.0)
        assert _proxy(table, "time-dependent", "Markov Bernstein (lambda)") == pytest.approx(0.7)
        assert _proxy(table, "time-dependent", "Markov Bernstein (lambda)") == _proxy(
            table, "time-dependent", "Bernstein (1946)"
        )

    def test_negative_lambda_plus_clamps(self):
        clamped = proxy_table(0.7, 1.0, 0.3, -0.3)
        zero = proxy_table(0.7, 1.0, 0.3, 0.0)
        assert clamped["variance_proxy"].tolist() == zero["variance_proxy"].tolist()

    def test_table_shape(self):
        table = proxy_table(1.0, 1.0, 0.5, 0.5)
        assert list(table.columns) == ["setting", "type", "reference", "condition", "variance_proxy", "note"]
        assert (table["setting"] == "time-dependent").sum() == 6
        assert (table["setting"] == "time-independent").sum() == 11
        assert PAULIN_320_NOTE in table["note"].tolist()

    def test_domain(self):
        with pytest.raises(DomainError):
            proxy_table(1.0, 1.0, 1.0, 0.5)

    def test_envelope_proxy(self):
        assert envelope_variance_proxy(1.0, 1.0, 0.5) == pytest.approx(3.0)
        with pytest.raises(NoGap):
            envelope_variance_proxy(1.0, 1.0, 1.0)
