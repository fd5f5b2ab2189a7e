"""
Unit tests for src/markov/leonperron.py
"""
import math

import pytest
import numpy as np
from numpy.testing import assert_allclose
from hypothesis import given, settings, strategies as st

from src.markov.chain import make_observable, stationary, validate_chain
from src.markov.errors import DomainError, NoGap, OutOfBound, OutOfRange
from src.markov.kato import eigencurve
from src.markov.leonperron import (
    LeonPerronOp,
    SimpleFunction,
    discretize,
    discretize_grid,
    leon_perron_version,
    lemma31_bound,
    lemma31_discretized_bound,
    lp_matrix,
    lp_perturbed_norm,
    mgf_envelope_timeinvariant,
    mgf_envelope_timevarying,
    pushforward,
    right_leon_perron_version,
    state_space_perturbed_norm,
)
from src.markov.spectral import l2_gap, right_gap
from src.simulation.exact import exact_mgf

RADEMACHER = SimpleFunction(values=[1.0, -1.0], weights=[0.5, 0.5], c=1.0)


class TestLeonPerronTypes:
    """Tests for operator and simple-function validation."""

    def test_lambda_must_be_below_one(self):
        with pytest.raises(DomainError):
            LeonPerronOp(lam=1.0, mu=[0.5, 0.5])

    def test_mu_must_be_distribution(self):
        with pytest.raises(DomainError):
            LeonPerronOp(lam=0.5, mu=[0.5, 0.6])

    def test_simple_function_bound(self):
        with pytest.raises(OutOfBound):
            SimpleFunction(values=[2.0, -2.0], weights=[0.5, 0.5], c=1.0)

    def test_simple_function_must_be_centered(self):
        with pytest.raises(DomainError):
            SimpleFunction(values=[1.0, 0.0], weights=[0.5, 0.5], c=1.0)

    def test_simple_function_variance(self):
        assert RADEMACHER.sigma2 == pytest.approx(1.0)


class TestLpMatrix:
    """Tests for lam I + (1 - lam) 1 mu'."""

    def test_pure_resampling(self):
        P = lp_matrix(0.0, [0.2, 0.8]).transition
        assert_allclose(P, [[0.2, 0.8], [0.2, 0.8]])

    def test_half_holding(self):
        P = lp_matrix(0.5, [0.5, 0.5]).transition
        assert_allclose(P, [[0.75, 0.25], [0.25, 0.75]])

    def test_gap_is_lambda(self):
        mu = np.array([0.1, 0.2, 0.3, 0.4])
        for lam in (0.0, 0.3, 0.9):
            chain = lp_matrix(lam, mu)
            assert_allclose(stationary(chain).pi, mu, atol=1e-12)
            assert l2_gap(chain, mu) == pytest.approx(lam, abs=1e-12)

    def test_versions_of_a_chain(self, nonreversible):
        chain, _ = nonreversible
        assert_allclose(
            leon_perron_version(chain).transition,
            lp_matrix(l2_gap(chain), [1 / 3] * 3).transition,
            atol=1e-12,
        )
        assert_allclose(
            right_leon_perron_version(chain).transition,
            lp_matrix(0.25, [1 / 3] * 3).transition,
            atol=1e-12,
        )

    def test_version_needs_gap(self):
        with pytest.raises(NoGap):
            leon_perron_version(validate_chain([[0, 1], [1, 0]]))


class TestPushforward:
    """Tests for the law of f under pi."""

    def test_distinct_values(self):
        f = make_observable([1, -1], [0.5, 0.5])
        simple = pushforward([0.5, 0.5], f)
        assert_allclose(simple.values, [1, -1])
        assert_allclose(simple.weights, [0.5, 0.5])

    def test_merges_equal_values(self):
        pi = [0.25, 0.5, 0.25]
        f = make_observable([1, 1, -3], pi)
        simple = pushforward(pi, f)
        assert len(simple.values) == 2
        assert_allclose(simple.weights, [0.75, 0.25])

    def test_preserves_variance(self, random_reversible_chains):
        for _, f, pi in random_reversible_chains:
            assert pushforward(pi, f).sigma2 == pytest.approx(f.sigma2, abs=1e-12)


class TestDiscretize:
    """Tests for the c/(3k) grid discretization."""

    def test_grid_value(self):
        assert discretize_grid([0.5], 1.0, 1)[0] == pytest.approx(2 / 3)

    def test_grid_boundary(self):
        assert_allclose(discretize_grid([-1.0, 1.0], 1.0, 1), [-1.0, 1.0])

    def test_out_of_bound(self):
        with pytest.raises(OutOfBound):
            discretize([1.5, -0.5], [0.5, 0.5], 1.0, 2)

    def test_k_must_be_positive(self):
        with pytest.raises(DomainError):
            discretize([0.5, -0.5], [0.5, 0.5], 1.0, 0)

    @settings(max_examples=100, deadline=None)
    @given(
        size=st.integers(min_value=2, max_value=12),
        k=st.integers(min_value=1, max_value=50),
        seed=st.integers(min_value=0, max_value=2**32 - 1),
    )
    def test_invariants_on_random_samples(self, size, k, seed):
        rng = np.random.default_rng(seed)
        c = 1.0
        weights = rng.uniform(0.05, 1.0, size)
        weights /= weights.sum()
        raw = rng.uniform(-c, c, size)
        # center, then shrink into [-c, c]
        values = raw - weights @ raw
        values *= 0.999 * c / np.max(np.abs(values))

        simple = discretize(values, weights, c, k)
        assert np.max(np.abs(simple.values)) <= c * (1 + 1e-12)
        assert abs(weights @ simple.values) <= 1e-12
        assert np.max(np.abs(simple.values - values)) < c / k

    def test_error_shrinks_with_k(self):
        rng = np.random.default_rng(3)
        weights = np.full(20, 0.05)
        values = rng.uniform(-1, 1, 20)
        values -= values.mean()
        # largest magnitude at +1 exactly: its error is at least 1/(3k + 1)
        peak = int(np.argmax(np.abs(values)))
        values /= values[peak]
        errors = [np.max(np.abs(discretize(values, weights, 1.0, k).values - values)) for k in (1, 4, 16, 64)]
        assert errors == sorted(errors, reverse=True)
        assert len(set(errors)) == 4


class TestLpPerturbedNorm:
    """Tests for the tilted León-Perron norm."""

    def test_resampling_is_mgf(self):
        assert lp_perturbed_norm(0.0, RADEMACHER, 0.1) == pytest.approx(math.cosh(0.1), rel=1e-12)

    def test_zero_tilt(self):
        assert lp_perturbed_norm(0.7, RADEMACHER, 0.0) == pytest.approx(1.0, abs=1e-14)

    def test_matches_eigencurve(self):
        mu = np.array([0.2, 0.5, 0.3])
        y = np.array([1.5, -0.3, -0.5])
        simple = SimpleFunction(values=y, weights=mu, c=1.5)
        f = make_observable(y, mu)
        for lam in (0.0, 0.4, 0.8):
            chain = lp_matrix(lam, mu)
            for t in (-0.3, 0.1, 0.5):
                assert lp_perturbed_norm(lam, simple, t) == pytest.approx(eigencurve(chain, f, t, mu), abs=1e-12)

    def test_state_space_identity(self, gapped_fixture):
        chain, f = gapped_fixture
        pi = stationary(chain)
        lam = l2_gap(chain, pi)
        simple = pushforward(pi, f)
        for t in (-0.1, -0.05, 0.05, 0.1):
            left = state_space_perturbed_norm(pi, lam, f, t)
            assert left == pytest.approx(lp_perturbed_norm(lam, simple, t), abs=1e-10)

    def test_log_mgf_limit(self, leon_perron_chain):
        chain, f = leon_perron_chain
        pi = stationary(chain)
        limit = math.log(lp_perturbed_norm(0.5, pushforward(pi, f), 0.1))
        rate_200 = math.log(exact_mgf(chain, f, 200, 0.1)) / 200
        rate_400 = math.log(exact_mgf(chain, f, 400, 0.1)) / 400
        assert abs(rate_400 - limit) <= abs(rate_200 - limit)
        assert abs(rate_400 - limit) <= 0.01 * abs(limit)


class TestLemma31Bound:
    """Tests for the León-Perron envelope."""

    def test_zero_lambda_is_bennett(self):
        t = 0.1
        assert lemma31_bound(t, 1.0, 1.0, 0.0) == math.exp(math.expm1(t) - t)
        assert lemma31_bound(t, 1.0, 1.0, 0.0) == pytest.approx(1.0051843, abs=1e-7)
        assert math.cosh(t) <= lemma31_bound(t, 1.0, 1.0, 0.0)

    def test_with_dependence(self):
        assert lemma31_bound(0.1, 1.0, 1.0, 0.4) == pytest.approx(1.046206, abs=1e-6)

    def test_zero_t(self):
        assert lemma31_bound(0.0, 1.0, 1.0, 0.4) == 1.0

    def test_out_of_range(self):
        with pytest.raises(OutOfRange):
            lemma31_bound(0.2, 1.0, 1.0, 0.5)

    def test_dominates_norm(self):
        simples = [
            RADEMACHER,
            SimpleFunction(values=[0.9, -0.1], weights=[0.1, 0.9], c=1.0),
            SimpleFunction(values=[1.0, 0.0, -1.0], weights=[0.25, 0.5, 0.25], c=1.0),
        ]
        for lam in (0.0, 0.3, 0.6, 0.9):
            for simple in simples:
                upper = 0.99 * (1 - lam) / (5 * simple.c)
                for t in np.linspace(0.0, upper, 9):
                    norm = lp_perturbed_norm(lam, simple, t)
                    assert norm <= lemma31_bound(t, simple.sigma2, simple.c, lam) * (1 + 1e-12)

    def test_discretized_bound_adds_grid_term(self):
        base = lemma31_bound(0.05, 0.5, 1.0, 0.3)
        assert lemma31_discretized_bound(0.05, 0.5, 1.0, 0.3, 10) == pytest.approx(base * math.exp(0.005))


class TestMgfEnvelopes:
    """Tests for the product envelopes."""

    def test_identical_factors(self, two_state):
        _, f = two_state
        single = lp_perturbed_norm(0.4, pushforward([0.5, 0.5], f), 0.05)
        assert mgf_envelope_timevarying(0.4, [f] * 5, [0.5, 0.5], 0.05) == pytest.approx(single ** 5)

    def test_zero_tilt(self, two_state):
        _, f = two_state
        assert mgf_envelope_timevarying(0.4, [f] * 3, [0.5, 0.5], 0.0) == pytest.approx(1.0)

    def test_alternating_signs(self, two_state):
        chain, f = two_state
        g = make_observable(-f.values, [0.5, 0.5])
        sequence = [f, g, f]
        t = 0.05
        # top eigenvalue of [[0.7 e^t, 0.3], [0.3, 0.7 e^-t]]
        factor = 0.7 * math.cosh(t) + math.sqrt(0.49 * math.sinh(t) ** 2 + 0.09)
        value = mgf_envelope_timevarying(0.4, sequence, [0.5, 0.5], t)
        assert value == pytest.approx(factor ** 3, rel=1e-12)
        assert exact_mgf(chain, sequence, 3, t) <= value

    def test_timeinvariant_dominates_exact(self, gapped_fixture):
        chain, f = gapped_fixture
        for t in (0.01, 0.05, 0.1):
            assert exact_mgf(chain, f, 10, t) <= mgf_envelope_timeinvariant(chain, f, 10, t) * (1 + 1e-12)

    def test_timeinvariant_uses_clamped_lambda_plus(self):
        chain = validate_chain([[0.1, 0.9], [0.9, 0.1]])
        f = make_observable([1, -1], [0.5, 0.5])
        assert right_gap(chain) < 0
        expected = math.cosh(0.2) ** 4
        assert mgf_envelope_timeinvariant(chain, f, 4, 0.2) == pytest.approx(expected, rel=1e-12)
