"""
Shared test fixtures for the Markov chain bound tests.
"""
import sys
from pathlib import Path
import pytest
import numpy as np

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.cli.chain_spec import load_chain_spec
from src.markov.chain import make_observable, stationary, validate_chain

FIXTURES_DIR = Path(__file__).parent.parent / "fixtures"

REVERSIBLE_FIXTURES = ["two_state", "birth_death", "leon_perron"]
GAPPED_FIXTURES = REVERSIBLE_FIXTURES + ["nonreversible"]


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: Monte Carlo tests with >= 10^4 trials")


def _load(name):
    return load_chain_spec(FIXTURES_DIR / f"{name}.chain")


def _random_observable(rng, pi, n_states):
    # integer raw values keep f on a lattice, so exact_tail stays on the DP path
    while True:
        raw = rng.integers(-3, 4, n_states)
        if np.ptp(raw) > 0:
            return make_observable(raw, pi)


def _random_suite(seed, count, reversible):
    rng = np.random.default_rng(seed)
    suite = []
    for _ in range(count):
        n_states = int(rng.integers(2, 6))
        weights = rng.uniform(0.1, 1.0, (n_states, n_states))
        if reversible:
            # symmetric conductances give a reversible walk with pi ~ row sums
            weights = weights + weights.T
        chain = validate_chain(weights / weights.sum(axis=1, keepdims=True))
        pi = stationary(chain)
        suite.append((chain, _random_observable(rng, pi, n_states), pi))
    return suite


@pytest.fixture
def two_state():
    """p = 0.3 flip chain with f = (1, -1)."""
    return _load("two_state")


@pytest.fixture
def birth_death():
    return _load("birth_death")


@pytest.fixture
def leon_perron_chain():
    return _load("leon_perron")


@pytest.fixture
def nonreversible():
    return _load("nonreversible")


@pytest.fixture(params=REVERSIBLE_FIXTURES)
def reversible_fixture(request):
    return _load(request.param)


@pytest.fixture(params=GAPPED_FIXTURES)
def gapped_fixture(request):
    return _load(request.param)


@pytest.fixture(scope="session")
def random_reversible_chains():
    """50 seeded reversible chains (2-5 states) with lattice-valued observables."""
    return _random_suite(20240917, 50, reversible=True)


@pytest.fixture(scope="session")
def random_nonreversible_chains():
    """20 seeded chains with independent uniform rows (almost surely nonreversible)."""
    return _random_suite(917, 20, reversible=False)
