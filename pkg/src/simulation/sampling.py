"""
Seeded Path Sampling

Every trial owns an independent Philox stream keyed by a SplitMix64 mix of
(base_seed, trial_index), so a trial's path depends only on the plan and its
index. Trials run in fixed-size chunks through joblib threads and are
collected back in trial order, which makes every statistic independent of
the worker count.
"""
import logging
from typing import Callable, Optional

import numpy as np
from joblib import Parallel, delayed

from src.config import SIMULATION_CONFIG
from src.markov.chain import FiniteChain
from src.markov.leonperron import LeonPerronOp, SimpleFunction
from src.markov.spectral import resolve_pi
from src.simulation.schemas import TrialPlan

logger = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15

Sampler = Callable[[TrialPlan, int], np.ndarray]


def splitmix64(x: int) -> int:
    """SplitMix64 output finalizer (avalanche mix of a 64-bit word)."""
    z = x & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def trial_seed(base_seed: int, trial_index: int) -> int:
    return splitmix64(base_seed ^ ((GOLDEN_GAMMA * (trial_index + 1)) & MASK64))


def trial_generator(plan: TrialPlan, trial_index: int) -> np.random.Generator:
    """Independent counter-based generator for one trial."""
    return np.random.Generator(np.random.Philox(key=trial_seed(plan.base_seed, trial_index)))


# ---------------------------------------------------------------------------
# Samplers
# ---------------------------------------------------------------------------
def sample_chain_path(chain: FiniteChain, plan: TrialPlan, trial_index: int, pi=None) -> np.ndarray:
    """
    Stationary path X_1..X_n: X_1 ~ pi, X_{i+1} ~ P(X_i, .) by inverse CDF.

    Returns:
        int array of states, length plan.n
    """
    pi = resolve_pi(chain, pi)
    rng = trial_generator(plan, trial_index)
    u = rng.random(plan.n)
    last = chain.n_states - 1

    path = np.empty(plan.n, dtype=np.int64)
    path[0] = min(int(np.searchsorted(np.cumsum(pi), u[0], side="right")), last)
    cdf = np.cumsum(chain.transition, axis=1)
    for i in range(1, plan.n):
        path[i] = min(int(np.searchsorted(cdf[path[i - 1]], u[i], side="right")), last)
    return path


def sample_lp_path(
    lam: float, innovation: SimpleFunction, plan: TrialPlan, trial_index: int
) -> np.ndarray:
    """
    Values of the León-Perron chain observed through f:

        Y_1 = f(Z_1),  Y_i = B_i Y_{i-1} + (1 - B_i) f(Z_i)

    with B_i ~ Bernoulli(lam) and Z_i ~ mu drawn independently.

    Returns:
        float array of values, length plan.n
    """
    LeonPerronOp(lam=lam, mu=innovation.weights)
    rng = trial_generator(plan, trial_index)
    hold = rng.random(plan.n) < lam
    hold[0] = False
    draws = np.searchsorted(np.cumsum(innovation.weights), rng.random(plan.n), side="right")
    draws = np.minimum(draws, len(innovation.weights) - 1)

    steps = np.arange(plan.n)
    last_refresh = np.maximum.accumulate(np.where(hold, 0, steps))
    return innovation.values[draws[last_refresh]]


def chain_sampler(chain: FiniteChain, pi=None) -> Sampler:
    """Bind a chain (and its stationary law) into a (plan, index) -> states sampler."""
    pi = resolve_pi(chain, pi)
    return lambda plan, index: sample_chain_path(chain, plan, index, pi)


def lp_sampler(lam: float, innovation: SimpleFunction) -> Sampler:
    return lambda plan, index: sample_lp_path(lam, innovation, plan, index)


# ---------------------------------------------------------------------------
# Trial execution
# ---------------------------------------------------------------------------
def run_trials(
    plan: TrialPlan,
    statistic: Callable[[int], float],
    n_jobs: Optional[int] = None,
    chunk_size: Optional[int] = None,
) -> np.ndarray:
    """
    Evaluate statistic(trial_index) for every trial.

    Args:
        plan: trial plan
        statistic: per-trial function of the trial index
        n_jobs: joblib thread count (defaults to SIMULATION_CONFIG)
        chunk_size: trials per task (defaults to SIMULATION_CONFIG)

    Returns:
        float array of length plan.trials, in trial order
    """
    n_jobs = SIMULATION_CONFIG["n_jobs"] if n_jobs is None else n_jobs
    chunk_size = SIMULATION_CONFIG["trial_chunk_size"] if chunk_size is None else chunk_size

    def run_chunk(start: int, stop: int) -> np.ndarray:
        return np.array([statistic(i) for i in range(start, stop)], dtype=float)

    bounds = [(s, min(s + chunk_size, plan.trials)) for s in range(0, plan.trials, chunk_size)]
    logger.debug(f"run_trials: {plan.trials} trials in {len(bounds)} chunks, n_jobs={n_jobs}")
    chunks = Parallel(n_jobs=n_jobs, prefer="threads")(
        delayed(run_chunk)(start, stop) for start, stop in bounds
    )
    return np.concatenate(chunks)
