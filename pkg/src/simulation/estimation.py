"""
Monte Carlo Estimators

  - estimate_tail: exceedance frequency of (1/n) sum f(X_i) > eps with an
    exact 99% Clopper-Pearson interval
  - scaled_variance: sample variance of S_n / sqrt(n) across trials
"""
import logging
from typing import Callable, Optional, Tuple

import numpy as np
from scipy import stats

from src.markov.chain import Observable
from src.markov.errors import DomainError
from src.simulation.sampling import Sampler, run_trials
from src.simulation.schemas import TailEstimate, TrialPlan

logger = logging.getLogger(__name__)

Evaluator = Callable[[np.ndarray], np.ndarray]

CONFIDENCE = 0.99
MIN_TAIL_TRIALS = 100
MIN_VARIANCE_TRIALS = 1000


def clopper_pearson(successes: int, trials: int, confidence: float = CONFIDENCE) -> Tuple[float, float]:
    """Exact two-sided binomial interval from beta quantiles."""
    alpha = 1.0 - confidence
    low = 0.0 if successes == 0 else float(stats.beta.ppf(alpha / 2, successes, trials - successes + 1))
    high = (
        1.0
        if successes == trials
        else float(stats.beta.ppf(1 - alpha / 2, successes + 1, trials - successes))
    )
    return low, high


def observable_evaluator(f: Observable) -> Evaluator:
    """Map a state path to the values f(X_i)."""
    return lambda path: f.values[path]


def identity_evaluator(values: np.ndarray) -> np.ndarray:
    """For samplers that already emit values (León-Perron paths)."""
    return values


def _path_sums(
    sampler: Sampler, evaluate: Evaluator, plan: TrialPlan, n_jobs, chunk_size
) -> np.ndarray:
    return run_trials(
        plan,
        lambda index: float(np.sum(evaluate(sampler(plan, index)))),
        n_jobs=n_jobs,
        chunk_size=chunk_size,
    )


def estimate_tail(
    sampler: Sampler,
    evaluate: Evaluator,
    eps: float,
    plan: TrialPlan,
    n_jobs: Optional[int] = None,
    chunk_size: Optional[int] = None,
) -> TailEstimate:
    """
    Fraction of trials with (1/n) sum_{i<=n} f(X_i) > eps, n = plan.n.

    Raises:
        DomainError: fewer than 100 trials
    """
    if plan.trials < MIN_TAIL_TRIALS:
        raise DomainError(f"estimate_tail needs >= {MIN_TAIL_TRIALS} trials, got {plan.trials}")
    means = _path_sums(sampler, evaluate, plan, n_jobs, chunk_size) / plan.n
    successes = int(np.count_nonzero(means > eps))
    low, high = clopper_pearson(successes, plan.trials)
    point = successes / plan.trials
    logger.info(f"estimate_tail: {successes}/{plan.trials} exceedances, CP99=[{low:.3e}, {high:.3e}]")
    return TailEstimate(
        successes=successes,
        trials=plan.trials,
        point=point,
        cp_low=min(low, point),
        cp_high=max(high, point),
    )


def scaled_variance(
    sampler: Sampler,
    evaluate: Evaluator,
    plan: TrialPlan,
    n_jobs: Optional[int] = None,
    chunk_size: Optional[int] = None,
) -> float:
    """
    Unbiased sample variance of S_n / sqrt(n) across trials.

    Raises:
        DomainError: fewer than 1000 trials
    """
    if plan.trials < MIN_VARIANCE_TRIALS:
        raise DomainError(f"scaled_variance needs >= {MIN_VARIANCE_TRIALS} trials, got {plan.trials}")
    scaled = _path_sums(sampler, evaluate, plan, n_jobs, chunk_size) / np.sqrt(plan.n)
    return float(np.var(scaled, ddof=1))
