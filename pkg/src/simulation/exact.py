"""
Exact Transfer-Matrix Oracles

Exact MGF and tail probability of sum_{i=1}^n f_i(X_i) for a stationary
finite chain:

  - exact_mgf:  pi' E_1 (P E_2) ... (P E_n) 1 with E_i = diag(e^{t f_i})
  - exact_tail: P_pi((1/n) sum f(X_i) > eps) by dynamic programming over
                (state, running sum), on the value lattice of f when it has one
"""
import logging
import math
from typing import Sequence, Union

import numpy as np

from src.markov import tolerances as tol
from src.markov.chain import FiniteChain, Observable
from src.markov.errors import DomainError, TooLarge
from src.markov.spectral import resolve_pi

logger = logging.getLogger(__name__)

Observables = Union[Observable, Sequence[Observable]]

# Larger level counts make the running-sum table too wide to be worth it
_MAX_LATTICE_LEVEL = 10_000


def _per_step_values(f: Observables, n: int) -> list:
    if isinstance(f, Observable):
        return [f.values] * n
    values = [g.values for g in f]
    if len(values) != n:
        raise DomainError(f"Expected {n} observables, got {len(values)}")
    return values


def exact_mgf(chain: FiniteChain, f: Observables, n: int, t: float, pi=None) -> float:
    """
    E_pi[exp(t sum_i f_i(X_i))] by n - 1 vector-matrix products.

    Args:
        f: one observable, or a sequence of n observables (time-varying)

    Once the running vector exceeds 1e300 it is rescaled and the scale
    accumulated in log-space.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    pi = resolve_pi(chain, pi)
    steps = _per_step_values(f, n)
    P = chain.transition

    v = pi * np.exp(t * steps[0])
    log_scale = 0.0
    rescaled = False
    for values in steps[1:]:
        v = (v @ P) * np.exp(t * values)
        top = float(np.max(v))
        if top > tol.OVERFLOW_GUARD:
            if not rescaled:
                logger.warning(f"exact_mgf: magnitude {top:.3e} exceeds guard; continuing in log-space")
                rescaled = True
            log_scale += math.log(top)
            v = v / top
    total = float(np.sum(v))
    if log_scale == 0.0:
        return total
    log_value = log_scale + math.log(total)
    return math.exp(log_value) if log_value < 709.0 else math.inf


# ---------------------------------------------------------------------------
# Tail probabilities
# ---------------------------------------------------------------------------
def _float_gcd(a: float, b: float, scale: float) -> float:
    while b > tol.LATTICE_TOL * scale:
        a, b = b, math.fmod(a, b)
    return a


def _lattice(values: np.ndarray):
    """
    Return (offset, step, levels) with values = offset + step * levels for
    nonnegative integer levels, or None if f has no such representation.
    """
    offset = float(values.min())
    shifted = values - offset
    # tolerances are relative to the range of f, whatever its units
    scale = float(shifted.max())
    nonzero = shifted[shifted > tol.LATTICE_TOL * scale]
    if scale == 0.0 or len(nonzero) == 0:
        return offset, 1.0, np.zeros(len(values), dtype=int)
    step = float(nonzero[0])
    for d in nonzero[1:]:
        step = _float_gcd(max(step, float(d)), min(step, float(d)), scale)
    levels = np.rint(shifted / step)
    if levels.max() > _MAX_LATTICE_LEVEL:
        return None
    if np.any(np.abs(levels * step - shifted) > tol.LATTICE_TOL * scale):
        return None
    return offset, step, levels.astype(int)


def _exceeds(total: np.ndarray, threshold: float, scale: float) -> np.ndarray:
    # ties at the threshold count as non-exceedance; scale is n * c
    return total - threshold > tol.LATTICE_TOL * scale


def _lattice_tail(P, pi, offset, step, levels, n, eps, scale) -> float:
    n_states = len(pi)
    width = n * int(levels.max()) + 1
    dist = np.zeros((n_states, width))
    dist[np.arange(n_states), levels] = pi
    for _ in range(n - 1):
        moved = P.T @ dist
        dist = np.zeros_like(moved)
        for y in range(n_states):
            k = int(levels[y])
            dist[y, k:] = moved[y, : width - k]
    mass = dist.sum(axis=0)
    totals = n * offset + step * np.arange(width)
    return float(mass[_exceeds(totals, n * eps, scale)].sum())


def _enumerated_tail(P, pi, values, n, eps, scale) -> float:
    """Paths expanded step by step; (state, sum) pairs with equal sums are merged."""
    n_states = len(pi)
    states = np.arange(n_states)
    sums = values.copy()
    probs = pi.copy()
    for _ in range(n - 1):
        probs = (probs[:, np.newaxis] * P[states, :]).ravel()
        sums = (sums[:, np.newaxis] + values[np.newaxis, :]).ravel()
        states = np.tile(np.arange(n_states), len(states))
        keep = probs > 0
        probs, sums, states = probs[keep], sums[keep], states[keep]
        keys = np.stack([states.astype(float), sums], axis=1)
        unique, inverse = np.unique(keys, axis=0, return_inverse=True)
        probs = np.bincount(inverse.ravel(), weights=probs, minlength=len(unique))
        states = unique[:, 0].astype(int)
        sums = unique[:, 1]
    return float(probs[_exceeds(sums, n * eps, scale)].sum())


def exact_tail(chain: FiniteChain, f: Observable, n: int, eps: float, pi=None) -> float:
    """
    P_pi((1/n) sum_{i=1}^n f(X_i) > eps), strict inequality.

    Lattice-valued f (values offset + k * step) is handled by dynamic
    programming over integer running sums; otherwise paths are enumerated,
    capped at n_states^n <= 2^30.

    Raises:
        TooLarge: non-lattice f beyond the enumeration cap
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if eps >= f.c:
        return 0.0
    pi = resolve_pi(chain, pi)
    P = chain.transition

    lattice = _lattice(f.values)
    if lattice is not None:
        offset, step, levels = lattice
        logger.debug(f"exact_tail: lattice step={step:.6g}, levels<={int(levels.max())}")
        return _lattice_tail(P, pi, offset, step, levels, n, eps, n * f.c)

    if n * math.log(chain.n_states) > math.log(tol.EXACT_TAIL_MAX_PATHS):
        raise TooLarge(chain.n_states, n)
    return _enumerated_tail(P, pi, f.values, n, eps, n * f.c)
