"""
León-Perron Operators

The León-Perron operator lam I + (1 - lam) Pi holds with probability lam and
otherwise resamples from the stationary law. For an observable taking
finitely many values, its tilted norm depends only on the pushforward of
pi through f, so every envelope here reduces to a k x k problem on the
value set:

  - lp_matrix / pushforward / discretize: the reduced chain and simple functions
  - lp_perturbed_norm: |||E^{ty/2} Q E^{ty/2}|||_mu on the value set
  - lemma31_bound: exp(g1(t) + g2(t)) envelope on that norm
  - mgf_envelope_timevarying / mgf_envelope_timeinvariant: product envelopes
    dominating the MGF of a chain with gap parameter lam (resp. lam_+ v 0)
"""
import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from src.bounds.inequalities import dependence_pole, g_components
from src.markov import tolerances as tol
from src.markov.chain import (
    FiniteChain,
    Observable,
    pi_vector,
    projector,
)
from src.markov.errors import DomainError, NoGap, OutOfBound, OutOfRange
from src.markov.spectral import (
    l2_gap,
    resolve_pi,
    right_gap,
    symmetric_eigvals,
    weighted_operator_norm,
)

logger = logging.getLogger(__name__)


def _frozen(array) -> np.ndarray:
    out = np.array(array, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class LeonPerronOp:
    """lam I + (1 - lam) 1 mu' with lam in [0, 1)."""

    lam: float
    mu: np.ndarray

    def __post_init__(self):
        if not (0.0 <= self.lam < 1.0):
            raise DomainError(f"León-Perron lam must lie in [0, 1), got {self.lam}")
        mu = np.asarray(self.mu, dtype=float)
        if np.any(mu < 0) or abs(mu.sum() - 1.0) > tol.ROW_SUM_TOL:
            raise DomainError("León-Perron mu must be a probability vector")
        object.__setattr__(self, "mu", _frozen(mu))


@dataclass(frozen=True)
class SimpleFunction:
    """Finitely-valued centered function: values y_j with weights mu_j and |y_j| <= c."""

    values: np.ndarray
    weights: np.ndarray
    c: float

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if values.shape != weights.shape:
            raise DomainError("values and weights must have the same length")
        if np.any(weights < 0) or abs(weights.sum() - 1.0) > tol.ROW_SUM_TOL:
            raise DomainError("weights must form a probability vector")
        sup = float(np.max(np.abs(values)))
        if sup > self.c * (1.0 + tol.CENTERING_TOL):
            raise OutOfBound(sup, self.c)
        mean = float(weights @ values)
        if abs(mean) > tol.CENTERING_TOL * max(1.0, self.c):
            raise DomainError(f"SimpleFunction must be centered, mean={mean:.3e}")
        object.__setattr__(self, "values", _frozen(values))
        object.__setattr__(self, "weights", _frozen(weights))

    @property
    def sigma2(self) -> float:
        return float(self.weights @ (self.values * self.values))


# ---------------------------------------------------------------------------
# Reduced chains
# ---------------------------------------------------------------------------
def lp_matrix(lam: float, mu) -> FiniteChain:
    """k x k matrix lam I + (1 - lam) 1 mu'; reversible with stationary law mu."""
    op = LeonPerronOp(lam=lam, mu=mu)
    k = len(op.mu)
    return FiniteChain(transition=_frozen(op.lam * np.eye(k) + (1.0 - op.lam) * projector(op.mu)))


def leon_perron_version(chain: FiniteChain, pi=None) -> FiniteChain:
    """lam(P) I + (1 - lam(P)) Pi on the chain's own state space."""
    pi = resolve_pi(chain, pi)
    lam = l2_gap(chain, pi)
    if lam >= tol.NO_GAP_THRESHOLD:
        raise NoGap(lam)
    return lp_matrix(lam, pi)


def right_leon_perron_version(chain: FiniteChain, pi=None) -> FiniteChain:
    """(lam_+ v 0) I + (1 - lam_+ v 0) Pi, the operator of the time-invariant envelope."""
    pi = resolve_pi(chain, pi)
    lam_plus = right_gap(chain, pi)
    if lam_plus >= tol.NO_GAP_THRESHOLD:
        raise NoGap(lam_plus)
    return lp_matrix(max(lam_plus, 0.0), pi)


def pushforward(pi, f: Observable) -> SimpleFunction:
    """
    Law of f(X) under pi: distinct values y_j (first-appearance order) with
    weights mu_j = pi({x : f(x) = y_j}).

    Values within 1e-14 of an earlier value are merged into it.
    """
    pi = pi_vector(pi)
    support = []
    weights = []
    for value, mass in zip(f.values, pi):
        for j, existing in enumerate(support):
            if abs(existing - value) <= tol.PUSHFORWARD_MERGE_TOL:
                weights[j] += mass
                break
        else:
            support.append(float(value))
            weights.append(float(mass))
    weights = np.asarray(weights)
    return SimpleFunction(values=np.asarray(support), weights=weights / weights.sum(), c=f.c)


def discretize_grid(values, c: float, k: int) -> np.ndarray:
    """
    f_k = ceil((f + c) / (c/3k)) (c/3k) - c, before centering.

    Exact grid points map to themselves, so f_k stays within [-c, c].
    """
    step = c / (3.0 * k)
    ratio = (np.asarray(values, dtype=float) + c) / step
    nearest = np.round(ratio)
    # grid hits that float division pushed just past an integer
    ratio = np.where(np.abs(ratio - nearest) <= tol.LATTICE_TOL, nearest, ratio)
    index = np.minimum(np.ceil(ratio), 6 * k)
    return index * step - c


def discretize(values, weights, c: float, k: int) -> SimpleFunction:
    """
    Round values up to the grid of mesh c/(3k), then center and shrink:

        f_k = ceil((f + c) / (c/3k)) (c/3k) - c
        f~_k = (f_k - pi(f_k)) / (1 + 1/(3k))

    The output keeps one value per input sample and satisfies
    sup|f~_k| <= c, pi(f~_k) = 0 and sup|f~_k - f| < c/k.

    Raises:
        OutOfBound: some |value| > c
        DomainError: k < 1
    """
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    values = np.asarray(values, dtype=float)
    weights = np.asarray(weights, dtype=float)
    sup = float(np.max(np.abs(values)))
    if sup > c:
        raise OutOfBound(sup, c)

    rounded = discretize_grid(values, c, k)

    centered = rounded - float(weights @ rounded) / float(weights.sum())
    shrunk = centered / (1.0 + 1.0 / (3.0 * k))
    return SimpleFunction(values=shrunk, weights=weights / weights.sum(), c=c)


# ---------------------------------------------------------------------------
# Tilted norms and envelopes
# ---------------------------------------------------------------------------
def lp_perturbed_norm(lam: float, simple: SimpleFunction, t: float) -> float:
    """
    |||E^{ty/2} Q E^{ty/2}|||_mu for Q = lam I + (1 - lam) 1 mu'.

    In symmetric coordinates the tilted operator is
    lam diag(e^{ty}) + (1 - lam) w w' with w = sqrt(mu) e^{ty/2}.
    """
    LeonPerronOp(lam=lam, mu=simple.weights)
    tilt = np.exp(t * simple.values)
    w = np.sqrt(simple.weights) * np.exp(0.5 * t * simple.values)
    S = lam * np.diag(tilt) + (1.0 - lam) * np.outer(w, w)
    return float(symmetric_eigvals(S)[-1])


def state_space_perturbed_norm(pi, lam: float, f: Observable, t: float) -> float:
    """
    pi-weighted norm of E^{tf/2} P E^{tf/2} with P = lam I + (1 - lam) Pi built
    on the original state space.
    """
    if isinstance(pi, FiniteChain):
        pi = resolve_pi(pi, None)
    pi = pi_vector(pi)
    n = len(pi)
    P = lam * np.eye(n) + (1.0 - lam) * projector(pi)
    half = np.exp(0.5 * t * f.values)
    tilted = half[:, np.newaxis] * P * half[np.newaxis, :]
    return weighted_operator_norm(tilted, pi)


def lemma31_bound(t: float, sigma2: float, c: float, lam: float) -> float:
    """
    exp((sigma2/c^2)(e^{tc} - 1 - tc) + sigma2 lam t^2 / (1 - lam - 5ct)),
    dominating lp_perturbed_norm for any simple function with variance sigma2.

    Raises:
        OutOfRange: t outside [0, (1 - lam)/(5c))
    """
    upper = dependence_pole(c, lam)
    if not (0.0 <= t < upper):
        raise OutOfRange(t, upper)
    g1, g2 = g_components(t, sigma2, c, lam)
    return math.exp(g1 + g2)


def lemma31_discretized_bound(t: float, sigma2_k: float, c: float, lam: float, k: int) -> float:
    """Finite-k envelope exp(ct/k + g1(t) + g2(t)) for the k-th discretization."""
    upper = dependence_pole(c, lam)
    if not (0.0 <= t < upper):
        raise OutOfRange(t, upper)
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    g1, g2 = g_components(t, sigma2_k, c, lam)
    return math.exp(c * t / k + g1 + g2)


def mgf_envelope_timevarying(
    lam: float, observables: Sequence[Observable], pi, t: float
) -> float:
    """
    prod_i lp_perturbed_norm(lam, pushforward(pi, f_i), t), which dominates
    E_pi[exp(t sum_i f_i(X_i))] for any chain with lam(P) <= lam.
    """
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    pi = pi_vector(pi)
    log_total = 0.0
    for f in observables:
        log_total += math.log(lp_perturbed_norm(lam, pushforward(pi, f), t))
    return math.exp(log_total)


def mgf_envelope_timeinvariant(chain: FiniteChain, f: Observable, n: int, t: float, pi=None) -> float:
    """|||E^{tf/2} R_+ E^{tf/2}|||_pi^n with R_+ = right_leon_perron_version(chain)."""
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    pi = resolve_pi(chain, pi)
    lam_plus = right_gap(chain, pi)
    if lam_plus >= tol.NO_GAP_THRESHOLD:
        raise NoGap(lam_plus)
    norm = lp_perturbed_norm(max(lam_plus, 0.0), pushforward(pi, f), t)
    logger.debug(f"time-invariant envelope: lam_plus={lam_plus:.6f}, norm={norm:.12f}")
    return norm ** n
