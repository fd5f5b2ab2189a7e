"""
Finite Markov Chains

Exact representation and validation of finite-state Markov chains:
  - FiniteChain: validated row-stochastic transition matrix
  - StationaryDist: the unique invariant distribution pi
  - Observable: a centered, bounded function f with pi(f) = 0

Also provides the pi-weighted geometry used everywhere else (inner product,
adjoint P*, additive reversiblization (P + P*)/2).
"""
import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import linalg

from src.markov import tolerances as tol
from src.markov.errors import (
    BoundTooSmall,
    DegenerateSupport,
    NegativeEntry,
    NonUniqueStationary,
    NotSquare,
    RowSumViolation,
    SingularSolve,
)

logger = logging.getLogger(__name__)


def _frozen(array) -> np.ndarray:
    out = np.array(array, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class FiniteChain:
    """Row-stochastic transition matrix on states 0..n_states-1."""

    transition: np.ndarray

    @property
    def n_states(self) -> int:
        return self.transition.shape[0]


@dataclass(frozen=True)
class StationaryDist:
    """Strictly positive invariant distribution of a FiniteChain."""

    pi: np.ndarray


@dataclass(frozen=True)
class Observable:
    """Centered bounded function: pi(values) = 0, |values| <= c, sigma2 = pi(f^2)."""

    values: np.ndarray
    c: float
    sigma2: float


def pi_vector(pi) -> np.ndarray:
    return pi.pi if isinstance(pi, StationaryDist) else np.asarray(pi, dtype=float)


def _check_support(pi: np.ndarray):
    low = int(np.argmin(pi))
    if pi[low] < tol.SUPPORT_FLOOR:
        raise DegenerateSupport(low, float(pi[low]))


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------
def validate_chain(matrix: Sequence[Sequence[float]]) -> FiniteChain:
    """
    Validate a transition matrix and wrap it as a FiniteChain.

    Args:
        matrix: n x n nested sequence or array of transition probabilities

    Returns:
        FiniteChain with read-only transition matrix

    Raises:
        NotSquare, NegativeEntry, RowSumViolation
    """
    P = np.asarray(matrix, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1] or P.shape[0] < 1:
        raise NotSquare(P.shape)

    negative = np.argwhere(P < 0)
    if len(negative):
        row, col = (int(i) for i in negative[0])
        raise NegativeEntry(row, col, float(P[row, col]))

    sums = P.sum(axis=1)
    bad = np.flatnonzero(np.abs(sums - 1.0) > tol.ROW_SUM_TOL)
    if len(bad):
        row = int(bad[0])
        raise RowSumViolation(row, float(sums[row]))

    return FiniteChain(transition=_frozen(P))


# ---------------------------------------------------------------------------
# Stationary distribution
# ---------------------------------------------------------------------------
def stationary(chain: FiniteChain) -> StationaryDist:
    """
    Solve pi' P = pi' for the unique stationary distribution.

    The eigenvalue-1 eigenspace of P' must be one-dimensional; the dense
    system (P' - I) with its last row replaced by the normalization row of
    ones is then solved by LU with partial pivoting.

    Raises:
        NonUniqueStationary: reducible chain (several closed classes)
        DegenerateSupport: some pi(x) below the support floor
    """
    P = chain.transition
    n = chain.n_states
    A = P.T - np.eye(n)

    kernel = linalg.null_space(A, rcond=tol.NULLSPACE_RCOND)
    if kernel.shape[1] != 1:
        raise NonUniqueStationary(kernel.shape[1])

    A[-1, :] = 1.0
    rhs = np.zeros(n)
    rhs[-1] = 1.0
    try:
        lu_piv = linalg.lu_factor(A, check_finite=True)
        pi = linalg.lu_solve(lu_piv, rhs)
    except (linalg.LinAlgError, ValueError) as e:
        raise SingularSolve(f"Stationary solve failed: {e}") from e

    residual = float(np.max(np.abs(pi @ P - pi)))
    logger.debug(f"Stationary solve: n={n}, residual={residual:.3e}")
    if residual > tol.STATIONARY_RESIDUAL_TOL:
        raise NonUniqueStationary(kernel.shape[1])

    _check_support(pi)
    pi = pi / pi.sum()
    return StationaryDist(pi=_frozen(pi))


# ---------------------------------------------------------------------------
# pi-weighted geometry
# ---------------------------------------------------------------------------
def weighted_inner(h1, h2, pi) -> float:
    """<h1, h2>_pi = sum_x pi(x) h1(x) h2(x)."""
    return float(np.sum(pi_vector(pi) * np.asarray(h1) * np.asarray(h2)))


def weighted_norm(h, pi) -> float:
    return float(np.sqrt(weighted_inner(h, h, pi)))


def adjoint(chain: FiniteChain, pi) -> np.ndarray:
    """
    Time reversal P*(x, y) = pi(y) P(y, x) / pi(x).

    Raises:
        DegenerateSupport
    """
    pi = pi_vector(pi)
    _check_support(pi)
    P = chain.transition
    return (P.T * pi[np.newaxis, :]) / pi[:, np.newaxis]


def additive_reversiblization(chain: FiniteChain, pi) -> np.ndarray:
    """R = (P + P*) / 2, self-adjoint in L2(pi)."""
    return 0.5 * (chain.transition + adjoint(chain, pi))


def detailed_balance_defect(chain: FiniteChain, pi) -> float:
    """max_{x,y} |pi(x) P(x,y) - pi(y) P(y,x)|."""
    flow = pi_vector(pi)[:, np.newaxis] * chain.transition
    return float(np.max(np.abs(flow - flow.T)))


def is_reversible(chain: FiniteChain, pi) -> bool:
    return detailed_balance_defect(chain, pi) <= tol.REVERSIBILITY_TOL


def projector(pi) -> np.ndarray:
    """Pi = 1 pi', the projection onto constants."""
    pi = pi_vector(pi)
    return np.outer(np.ones_like(pi), pi)


# ---------------------------------------------------------------------------
# Observables
# ---------------------------------------------------------------------------
def make_observable(raw, pi, c_opt: Optional[float] = None) -> Observable:
    """
    Center raw values under pi and attach a bound.

    Args:
        raw: per-state real values
        pi: stationary distribution (StationaryDist or probability vector)
        c_opt: declared bound; defaults to max|raw - pi(raw)|

    Returns:
        Observable with pi(values) = 0 and sigma2 = pi(values^2)

    Raises:
        BoundTooSmall: c_opt below max|values|
    """
    pi = pi_vector(pi)
    raw = np.asarray(raw, dtype=float)
    values = raw - float(pi @ raw)
    sup = float(np.max(np.abs(values)))

    if c_opt is None:
        c = sup
    else:
        c = float(c_opt)
        if c < sup - tol.CENTERING_TOL:
            raise BoundTooSmall(c, sup)

    sigma2 = float(pi @ (values * values))
    return Observable(values=_frozen(values), c=c, sigma2=sigma2)
