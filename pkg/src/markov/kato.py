"""
Kato Perturbation Series

Power-series expansion of the largest eigenvalue beta(t) of P E^{tf} for a
reversible finite chain:

    beta(t) = beta_0 + beta_1 t + beta_2 t^2 + ...,  beta_0 = 1, beta_1 = 0,
    beta_2 = sigma2_asy / 2

with

    beta_n = sum_{p=1}^{n} (1/p) sum_{v, k} -tr(P D^{v_1} Z^{(k_1)} ... P D^{v_p} Z^{(k_p)}) / (v_1! ... v_p!)

where v runs over compositions of n into p positive parts, k over
compositions of p - 1 into p nonnegative parts, D = diag(f),
Z^{(0)} = -Pi and Z^{(k)} = Z^k.

Also provides the coefficient bound used to majorize beta(t), the
combinatorial weight sum_p (1/p) C(n-1, p-1) C(2p-2, p-1) <= 5^{n-2}, and
the resulting eigenvalue envelope.
"""
import logging
import math
from fractions import Fraction
from functools import lru_cache
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.bounds.inequalities import bennett_log_mgf, dependence_pole
from src.markov import tolerances as tol
from src.markov.chain import (
    FiniteChain,
    Observable,
    detailed_balance_defect,
    is_reversible,
    projector,
)
from src.markov.errors import (
    DomainError,
    NegativeLambdaPlus,
    NotReversible,
    OrderTooHigh,
    OutOfRange,
)
from src.markov.spectral import (
    resolve_pi,
    symmetric_eigvals,
    l2_gap,
    reduced_resolvent,
    right_gap,
)

logger = logging.getLogger(__name__)


class KatoSeries(BaseModel):
    """Coefficients beta_0..beta_N of the eigenvalue expansion."""

    model_config = ConfigDict(frozen=True)

    coefficients: List[float] = Field(..., description="beta_0 .. beta_N")
    order: int = Field(..., description="N", ge=0, le=tol.MAX_KATO_ORDER)
    t0_lower: float = Field(..., description="Lower bound on the convergence radius", gt=0.0)


# ---------------------------------------------------------------------------
# Oracle: the tilted eigenvalue itself
# ---------------------------------------------------------------------------
def _require_reversible(chain: FiniteChain, pi: np.ndarray):
    if not is_reversible(chain, pi):
        raise NotReversible(detailed_balance_defect(chain, pi))


def eigencurve(chain: FiniteChain, f: Observable, t: float, pi=None) -> float:
    """
    Largest eigenvalue of P diag(e^{t f}).

    Evaluated on the symmetric matrix E^{tf/2} D^{1/2} P D^{-1/2} E^{tf/2},
    which is similar to P E^{tf}; by Perron-Frobenius its top eigenvalue
    equals |||E^{tf/2} P E^{tf/2}|||_pi.

    Raises:
        NotReversible, EigensolverFailure
    """
    pi = resolve_pi(chain, pi)
    _require_reversible(chain, pi)
    root = np.sqrt(pi)
    half = np.exp(0.5 * t * f.values)
    S = root[:, np.newaxis] * chain.transition / root[np.newaxis, :]
    tilted = half[:, np.newaxis] * S * half[np.newaxis, :]
    return float(symmetric_eigvals(tilted)[-1])


# ---------------------------------------------------------------------------
# Composition enumeration
# ---------------------------------------------------------------------------
@lru_cache(maxsize=None)
def _compositions(total: int, parts: int, minimum: int) -> Tuple[Tuple[int, ...], ...]:
    """All ordered tuples of `parts` integers >= minimum summing to `total`."""
    if parts == 0:
        return ((),) if total == 0 else ()
    out = []
    for first in range(minimum, total - minimum * (parts - 1) + 1):
        for rest in _compositions(total - first, parts - 1, minimum):
            out.append((first,) + rest)
    return tuple(out)


def kato_coefficients(chain: FiniteChain, f: Observable, order: int, pi=None) -> KatoSeries:
    """
    Compute beta_0..beta_N by direct enumeration of the Kato sum.

    Args:
        chain: reversible chain with a spectral gap
        f: centered observable
        order: N <= 8

    Raises:
        OrderTooHigh, NoGap, NotReversible
    """
    if order > tol.MAX_KATO_ORDER:
        raise OrderTooHigh(order, tol.MAX_KATO_ORDER)
    if order < 0:
        raise DomainError(f"order must be >= 0, got {order}")

    pi = resolve_pi(chain, pi)
    _require_reversible(chain, pi)
    Z = reduced_resolvent(chain, pi).Z
    P = chain.transition

    # P D^v / v! and Z^{(k)} lookup tables
    tilt = {
        v: P * (f.values ** v)[np.newaxis, :] / math.factorial(v)
        for v in range(1, order + 1)
    }
    resolvent_powers = {0: -projector(pi)}
    for k in range(1, order):
        resolvent_powers[k] = np.linalg.matrix_power(Z, k)

    coefficients = [1.0]
    for n in range(1, order + 1):
        beta = 0.0
        for p in range(1, n + 1):
            partial = 0.0
            for v in _compositions(n, p, 1):
                for k in _compositions(p - 1, p, 0):
                    product = tilt[v[0]] @ resolvent_powers[k[0]]
                    for j in range(1, p):
                        product = product @ tilt[v[j]] @ resolvent_powers[k[j]]
                    partial -= float(np.trace(product))
            beta += partial / p
        coefficients.append(beta)
        logger.debug(f"beta_{n} = {beta:.12e}")

    lam_plus = max(right_gap(chain, pi), 0.0)
    t0 = convergence_radius(f.c, lam_plus) if f.c > 0 else math.inf
    return KatoSeries(coefficients=coefficients, order=order, t0_lower=t0)


def kato_partial_sum(series: KatoSeries, t: float) -> float:
    """Truncated series sum_{n <= N} beta_n t^n."""
    total = 0.0
    for n in range(series.order, -1, -1):
        total = total * t + series.coefficients[n]
    return total


# ---------------------------------------------------------------------------
# Coefficient bounds
# ---------------------------------------------------------------------------
def combinatorial_weight(n: int) -> Fraction:
    """
    sum_{p=1}^{n} (1/p) C(n-1, p-1) C(2p-2, p-1), in exact arithmetic.

    Raises:
        DomainError: n < 3
    """
    if n < 3:
        raise DomainError(f"combinatorial_weight requires n >= 3, got {n}")
    weight = sum(
        Fraction(math.comb(n - 1, p - 1) * math.comb(2 * p - 2, p - 1), p)
        for p in range(1, n + 1)
    )
    if weight > 5 ** (n - 2):
        logger.error(f"combinatorial_weight({n}) = {weight} exceeds 5^{n - 2}")
    return weight


def coefficient_bound(chain: FiniteChain, f: Observable, n: int, pi=None) -> float:
    """
    Upper bound on |beta_n|:

        n >= 3: |pi(f^n)|/n! + (sigma2 |||P - Pi||| / 5c) (5c / (1 - lambda_+))^{n-1}
        n  = 2: sigma2/2 + |||P - Pi||| sigma2 / (1 - lambda_+)

    Raises:
        NegativeLambdaPlus, DomainError
    """
    if n < 2:
        raise DomainError(f"coefficient_bound requires n >= 2, got {n}")
    pi = resolve_pi(chain, pi)
    lam_plus = right_gap(chain, pi)
    if lam_plus < 0:
        raise NegativeLambdaPlus(lam_plus)
    norm = l2_gap(chain, pi)
    sigma2, c = f.sigma2, f.c

    if n == 2:
        return sigma2 / 2.0 + norm * sigma2 / (1.0 - lam_plus)

    moment = abs(float(np.sum(pi * f.values ** n))) / math.factorial(n)
    if c == 0:
        return moment
    return moment + (sigma2 * norm / (5.0 * c)) * (5.0 * c / (1.0 - lam_plus)) ** (n - 1)


def convergence_radius(c: float, lam_plus: float) -> float:
    """t0 >= (1 - lambda_+) / ((3 - lambda_+) c)."""
    if not (0.0 <= lam_plus < 1.0) or c <= 0:
        raise DomainError(f"convergence_radius needs lambda_+ in [0, 1) and c > 0 (got {lam_plus}, {c})")
    return (1.0 - lam_plus) / ((3.0 - lam_plus) * c)


def lemma33_bound(
    t: float, sigma2: float, c: float, lam_plus: float, norm_p_minus_pi: float
) -> float:
    """
    Envelope on the tilted eigenvalue of a reversible chain:

        exp((sigma2/c^2)(e^{tc} - 1 - tc) + sigma2 |||P - Pi||| t^2 / (1 - lambda_+ - 5ct))

    Raises:
        NegativeLambdaPlus, DomainError, OutOfRange
    """
    if lam_plus < 0:
        raise NegativeLambdaPlus(lam_plus)
    if lam_plus >= 1.0 or c <= 0:
        raise DomainError(f"lemma33_bound needs lambda_+ < 1 and c > 0 (got {lam_plus}, {c})")
    upper = dependence_pole(c, lam_plus)
    if not (0.0 <= t < upper):
        raise OutOfRange(t, upper)
    exponent = bennett_log_mgf(t, sigma2, c) + sigma2 * norm_p_minus_pi * t * t / (
        1.0 - lam_plus - 5.0 * c * t
    )
    return math.exp(exponent)
