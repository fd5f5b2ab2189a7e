"""
Fenchel Conjugates and Chernoff Optimization

The tail exponent of an MGF envelope g is its Fenchel conjugate
g*(eps) = sup_t {t eps - g(t)}. For g = g1 + g2:

  - g1*(eps) = (sigma2/c^2) h1(c eps / sigma2),       h1(u) = (1 + u) log(1 + u) - u
  - g2*(eps) = (1 - lam) eps^2 / (2 lam sigma2 h2(u)), h2(u) = sqrt(1 + u) + u/2 + 1,
                                                       u = 5 c eps / (lam sigma2)
  - (g1 + g2)* is the infimal convolution inf_{e1 + e2 = eps} g1*(e1) + g2*(e2)

Numeric conjugation uses scipy's bounded scalar minimizer (golden-section
with parabolic steps) on the concave objective t eps - g(t).
"""
import logging
import math
from typing import Callable, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from src.bounds.inequalities import (
    Variant,
    bennett_rate,
    dependence_pole,
    effective_gap,
    g_components,
    variant_gap,
)
from src.bounds.schemas import BoundQuery, BoundValue
from src.markov import tolerances as tol
from src.markov.errors import DomainError, NonConcaveDetected

logger = logging.getLogger(__name__)

# Interior grid used to confirm the optimizer found the global maximum
_SCAN_POINTS = 33
# Keep the search strictly inside the g2 pole
_POLE_SHRINK = 1.0 - 1e-9


def _dependence_rate(u: float) -> float:
    """h2(u) = sqrt(1 + u) + u/2 + 1."""
    return math.sqrt(1.0 + u) + 0.5 * u + 1.0


def _g1_star(eps: float, sigma2: float, c: float) -> float:
    if eps == 0.0:
        return 0.0
    if sigma2 == 0.0:
        return math.inf
    return sigma2 / (c * c) * bennett_rate(c * eps / sigma2)


def _g2_star(eps: float, sigma2: float, c: float, lam: float) -> float:
    if eps == 0.0:
        return 0.0
    if sigma2 == 0.0:
        return math.inf
    u = 5.0 * c * eps / (lam * sigma2)
    return (1.0 - lam) * eps * eps / (2.0 * lam * sigma2 * _dependence_rate(u))


def fenchel_numeric(g: Callable[[float], float], eps: float, t_max: float) -> float:
    """
    sup over t in (0, t_max) of t eps - g(t).

    Args:
        g: convex evaluator with g(0) = 0, finite on [0, t_max)
        eps: slope
        t_max: right end of the search interval

    Returns:
        Conjugate value (>= 0)

    Raises:
        NonConcaveDetected: a scan point beats the located maximum, or the
            objective is not finite on the interval
    """
    if t_max <= 0:
        raise DomainError(f"t_max must be > 0, got {t_max}")

    def negated(t: float) -> float:
        return g(t) - t * eps

    result = minimize_scalar(
        negated,
        bounds=(0.0, t_max),
        method="bounded",
        options={"xatol": tol.CONJUGATE_XATOL_FACTOR * t_max, "maxiter": 1000},
    )
    best = -float(result.fun)
    best_t = float(result.x)
    if not math.isfinite(best):
        raise NonConcaveDetected(f"Objective not finite at t={best_t}")

    grid = np.linspace(0.0, t_max, _SCAN_POINTS + 2)[1:-1]
    scan = np.array([-negated(float(t)) for t in grid])
    if np.any(np.isnan(scan)):
        raise NonConcaveDetected("Objective is NaN on the search interval")
    top = int(np.argmax(scan))
    if scan[top] > best + 1e-9 * max(1.0, abs(best)):
        raise NonConcaveDetected(
            f"Scan point t={grid[top]:.6e} beats optimizer result ({scan[top]:.6e} > {best:.6e})"
        )
    best = max(best, float(scan[top]))
    logger.debug(f"fenchel_numeric: eps={eps:.6e}, t*={best_t:.6e}, value={best:.6e}")
    return max(best, 0.0)


def conjugate_closed_forms(
    eps1: float, eps2: float, sigma2: float, c: float, lam: float, cross_check: bool = True
) -> Tuple[float, float]:
    """
    Closed-form (g1*(eps1), g2*(eps2)).

    With cross_check, g2* is compared to numeric conjugation of g2 on
    (0, (1 - lam)/(5c)); a relative disagreement above 1e-6 is logged and
    the numeric value is returned instead.

    Below the zero-gap threshold g2 vanishes, so g2*(eps2) is 0 at eps2 = 0
    and +inf otherwise.

    Raises:
        DomainError: negative eps, or lam outside [0, 1)
    """
    if eps1 < 0 or eps2 < 0:
        raise DomainError(f"eps1, eps2 must be >= 0 (got {eps1}, {eps2})")
    if not (0.0 <= lam < 1.0):
        raise DomainError(f"g2* requires lam in [0, 1), got {lam}")

    g1_star = _g1_star(eps1, sigma2, c)
    if lam < tol.ZERO_GAP_TOL:
        return g1_star, (0.0 if eps2 == 0.0 else math.inf)
    g2_star = _g2_star(eps2, sigma2, c, lam)

    if cross_check and eps2 > 0 and sigma2 > 0:
        numeric = fenchel_numeric(
            lambda t: g_components(t, sigma2, c, lam)[1],
            eps2,
            dependence_pole(c, lam) * _POLE_SHRINK,
        )
        if abs(numeric - g2_star) > tol.CONJUGATE_DISCREPANCY_TOL * max(abs(numeric), 1e-300):
            logger.warning(
                f"g2* closed form {g2_star:.10e} disagrees with numeric {numeric:.10e}; using numeric"
            )
            g2_star = numeric
    return g1_star, g2_star


def chernoff_optimize(query: BoundQuery, variant: Variant = "thm11") -> BoundValue:
    """
    exp(-n sup_t {t eps - g1(t) - g2(t)}), the optimized Chernoff bound
    that tail_bound relaxes.

    At lam_bar = 0 the supremum is the Bennett exponent in closed form.

    Raises:
        NoGap, DomainError
    """
    lam = effective_gap(variant_gap(query, variant), variant)
    eps, sigma2, c = query.eps, query.sigma2, query.c
    kind = f"chernoff_{variant}"

    if lam == 0.0:
        exponent = _g1_star(eps, sigma2, c)
        if math.isinf(exponent):
            return BoundValue(probability_bound=0.0, exponent=math.inf, n=query.n, kind=kind)
        return BoundValue.from_exponent(exponent, query.n, kind)

    exponent = fenchel_numeric(
        lambda t: sum(g_components(t, sigma2, c, lam)),
        eps,
        dependence_pole(c, lam) * _POLE_SHRINK,
    )
    return BoundValue.from_exponent(exponent, query.n, kind)


def infimal_convolution(eps: float, sigma2: float, c: float, lam: float) -> float:
    """
    (g1 + g2)*(eps) = inf over eps1 + eps2 = eps of g1*(eps1) + g2*(eps2).

    The split eps1 is located by bounded scalar minimization; both
    endpoints are also evaluated.
    """
    if eps <= 0:
        raise DomainError(f"eps must be > 0, got {eps}")
    if lam < tol.ZERO_GAP_TOL:
        return _g1_star(eps, sigma2, c)

    def split_cost(eps1: float) -> float:
        return _g1_star(eps1, sigma2, c) + _g2_star(eps - eps1, sigma2, c, lam)

    result = minimize_scalar(
        split_cost,
        bounds=(0.0, eps),
        method="bounded",
        options={"xatol": tol.CONJUGATE_XATOL_FACTOR * eps, "maxiter": 1000},
    )
    return float(min(result.fun, split_cost(0.0), split_cost(eps)))


def infimal_lower_bound(eps: float, sigma2: float, c: float, lam: float) -> float:
    """
    Closed lower bound on (g1 + g2)*(eps):

        lam > 0: eps^2 / (2 ((1 + lam)/(1 - lam) sigma2 + 5 c eps / (1 - lam)))
        lam = 0: eps^2 / (2 (sigma2 + c eps / 3))
    """
    if lam < tol.ZERO_GAP_TOL:
        return eps * eps / (2.0 * (sigma2 + c * eps / 3.0))
    return eps * eps / (
        2.0 * ((1.0 + lam) / (1.0 - lam) * sigma2 + 5.0 * c * eps / (1.0 - lam))
    )
