"""
Bernstein-Type Inequalities for Markov Chains

Closed-form evaluators for the MGF envelopes and tail bounds of stationary
chains with an L2 (thm11) or right L2 (thm12) spectral gap, the classical
independent-case inequalities they reduce to, and the variance-proxy
comparison table.

Envelope exponent per step:
  - g1(t) = (sigma2/c^2)(e^{tc} - 1 - tc)            (Bennett term)
  - g2(t) = sigma2 lam t^2 / (1 - lam - 5ct)         (dependence term, +inf past the pole)

Tail bound: exp(-n eps^2 / (2 (A1 sigma2 + A2 c eps))) with
A1 = (1 + lam)/(1 - lam) and A2 = 1/3 at lam = 0, 5/(1 - lam) otherwise.
"""
import logging
import math
from typing import Literal, Tuple

import numpy as np
import pandas as pd

from src.bounds.schemas import BoundQuery, BoundValue
from src.markov import tolerances as tol
from src.markov.errors import DomainError, NoGap, OutOfRange

logger = logging.getLogger(__name__)

Variant = Literal["thm11", "thm12"]
ClassicalKind = Literal["hoeffding", "bennett", "bernstein"]


# ---------------------------------------------------------------------------
# Envelope components
# ---------------------------------------------------------------------------
def bennett_log_mgf(t: float, sigma2: float, c: float) -> float:
    """g1(t) = (sigma2/c^2)(e^{tc} - 1 - tc)."""
    x = t * c
    return sigma2 / (c * c) * (math.expm1(x) - x)


def dependence_pole(c: float, lam: float) -> float:
    """Pole (1 - lam)/(5c) of the dependence term g2."""
    return (1.0 - lam) / (5.0 * c)


def effective_gap(gap_param: float, variant: Variant) -> float:
    """
    lam_bar: lambda itself for thm11, lambda_+ v 0 for thm12.

    Values below the zero-gap threshold collapse to exactly 0 so that the
    A2 = 1/3 branch applies.
    """
    if variant == "thm11":
        lam = gap_param
    elif variant == "thm12":
        lam = max(gap_param, 0.0)
    else:
        raise DomainError(f"Unknown variant: {variant}")
    if lam < tol.ZERO_GAP_TOL:
        return 0.0
    if lam >= tol.NO_GAP_THRESHOLD:
        raise NoGap(gap_param)
    return lam


def g_components(t: float, sigma2: float, c: float, lam: float) -> Tuple[float, float]:
    """
    Return (g1(t), g2(t)).

    For lam > 0, g2 is +inf at and beyond the pole t = (1 - lam)/(5c).
    At lam = 0 there is no dependence term: g2 is 0 for every t and has no
    pole, matching the Bennett closed forms used by the conjugates.
    """
    g1 = bennett_log_mgf(t, sigma2, c)
    if lam == 0.0:
        return g1, 0.0
    if t >= dependence_pole(c, lam):
        return g1, math.inf
    return g1, sigma2 * lam * t * t / (1.0 - lam - 5.0 * c * t)


def mgf_bound(
    n: int, t: float, sigma2: float, c: float, gap_param: float, variant: Variant = "thm11"
) -> float:
    """
    E_pi[exp(t sum f_i(X_i))] <= exp(n (g1(t) + g2(t))).

    Raises:
        NoGap: lam_bar at or above the no-gap threshold
        OutOfRange: t outside [0, (1 - lam_bar)/(5c))
    """
    lam = effective_gap(gap_param, variant)
    upper = dependence_pole(c, lam)
    if not (0.0 <= t < upper):
        raise OutOfRange(t, upper)
    g1, g2 = g_components(t, sigma2, c, lam)
    return math.exp(n * (g1 + g2))


# ---------------------------------------------------------------------------
# Tail bounds
# ---------------------------------------------------------------------------
def bernstein_exponent(eps: float, sigma2: float, c: float) -> float:
    """eps^2 / (2 (sigma2 + c eps / 3))."""
    return eps * eps / (2.0 * (sigma2 + c * eps / 3.0))


def bennett_rate(u: float) -> float:
    """h1(u) = (1 + u) log(1 + u) - u."""
    return (1.0 + u) * math.log1p(u) - u


def variant_gap(query: BoundQuery, variant: Variant) -> float:
    """Pick the gap parameter a variant needs from the query."""
    gap = query.lam if variant == "thm11" else query.lam_plus
    if gap is None:
        needed = "lam" if variant == "thm11" else "lam_plus"
        raise DomainError(f"Variant {variant} requires {needed}")
    return gap


def tail_bound(query: BoundQuery, variant: Variant = "thm11") -> BoundValue:
    """
    P_pi(sum f_i(X_i) / n > eps) <= exp(-n eps^2 / (2 (A1 sigma2 + A2 c eps))).

    At lam_bar = 0 this is exactly the classical Bernstein inequality.

    Raises:
        NoGap, DomainError
    """
    lam = effective_gap(variant_gap(query, variant), variant)
    eps, sigma2, c = query.eps, query.sigma2, query.c
    if lam == 0.0:
        exponent = bernstein_exponent(eps, sigma2, c)
    else:
        a1 = (1.0 + lam) / (1.0 - lam)
        a2 = 5.0 / (1.0 - lam)
        exponent = eps * eps / (2.0 * (a1 * sigma2 + a2 * c * eps))
    logger.debug(f"tail_bound[{variant}]: lam_bar={lam}, exponent={exponent:.6e}")
    return BoundValue.from_exponent(exponent, query.n, variant)


def classical_bound(
    kind: ClassicalKind, n: int, eps: float, sigma2: float, c: float
) -> BoundValue:
    """
    Independent-case inequalities.

      hoeffding: exp(-n eps^2 / (2 c^2))
      bennett:   exp(-n (sigma2/c^2) h1(c eps / sigma2))
      bernstein: exp(-n eps^2 / (2 (sigma2 + c eps / 3)))

    Bennett with sigma2 = 0 returns the limit: probability 0 for eps > 0.
    """
    if eps <= 0:
        raise DomainError(f"eps must be > 0, got {eps}")
    if kind == "hoeffding":
        exponent = eps * eps / (2.0 * c * c)
    elif kind == "bennett":
        if sigma2 == 0.0:
            logger.debug("bennett with zero variance: returning the zero-probability limit")
            return BoundValue(probability_bound=0.0, exponent=math.inf, n=n, kind=kind)
        exponent = sigma2 / (c * c) * bennett_rate(c * eps / sigma2)
    elif kind == "bernstein":
        exponent = bernstein_exponent(eps, sigma2, c)
    else:
        raise DomainError(f"Unknown inequality: {kind}")
    return BoundValue.from_exponent(exponent, n, kind)


# ---------------------------------------------------------------------------
# Variance proxies
# ---------------------------------------------------------------------------
def envelope_variance_proxy(sigma2: float, c: float, gap_param: float) -> float:
    """V = 2 lim_{t -> 0} (g1 + g2)(t) / t^2 = sigma2 (1 + lam)/(1 - lam)."""
    if gap_param >= tol.NO_GAP_THRESHOLD:
        raise NoGap(gap_param)
    return sigma2 * (1.0 + gap_param) / (1.0 - gap_param)


PAULIN_320_NOTE = (
    "sigma2_asy replaced by its reversible worst case (1 + lam_+)/(1 - lam_+) sigma2"
)


def proxy_table(sigma2: float, c: float, lam: float, lam_plus: float) -> pd.DataFrame:
    """
    Variance proxies of Hoeffding/Bernstein/Bennett/Chernoff-type inequalities.

    Rows with setting "time-dependent" compare bounds for f_i varying with
    i (uses lam); rows with setting "time-independent" compare bounds for a
    single f (uses lam_+ v 0).

    Returns:
        DataFrame with columns setting, type, reference, condition,
        variance_proxy, note
    """
    if not (0.0 <= lam < 1.0):
        raise DomainError(f"lam must lie in [0, 1), got {lam}")
    if not (-1.0 <= lam_plus < 1.0):
        raise DomainError(f"lam_plus must lie in [-1, 1), got {lam_plus}")

    lp = max(lam_plus, 0.0)
    ratio = (1.0 + lam) / (1.0 - lam)
    ratio_plus = (1.0 + lp) / (1.0 - lp)
    c2 = c * c

    rows = [
        ("time-dependent", "Hoeffding", "Hoeffding (1963)", "independent", c2, ""),
        ("time-dependent", "Hoeffding", "Fan et al. (2018)", "general-state-space", ratio * c2, ""),
        ("time-dependent", "Bernstein", "Bernstein (1946)", "independent", sigma2, ""),
        ("time-dependent", "Bennett", "Bennett (1962)", "independent", sigma2, ""),
        ("time-dependent", "Bernstein", "Paulin (2015), (3.22)", "finite-state-space, reversible",
         4.0 * sigma2 / (1.0 - lam * lam), ""),
        ("time-dependent", "Bernstein", "Markov Bernstein (lambda)", "general-state-space", ratio * sigma2, ""),
        ("time-independent", "Hoeffding", "Hoeffding (1963)", "independent", c2, ""),
        ("time-independent", "Hoeffding", "Leon and Perron (2004)", "finite-state-space, reversible",
         ratio_plus * c2, ""),
        ("time-independent", "Hoeffding", "Miasojedow (2014)", "general-state-space", ratio * c2, ""),
        ("time-independent", "Hoeffding", "Fan et al. (2018)", "general-state-space", ratio_plus * c2, ""),
        ("time-independent", "Bernstein", "Bernstein (1946)", "independent", sigma2, ""),
        ("time-independent", "Bennett", "Bennett (1962)", "independent", sigma2, ""),
        ("time-independent", "Chernoff", "Lezaud (1998), (1)", "finite-state-space, reversible",
         2.0 * sigma2 / (1.0 - lp), ""),
        ("time-independent", "Chernoff", "Lezaud (1998), (13)", "general-state-space",
         4.0 * sigma2 / (1.0 - lam), ""),
        ("time-independent", "Bernstein", "Paulin (2015), (3.20)", "finite-state-space, reversible",
         (ratio_plus + 0.8) * sigma2, PAULIN_320_NOTE),
        ("time-independent", "Bernstein", "Paulin (2015), (3.21)", "finite-state-space, reversible",
         2.0 * sigma2 / (1.0 - lp), ""),
        ("time-independent", "Bernstein", "Markov Bernstein (lambda_+)", "general-state-space", ratio_plus * sigma2, ""),
    ]
    table = pd.DataFrame(
        rows,
        columns=["setting", "type", "reference", "condition", "variance_proxy", "note"],
    )
    table["variance_proxy"] = table["variance_proxy"].astype(np.float64)
    return table
