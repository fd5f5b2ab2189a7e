"""
Spectral Quantities

pi-weighted operator norms, the two spectral gaps and the reduced resolvent:
  - l2_gap:     lambda   = |||P - Pi|||_pi                    (L2-spectral gap 1 - lambda)
  - right_gap:  lambda_+ = top of spectrum of R on L2_0(pi)   (right gap 1 - lambda_+)
  - reduced_resolvent: Z = (I - P + Pi)^{-1} - Pi
  - asymptotic_variance: sigma2_asy = <(2Z - I) f, f>_pi
  - finite_horizon_second_moment: E_pi[(sum_{i<=n} f(X_i))^2], closed form or direct sum
"""
import logging
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import linalg

from src.markov import tolerances as tol
from src.markov.chain import (
    FiniteChain,
    Observable,
    pi_vector,
    additive_reversiblization,
    detailed_balance_defect,
    is_reversible,
    projector,
    stationary,
)
from src.markov.errors import (
    EigensolverFailure,
    NoGap,
    NotReversible,
    SingularSolve,
)

logger = logging.getLogger(__name__)


class SpectralReport(BaseModel):
    """Summary of the spectral quantities of a chain (and optionally one observable)."""

    model_config = ConfigDict(frozen=True)

    lam: float = Field(..., description="lambda(P) = |||P - Pi|||_pi", ge=0.0)
    lam_plus: float = Field(..., description="lambda_+(R), top of spectrum on L2_0(pi)")
    has_gap: bool = Field(..., description="lambda < 1")
    has_right_gap: bool = Field(..., description="lambda_+ < 1")
    reversible: bool = Field(..., description="Detailed balance holds within tolerance")
    resolvent_available: bool = Field(..., description="Reduced resolvent Z exists")
    sigma2: Optional[float] = Field(None, description="pi(f^2) of the observable")
    sigma2_asy: Optional[float] = Field(None, description="Asymptotic variance of f")


@dataclass(frozen=True)
class ReducedResolvent:
    """Z = (I - P + Pi)^{-1} - Pi, with Z Pi = Pi Z = 0 and (I - P) Z = I - Pi."""

    Z: np.ndarray


def resolve_pi(chain: FiniteChain, pi) -> np.ndarray:
    return stationary(chain).pi if pi is None else pi_vector(pi)


def symmetric_eigvals(S: np.ndarray) -> np.ndarray:
    """Eigenvalues (ascending) of a numerically symmetric matrix."""
    try:
        return linalg.eigvalsh(0.5 * (S + S.T))
    except linalg.LinAlgError as e:
        raise EigensolverFailure(f"Symmetric eigensolver did not converge: {e}") from e


def weighted_operator_norm(A: np.ndarray, pi) -> float:
    """
    |||A|||_pi = sup{ ||A h||_pi : ||h||_pi = 1 }.

    Computed as the largest singular value of D^{1/2} A D^{-1/2}
    (D = diag(pi)), via the top eigenvalue of its Gram matrix.
    """
    root = np.sqrt(pi_vector(pi))
    B = root[:, np.newaxis] * np.asarray(A, dtype=float) / root[np.newaxis, :]
    top = symmetric_eigvals(B.T @ B)[-1]
    return float(np.sqrt(max(top, 0.0)))


def l2_gap(chain: FiniteChain, pi=None) -> float:
    """
    lambda(P) = |||P - Pi|||_pi; the L2-spectral gap is 1 - lambda.

    lambda may equal 1 (no gap); callers that need a gap reject it.
    """
    pi = resolve_pi(chain, pi)
    lam = weighted_operator_norm(chain.transition - projector(pi), pi)
    logger.debug(f"l2_gap: lambda={lam:.12f}")
    return lam


def right_gap(chain: FiniteChain, pi=None) -> float:
    """
    lambda_+ = sup spectrum of R = (P + P*)/2 acting on mean-zero functions.

    The symmetrized R is restricted to an orthonormal basis of the
    complement of sqrt(pi) (the image of the constants), which removes
    the eigenvalue 1 without touching the rest of the spectrum.
    """
    pi = resolve_pi(chain, pi)
    if len(pi) == 1:
        # L2_0 is trivial on a single state
        return 0.0
    root = np.sqrt(pi)
    R = additive_reversiblization(chain, pi)
    S = root[:, np.newaxis] * R / root[np.newaxis, :]
    basis = linalg.null_space(root[np.newaxis, :])
    restricted = basis.T @ (0.5 * (S + S.T)) @ basis
    lam_plus = float(symmetric_eigvals(restricted)[-1])
    logger.debug(f"right_gap: lambda_plus={lam_plus:.12f}")
    return lam_plus


def reduced_resolvent(chain: FiniteChain, pi=None) -> ReducedResolvent:
    """
    Reduced resolvent Z = (I - P)^{-1}(I - Pi) = (I - P + Pi)^{-1} - Pi.

    Raises:
        NoGap: lambda(P) = 1
        SingularSolve: I - P + Pi not invertible
    """
    pi = resolve_pi(chain, pi)
    lam = l2_gap(chain, pi)
    if lam >= tol.NO_GAP_THRESHOLD:
        raise NoGap(lam)

    n = chain.n_states
    Pi = projector(pi)
    M = np.eye(n) - chain.transition + Pi

    condition = float(np.linalg.cond(M))
    if condition > tol.CONDITION_WARNING:
        logger.warning(f"I - P + Pi is ill-conditioned (cond={condition:.3e})")

    try:
        inverse = linalg.lu_solve(linalg.lu_factor(M), np.eye(n))
    except (linalg.LinAlgError, ValueError) as e:
        raise SingularSolve(f"Resolvent solve failed: {e}") from e
    if not np.all(np.isfinite(inverse)):
        raise SingularSolve("Resolvent solve produced non-finite entries")

    Z = inverse - Pi
    Z.setflags(write=False)
    return ReducedResolvent(Z=Z)


def asymptotic_variance(chain: FiniteChain, f: Observable, pi=None) -> float:
    """sigma2_asy = <(2Z - I) f, f>_pi."""
    pi = resolve_pi(chain, pi)
    Z = reduced_resolvent(chain, pi).Z
    v = f.values
    value = float(np.sum(pi * (2.0 * (Z @ v) - v) * v))
    if value < -1e-10:
        logger.warning(f"Negative asymptotic variance {value:.3e}; chain may be ill-posed")
    return value


def resolvent_quadratic_form(chain: FiniteChain, f: Observable, pi=None) -> float:
    """<Z f, f>_pi = (sigma2_asy + sigma2) / 2."""
    pi = resolve_pi(chain, pi)
    Z = reduced_resolvent(chain, pi).Z
    return float(np.sum(pi * (Z @ f.values) * f.values))


def finite_horizon_second_moment(
    chain: FiniteChain,
    f: Observable,
    n: int,
    method: Literal["closed_form", "direct_sum"] = "direct_sum",
    pi=None,
) -> float:
    """
    E_pi[(sum_{i=1}^n f(X_i))^2] for a stationary chain.

    Methods:
        direct_sum:  sum_{i,j} <(P - Pi)^{|i-j|} f, f>_pi (valid for any chain)
        closed_form: <[n(2Z - I) - 2 Z^2 P (I - P^n)] f, f>_pi (reversible chains)

    Raises:
        NotReversible: closed_form on a nonreversible chain
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    pi = resolve_pi(chain, pi)
    v = f.values
    P = chain.transition

    if method == "closed_form":
        if not is_reversible(chain, pi):
            raise NotReversible(detailed_balance_defect(chain, pi))
        Z = reduced_resolvent(chain, pi).Z
        I = np.eye(chain.n_states)
        M = n * (2.0 * Z - I) - 2.0 * Z @ Z @ P @ (I - np.linalg.matrix_power(P, n))
        return float(np.sum(pi * (M @ v) * v))

    if method != "direct_sum":
        raise ValueError(f"Unknown method: {method}")

    deviation = P - projector(pi)
    h = v.copy()
    total = n * float(np.sum(pi * v * v))
    for lag in range(1, n):
        h = deviation @ h
        total += 2.0 * (n - lag) * float(np.sum(pi * h * v))
    return total


def spectral_report(
    chain: FiniteChain, f: Optional[Observable] = None, pi=None
) -> SpectralReport:
    """Collect lambda, lambda_+, and (given f) sigma2 and sigma2_asy."""
    pi = resolve_pi(chain, pi)
    lam = l2_gap(chain, pi)
    lam_plus = right_gap(chain, pi)
    has_gap = lam < tol.NO_GAP_THRESHOLD

    sigma2 = sigma2_asy = None
    if f is not None:
        sigma2 = f.sigma2
        if has_gap:
            sigma2_asy = asymptotic_variance(chain, f, pi)

    return SpectralReport(
        lam=min(lam, 1.0),
        lam_plus=lam_plus,
        has_gap=has_gap,
        has_right_gap=lam_plus < tol.NO_GAP_THRESHOLD,
        reversible=is_reversible(chain, pi),
        resolvent_available=has_gap,
        sigma2=sigma2,
        sigma2_asy=sigma2_asy,
    )
