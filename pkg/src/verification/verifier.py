"""
Bound Verifier

Checks the theoretical bounds for one chain and observable against exact
oracles and seeded Monte Carlo:
  - Tail: exact tail and simulated exceedance frequency vs tail_bound
  - MGF: exact transfer-matrix MGF vs the closed and León-Perron envelopes
  - Variance: exact and simulated Var(S_n / sqrt(n)) vs the variance proxy
  - Envelopes: tilted eigenvalue vs Kato envelope, León-Perron norm vs its
    envelope, and the state-space/pushforward norm identity

Every check returns a report dict with status PASS or FAIL; a FAIL is
logged, never raised. Used by `verify` and `mgf` in the CLI.
"""
import logging
import math
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from src.bounds.inequalities import (
    dependence_pole,
    effective_gap,
    envelope_variance_proxy,
    mgf_bound,
    tail_bound,
)
from src.bounds.schemas import BoundQuery
from src.markov import tolerances as tol
from src.markov.chain import FiniteChain, Observable, is_reversible
from src.markov.errors import OutOfRange, TooLarge
from src.markov.kato import eigencurve, lemma33_bound
from src.markov.leonperron import (
    lemma31_bound,
    lp_perturbed_norm,
    mgf_envelope_timeinvariant,
    mgf_envelope_timevarying,
    pushforward,
    state_space_perturbed_norm,
)
from src.markov.spectral import (
    finite_horizon_second_moment,
    l2_gap,
    resolve_pi,
    right_gap,
)
from src.simulation.estimation import (
    estimate_tail,
    observable_evaluator,
    scaled_variance,
)
from src.simulation.exact import exact_mgf, exact_tail
from src.simulation.sampling import chain_sampler
from src.simulation.schemas import TrialPlan

logger = logging.getLogger(__name__)

# Relative slack for comparisons between exact values and closed-form bounds
DOMINATION_SLACK = 1e-12
# Absolute tolerance for the state-space / pushforward norm identity
NORM_IDENTITY_TOL = 1e-10
IDENTITY_GRID = (-0.1, -0.05, 0.05, 0.1)
ENVELOPE_GRID_POINTS = 9


def _dominated(value: float, bound: float) -> bool:
    return value <= bound * (1.0 + DOMINATION_SLACK)


class BoundVerifier:
    """
    Verifies the Bernstein-type bounds of one (chain, observable) pair.

    Spectral quantities are computed once at construction; Monte Carlo runs
    use a TrialPlan built from the per-call seed so results depend only on
    the arguments, never on n_jobs.
    """

    def __init__(
        self,
        chain: FiniteChain,
        f: Observable,
        pi=None,
        n_jobs: Optional[int] = None,
        chunk_size: Optional[int] = None,
    ):
        self.chain = chain
        self.f = f
        self.pi = resolve_pi(chain, pi)
        self.n_jobs = n_jobs
        self.chunk_size = chunk_size
        self.lam = l2_gap(chain, self.pi)
        self.lam_plus = right_gap(chain, self.pi)
        self.reports: List[Dict] = []

    # -----------------------------------------------------------------
    # Helpers
    # -----------------------------------------------------------------
    def _query(self, n: int, eps: float) -> BoundQuery:
        return BoundQuery(
            n=n,
            eps=eps,
            sigma2=self.f.sigma2,
            c=self.f.c,
            lam=min(self.lam, 1.0),
            lam_plus=max(min(self.lam_plus, 1.0), -1.0),
        )

    def _build_report(self, check: str, failures: List[str], **details) -> Dict:
        status = "FAIL" if failures else "PASS"
        report = {"check": check, "status": status, "failures": failures, **details}
        self.reports.append(report)
        if failures:
            for failure in failures:
                logger.error(f"{check}: {failure}")
        else:
            logger.info(f"{check}: PASS")
        return report

    # -----------------------------------------------------------------
    # Checks
    # -----------------------------------------------------------------
    def verify_tail(self, n: int, eps: float, trials: int, seed: int) -> Dict:
        """
        Exact tail and Monte Carlo estimate against tail_bound (thm11, thm12).

        PASS iff the exact tail (when computable) and the Clopper-Pearson
        lower end are both below each bound.
        """
        logger.info("=" * 60)
        logger.info(f"VERIFY TAIL: n={n}, eps={eps}, trials={trials}, seed={seed}")
        logger.info("=" * 60)

        query = self._query(n, eps)
        bounds = {
            "thm11": tail_bound(query, "thm11").probability_bound,
            "thm12": tail_bound(query, "thm12").probability_bound,
        }

        try:
            exact = exact_tail(self.chain, self.f, n, eps, self.pi)
        except TooLarge as e:
            logger.warning(f"Exact tail unavailable: {e}")
            exact = None

        plan = TrialPlan(base_seed=seed, trials=trials, n=n)
        estimate = estimate_tail(
            chain_sampler(self.chain, self.pi),
            observable_evaluator(self.f),
            eps,
            plan,
            n_jobs=self.n_jobs,
            chunk_size=self.chunk_size,
        )

        failures = []
        for variant, bound in bounds.items():
            if exact is not None and not _dominated(exact, bound):
                failures.append(f"exact tail {exact:.6e} exceeds {variant} bound {bound:.6e}")
            if estimate.cp_low > bound:
                failures.append(f"CP lower end {estimate.cp_low:.6e} exceeds {variant} bound {bound:.6e}")

        consistent = exact is None or estimate.cp_low <= exact <= estimate.cp_high
        if not consistent:
            logger.warning(
                f"Exact tail {exact:.6e} outside CP99 [{estimate.cp_low:.6e}, {estimate.cp_high:.6e}]"
            )

        return self._build_report(
            "tail",
            failures,
            n=n,
            eps=eps,
            exact=exact,
            estimate=estimate.point,
            cp_low=estimate.cp_low,
            cp_high=estimate.cp_high,
            successes=estimate.successes,
            trials=estimate.trials,
            bound_thm11=bounds["thm11"],
            bound_thm12=bounds["thm12"],
            mc_consistent=consistent,
        )

    def verify_mgf(self, n: int, t: float, observables: Optional[Sequence[Observable]] = None) -> Dict:
        """
        Exact MGF against every envelope whose range contains t:
        mgf_bound (thm11 with lambda, thm12 with lambda_+), the León-Perron
        time-varying product and, for a time-invariant f, the lambda_+ product.

        Raises:
            OutOfRange: no envelope admits t
        """
        logger.info("=" * 60)
        logger.info(f"VERIFY MGF: n={n}, t={t}")
        logger.info("=" * 60)

        time_varying = observables is not None
        steps = list(observables) if time_varying else [self.f] * n
        exact = exact_mgf(self.chain, steps if time_varying else self.f, n, t, self.pi)
        sigma2 = float(np.mean([g.sigma2 for g in steps]))
        c = max(g.c for g in steps)

        envelopes = {}
        if self.lam < tol.NO_GAP_THRESHOLD:
            envelopes["leon_perron_timevarying"] = mgf_envelope_timevarying(self.lam, steps, self.pi, t)
            if 0.0 <= t < dependence_pole(c, effective_gap(self.lam, "thm11")):
                envelopes["thm11"] = mgf_bound(n, t, sigma2, c, self.lam, "thm11")
        if not time_varying and self.lam_plus < tol.NO_GAP_THRESHOLD:
            envelopes["leon_perron_timeinvariant"] = mgf_envelope_timeinvariant(
                self.chain, self.f, n, t, self.pi
            )
            if 0.0 <= t < dependence_pole(c, effective_gap(self.lam_plus, "thm12")):
                envelopes["thm12"] = mgf_bound(n, t, sigma2, c, self.lam_plus, "thm12")
        if not any(k.startswith("thm") for k in envelopes):
            raise OutOfRange(t, dependence_pole(c, max(self.lam_plus, 0.0)))

        failures = [
            f"exact MGF {exact:.12e} exceeds {name} envelope {value:.12e}"
            for name, value in envelopes.items()
            if not _dominated(exact, value)
        ]
        return self._build_report("mgf", failures, n=n, t=t, exact=exact, **envelopes)

    def verify_variance(self, n: int, trials: int, seed: int) -> Dict:
        """
        Var(S_n / sqrt(n)) against the variance proxy sigma2 (1 + lam)/(1 - lam).

        The exact value comes from the finite-horizon second moment; the
        simulated value must not exceed the proxy by more than three
        standard errors.
        """
        logger.info("=" * 60)
        logger.info(f"VERIFY VARIANCE: n={n}, trials={trials}, seed={seed}")
        logger.info("=" * 60)

        proxy = envelope_variance_proxy(self.f.sigma2, self.f.c, self.lam)
        exact = finite_horizon_second_moment(self.chain, self.f, n, "direct_sum", self.pi) / n

        plan = TrialPlan(base_seed=seed, trials=trials, n=n)
        estimate = scaled_variance(
            chain_sampler(self.chain, self.pi),
            observable_evaluator(self.f),
            plan,
            n_jobs=self.n_jobs,
            chunk_size=self.chunk_size,
        )
        margin = 3.0 * math.sqrt(2.0 / (trials - 1))

        failures = []
        if not _dominated(exact, proxy):
            failures.append(f"exact variance {exact:.6e} exceeds proxy {proxy:.6e}")
        if estimate * (1.0 - margin) > proxy:
            failures.append(f"simulated variance {estimate:.6e} exceeds proxy {proxy:.6e}")

        return self._build_report(
            "variance",
            failures,
            n=n,
            exact=exact,
            estimate=estimate,
            proxy=proxy,
            trials=trials,
        )

    def verify_lemma_envelopes(self, grid_points: int = ENVELOPE_GRID_POINTS) -> Dict:
        """
        Deterministic envelope checks on a t-grid in [0, 0.99 (1 - gap)/(5c)]:
          - eigencurve <= lemma33_bound (reversible chains with lambda_+ >= 0)
          - lp_perturbed_norm(lambda) <= lemma31_bound
          - state-space norm == pushforward norm (t in +-0.05, +-0.1)
        """
        logger.info("=" * 60)
        logger.info("VERIFY ENVELOPES")
        logger.info("=" * 60)

        f, c, sigma2 = self.f, self.f.c, self.f.sigma2
        simple = pushforward(self.pi, f)
        failures = []
        checked = {"lemma33": 0, "lemma31": 0, "norm_identity": 0}

        if self.lam < tol.NO_GAP_THRESHOLD:
            for t in IDENTITY_GRID:
                left = state_space_perturbed_norm(self.pi, self.lam, f, t)
                right = lp_perturbed_norm(self.lam, simple, t)
                checked["norm_identity"] += 1
                if abs(left - right) > NORM_IDENTITY_TOL:
                    failures.append(f"norm identity at t={t}: {left:.15e} vs {right:.15e}")

            for t in np.linspace(0.0, 0.99 * dependence_pole(c, self.lam), grid_points):
                norm = lp_perturbed_norm(self.lam, simple, float(t))
                bound = lemma31_bound(float(t), sigma2, c, self.lam)
                checked["lemma31"] += 1
                if not _dominated(norm, bound):
                    failures.append(f"lemma31 at t={t:.6e}: {norm:.12e} > {bound:.12e}")

        if is_reversible(self.chain, self.pi) and 0.0 <= self.lam_plus < tol.NO_GAP_THRESHOLD:
            for t in np.linspace(0.0, 0.99 * dependence_pole(c, self.lam_plus), grid_points):
                value = eigencurve(self.chain, f, float(t), self.pi)
                bound = lemma33_bound(float(t), sigma2, c, self.lam_plus, self.lam)
                checked["lemma33"] += 1
                if not _dominated(value, bound):
                    failures.append(f"lemma33 at t={t:.6e}: {value:.12e} > {bound:.12e}")

        return self._build_report("envelopes", failures, **checked)

    # -----------------------------------------------------------------
    # Summary
    # -----------------------------------------------------------------
    def summary(self) -> pd.DataFrame:
        """One row per check run so far."""
        table = pd.DataFrame(
            [{"check": r["check"], "status": r["status"], "failures": len(r["failures"])} for r in self.reports],
            columns=["check", "status", "failures"],
        )
        passed = int((table["status"] == "PASS").sum()) if len(table) else 0
        logger.info("=" * 60)
        logger.info(f"VERIFICATION SUMMARY: {passed}/{len(table)} checks passed")
        logger.info("=" * 60)
        return table

    @property
    def all_passed(self) -> bool:
        return all(r["status"] == "PASS" for r in self.reports)
