"""Independent verification engines and adversarial constructions.

``verify_bound`` re-checks the tail inequalities on a concrete pair of laws
by two routes that share no code with the bound computations: exact/quadrature
evaluation of both sides, and seeded Monte Carlo with a binomial-confidence
tolerance.  Failures come back as reports, never exceptions, so violating
pairs can be studied.

``contraction_pair`` manufactures dominated pairs: averaging the quantile
function over a random partition of (0,1) is a conditional expectation, so
the resulting atomic law is dominated in the convex order by Jensen's
inequality while keeping the mean.

``counterexample`` builds, entirely in log space, the classical pair showing
that convex domination controls tail probabilities but not quantile ratios:
a law with a barely integrable upper tail, conditioned on doubly-exponential
cells, has quantile ratios against the base law that grow without bound.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .distributions import AtomicMixture, Distribution
from .errors import DomainError, HypothesisError
from .majorization import icx_dominates, sharp_tail_bound
from .envelope import tail_ratio_bound

__all__ = [
    "VerificationReport",
    "CounterexamplePair",
    "verify_bound",
    "contraction_pair",
    "counterexample",
]

KNOWN_CHECKS = ("prop2", "prop4", "prop7")


@dataclass(frozen=True)
class VerificationReport:
    """One checked inequality: ``passed`` iff ``lhs <= rhs + tolerance``."""

    check_name: str
    passed: bool
    lhs: float
    rhs: float
    slack: float
    method: str
    tolerance: float

    def to_json(self) -> str:
        return json.dumps({
            "check_name": self.check_name, "passed": self.passed,
            "lhs": self.lhs, "rhs": self.rhs, "slack": self.slack,
            "method": self.method, "tolerance": self.tolerance,
        })


def _report(name: str, lhs: float, rhs: float, method: str,
            tolerance: float) -> VerificationReport:
    lhs, rhs = float(lhs), float(rhs)
    return VerificationReport(check_name=name, passed=lhs <= rhs + tolerance,
                              lhs=lhs, rhs=rhs, slack=lhs - rhs,
                              method=method, tolerance=float(tolerance))


def _binom_tol(p_hat: float, rhs: float, n: int, multiplier: float) -> float:
    v = max(p_hat * (1.0 - p_hat), rhs * (1.0 - rhs))
    return multiplier * math.sqrt(max(v, 0.0) / n)


def verify_bound(x_law: Distribution, y_law: Distribution,
                 checks=KNOWN_CHECKS, *, s_values=None, x_values=None,
                 R: float = 2.0, mc_samples: int = 10 ** 6, seed: int = 0,
                 tol: float = 1e-9, mc_multiplier: float = 4.0,
                 ) -> list[VerificationReport]:
    """Check selected tail inequalities for the pair (X, Y), both ways.

    The stop-loss domination of X by Y is certified first and reported
    under the name ``icx``; the inequalities are then evaluated by
    quadrature on the laws and by Monte Carlo on a seeded sample of X
    (tolerance ``mc_multiplier`` binomial standard errors).  Results are
    reports, not errors; ``prop7`` levels whose hypothesis fails for this
    Y and R are skipped.
    """
    for c in checks:
        if c not in KNOWN_CHECKS:
            raise DomainError(f"unknown check {c!r}; choose from {KNOWN_CHECKS}")
    if s_values is None:
        s_values = [float(y_law.quantile(q)) for q in (0.5, 0.75, 0.9, 0.96, 0.99)]
    if x_values is None:
        x_values = (0.1, 0.25, 0.5, 0.75, 0.9)

    reports: list[VerificationReport] = []
    order = icx_dominates(x_law, y_law)
    reports.append(_report("icx", order.worst_slack, 0.0, "quadrature",
                           order.tolerance))

    sample = x_law.sample(mc_samples, seed)
    mc_tag = f"monte_carlo(n={mc_samples},seed={seed})"

    if "prop2" in checks:
        for s in s_values:
            sb = sharp_tail_bound(y_law, s)
            name = f"prop2[s={s:.6g}]"
            if sb.degenerate:
                lhs_q = 1.0 - float(x_law.cdf(s))
                lhs_mc = float(np.mean(sample > s))
            else:
                lhs_q = 1.0 - float(x_law.cdf_left(sb.threshold))
                lhs_mc = float(np.mean(sample >= sb.threshold))
            reports.append(_report(name, lhs_q, sb.bound, "quadrature", tol))
            reports.append(_report(name, lhs_mc, sb.bound, mc_tag,
                                   _binom_tol(lhs_mc, sb.bound, mc_samples,
                                              mc_multiplier)))

    if "prop4" in checks:
        for x in x_values:
            env = float(y_law.upper_mean(x))
            name = f"prop4[x={x:.6g}]"
            reports.append(_report(name, float(x_law.quantile(x)), env,
                                   "quadrature", tol))
            # the quantile bound holds iff at least mass x sits below the envelope
            p_below = float(np.mean(sample < env))
            reports.append(_report(name, x, p_below, mc_tag,
                                   _binom_tol(p_below, x, mc_samples,
                                              mc_multiplier)))

    if "prop7" in checks:
        for x in x_values:
            try:
                t, bound = tail_ratio_bound(y_law, x, R)
            except HypothesisError:
                continue
            name = f"prop7[x={x:.6g}]"
            lhs_q = 1.0 - float(x_law.cdf(t))
            lhs_mc = float(np.mean(sample > t))
            reports.append(_report(name, lhs_q, bound, "quadrature", tol))
            reports.append(_report(name, lhs_mc, bound, mc_tag,
                                   _binom_tol(lhs_mc, bound, mc_samples,
                                              mc_multiplier)))
    return reports


def contraction_pair(y_law: Distribution, cuts: int, seed: int,
                     ) -> tuple[AtomicMixture, Distribution]:
    """Mean-preserving contraction of Y over a random partition of (0,1).

    Draws ``cuts`` uniform cut points and replaces the quantile function by
    its average on each resulting cell; the atomic law so produced is a
    conditional expectation of Y and therefore dominated by it in the
    convex order.  ``cuts = 0`` collapses Y to a point mass at its mean.
    """
    if cuts < 0:
        raise DomainError("cuts must be non-negative")
    rng = np.random.default_rng(seed)
    inner = np.sort(rng.random(cuts)) if cuts else np.empty(0)
    edges = np.unique(np.concatenate([[0.0], inner, [1.0]]))
    tails = np.asarray(y_law.upper_tail_integral(edges), dtype=float)
    widths = np.diff(edges)
    means = (tails[:-1] - tails[1:]) / widths
    return AtomicMixture(zip(means, widths)), y_law


@dataclass(frozen=True)
class CounterexamplePair:
    """Blow-up pair built on doubly-exponential cells ``[e^{-n^2}, e^{-(n-1)^2})``.

    The base law is ``Y(x) = x^{-1} (log(e/x))^{-2}`` on the unit interval
    (mean exactly 1, upper tail barely integrable); conditioning on the cell
    partition gives an atomic law X whose quantile ratio against Y, probed
    just inside each cell boundary, grows like twice the cell index even
    though X is dominated by Y against every convex function.

    All per-cell quantities are carried in log space; plain cell masses
    underflow once ``(n-1)^2`` passes a few hundred.
    """

    n_max: int
    log_masses: np.ndarray = field(repr=False)
    cell_integrals: np.ndarray = field(repr=False)
    log_cell_means: np.ndarray = field(repr=False)
    ratio_curve: np.ndarray = field(repr=False)

    def __post_init__(self):
        total = float(np.exp(logsumexp(self.log_masses)))
        remainder = math.exp(-float(self.n_max) ** 2)
        if abs(total + remainder - 1.0) > 1e-12:
            raise DomainError("cell masses do not telescope to 1")
        if np.any(np.diff(self.log_cell_means) <= 0.0):
            raise DomainError("cell means must be increasing")

    @property
    def cell_means(self) -> np.ndarray:
        """Linear-scale cell means; overflows to ``inf`` for deep cells."""
        with np.errstate(over="ignore"):
            return np.exp(self.log_cell_means)

    def tail_mean_partial_sum(self) -> float:
        """Sum of the cell integrals, ``1 - 1/(n_max^2 + 1)`` exactly."""
        return float(np.sum(self.cell_integrals))


def counterexample(n_max: int) -> CounterexamplePair:
    """Exact construction of the blow-up pair up to cell ``n_max``.

    Closed forms: cell mass ``e^{-(n-1)^2} - e^{-n^2}`` and cell integral
    ``1/((n-1)^2 + 1) - 1/(n^2 + 1)`` (telescoping to mean 1), combined in
    log space with ``log(e^a - e^b) = a + log1p(-e^{b-a})``.  The ratio
    curve samples ``H_X / H_Y`` just inside each cell's outer boundary,
    where the conditional mean of the cell faces the base quantile.
    """
    if n_max < 2:
        raise DomainError("need at least two cells")
    if n_max ** 2 > 10 ** 8:
        raise DomainError("n_max too large even for log-space arithmetic")
    n = np.arange(1, n_max + 1, dtype=float)
    log_masses = -np.square(n - 1.0) + np.log1p(-np.exp(-(2.0 * n - 1.0)))
    cell_integrals = 1.0 / (np.square(n - 1.0) + 1.0) - 1.0 / (np.square(n) + 1.0)
    log_cell_means = np.log(cell_integrals) - log_masses

    # probe at x = e^{-(n-1)^2} (1 - 1e-6), just inside cell n
    log_x = -np.square(n - 1.0) + math.log1p(-1e-6)
    log_y = -log_x - 2.0 * np.log(1.0 - log_x)  # log Y(x); log(e/x) = 1 - log x
    ratios = np.exp(log_cell_means - log_y)
    return CounterexamplePair(n_max=int(n_max), log_masses=log_masses,
                              cell_integrals=cell_integrals,
                              log_cell_means=log_cell_means, ratio_curve=ratios)
