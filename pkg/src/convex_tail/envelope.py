"""Quantile envelopes and multiplicative tail comparisons.

Everything here bounds an unknown law X through a known law Y assumed to
dominate it in the increasing convex order:

* ``quantile_envelope``: the averaged-quantile bound
  ``H_X(x) <= (1/(1-x)) int_x^1 H_Y``, sharp at every level.
* ``omega_bound``: turns a self-similarity modulus of an envelope of
  ``H_Y`` into a constant-factor quantile bound.
* ``gaussian_transfer``: sub-Gaussian tail transfer; if Y's tail is below
  ``gamma exp(-t^2/2)`` at thresholds ``Q(t)`` and ``Q`` grows in a
  controlled way, X satisfies the same tail bound at thresholds inflated
  by ``p T / (p - 1)``.
* ``tail_ratio_bound``: the multiplicative comparison
  ``P{X > t} <= R P{Y >= t}`` at the averaged threshold ``t``, valid when
  the decreasing quantile at ``x/R`` clears that threshold.
* ``region_areas`` and ``geometric_criterion``: the geometric sufficient
  condition for the previous hypothesis, built from the area decomposition
  of the region between the decreasing quantile and its level lines.
* ``kemperman_constant`` and ``kemperman_criterion``: the classical sharp
  constant ``(1 - 1/r)^{-r}`` (limit ``e``) recovered when the transformed
  tail ``Lambda_r(P{Y >= t})`` is convex.

Hypotheses are analytic statements; this module certifies them on
documented probe grids and raises ``HypothesisError`` with the violating
point when a probe fails.  A passed probe is numerical evidence, not proof.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .distributions import Distribution
from .errors import (
    DomainError,
    HypothesisError,
    NotRegularError,
    NumericalError,
    PreconditionError,
)
from .quadrature import quad_unit

__all__ = [
    "ProbeCheck",
    "BoundCurve",
    "RegularityParams",
    "RegionAreas",
    "OmegaSpec",
    "ConvexityCheck",
    "quantile_envelope",
    "omega_bound",
    "gaussian_transfer",
    "tail_ratio_bound",
    "region_areas",
    "geometric_criterion",
    "proof_side_coefficient",
    "check_regularity",
    "derivative_conditions",
    "kemperman_constant",
    "lambda_r",
    "kemperman_criterion",
]


@dataclass(frozen=True)
class ProbeCheck:
    """Outcome of one numerical hypothesis probe, kept for provenance."""

    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class BoundCurve:
    """Tabulated bound produced by an envelope computation.

    ``meaning`` is ``"quantile_envelope"`` (abscissas are probability
    levels in (0,1), values bound the quantile of X and are non-decreasing)
    or ``"tail_bound"`` (abscissas are thresholds, values are probability
    bounds clamped into [0,1]).
    """

    abscissas: tuple
    values: tuple
    meaning: str
    source: str = ""
    checks: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "abscissas", tuple(float(a) for a in self.abscissas))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        object.__setattr__(self, "checks", tuple(self.checks))
        if self.meaning not in ("quantile_envelope", "tail_bound"):
            raise DomainError(f"unknown curve meaning {self.meaning!r}")
        if len(self.abscissas) != len(self.values):
            raise DomainError("curve abscissas and values differ in length")
        if self.meaning == "quantile_envelope":
            xs = np.asarray(self.abscissas)
            vs = np.asarray(self.values)
            if xs.size and (xs.min() <= 0.0 or xs.max() >= 1.0):
                raise DomainError("envelope abscissas must lie inside (0, 1)")
            if np.any(np.diff(xs) < 0.0):
                raise DomainError("envelope abscissas must be sorted")
            if vs.size and np.any(np.diff(vs) < -1e-9 * max(1.0, float(np.abs(vs).max()))):
                raise DomainError("quantile envelope values must be non-decreasing")
        else:
            vs = np.asarray(self.values)
            if vs.size and (vs.min() < -1e-12 or vs.max() > 1.0 + 1e-12):
                raise DomainError("tail bound values must lie in [0, 1]")

    def to_csv(self) -> str:
        lines = ["x,value,meaning"]
        lines += [f"{a:.17g},{v:.17g},{self.meaning}"
                  for a, v in zip(self.abscissas, self.values)]
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        doc = {
            "source": self.source,
            "meaning": self.meaning,
            "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail}
                       for c in self.checks],
            "points": [[a, v] for a, v in zip(self.abscissas, self.values)],
        }
        return json.dumps(doc)


@dataclass(frozen=True)
class RegularityParams:
    """Tail-regularity modulus: ``|H*(d x) - H*(d y)| <= T d^{-1/p} |H*(x) - H*(y)|``."""

    p: float
    T: float

    def __post_init__(self):
        if not self.p > 1.0:
            raise DomainError("regularity exponent p must exceed 1")
        if not self.T >= 1.0:
            raise DomainError("regularity constant T must be at least 1")


@dataclass(frozen=True)
class RegionAreas:
    """Areas of the four regions cut out of the band between the decreasing
    quantile curve and its level at ``x`` by the vertical line ``u = x/R``
    and the horizontal level at ``x/R``.

    With levels ``L1 = H*(x) <= L2 = H*(x/R)``: D is the curve excess above
    L2 left of ``x/R``; C is the rectangle ``[0, x/R] x [L1, L2]``; B is the
    curve excess above L1 right of ``x/R``; A is the rest of the rectangle
    ``[x/R, x] x [L1, L2]``.  The exact identity ``C = (A+B+C)/R`` is used
    as a consistency check on the quadratures and the decomposition.
    """

    A: float
    B: float
    C: float
    D: float
    x: float
    R: float

    def __post_init__(self):
        for name in ("A", "B", "C", "D"):
            v = getattr(self, name)
            if v < -1e-9:
                raise NumericalError(f"region {name} came out negative: {v}")
            object.__setattr__(self, name, max(float(v), 0.0))


@dataclass(frozen=True)
class OmegaSpec:
    """A non-increasing scaling modulus ``omega: (0,1) -> (1,inf)`` together
    with its (finite) integral over the unit interval."""

    evaluator: Callable[[float], float]
    integral: float

    def __call__(self, u):
        return self.evaluator(u)

    @classmethod
    def from_function(cls, omega: Callable[[float], float], *,
                      integral: float | None = None,
                      probes: int = 200) -> "OmegaSpec":
        """Validate monotonicity and range on a probe grid; integrate if needed."""
        us = np.unique(np.concatenate([
            np.geomspace(1e-6, 0.5, probes // 2),
            np.linspace(0.5, 1.0 - 1e-6, probes - probes // 2),
        ]))
        vals = np.array([float(omega(u)) for u in us])
        if np.any(vals <= 1.0):
            i = int(np.argmin(vals))
            raise DomainError(
                f"omega must map into (1, inf); omega({us[i]}) = {vals[i]}")
        rises = np.diff(vals) > 1e-12 * np.maximum(1.0, np.abs(vals[:-1]))
        if np.any(rises):
            i = int(np.argmax(rises))
            raise DomainError(
                f"omega must be non-increasing; omega rises between u={us[i]} and u={us[i + 1]}")
        if integral is None:
            integral = quad_unit(lambda u: float(omega(u)), 0.0, 1.0)
        if not math.isfinite(integral):
            raise DomainError("omega must have a finite integral over (0, 1)")
        return cls(evaluator=omega, integral=float(integral))


@dataclass(frozen=True)
class ConvexityCheck:
    """Boolean-like result of a convexity probe; carries the violating triple."""

    ok: bool
    witness: tuple | None = None

    def __bool__(self) -> bool:
        return self.ok


def _check_xs(xs) -> np.ndarray:
    arr = np.asarray(list(xs), dtype=float)
    if arr.size == 0:
        raise DomainError("need at least one abscissa")
    if np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise DomainError("abscissas must lie inside (0, 1)")
    if np.any(np.diff(arr) < 0.0):
        raise DomainError("abscissas must be sorted")
    return arr


def quantile_envelope(d: Distribution, xs: Sequence[float]) -> BoundCurve:
    """Averaged-quantile upper envelope, valid for every dominated X.

    Sharp: at each level the envelope is attained by collapsing Y's tail
    beyond its quantile at that level.
    """
    arr = _check_xs(xs)
    values = np.asarray(d.upper_mean(arr), dtype=float)
    return BoundCurve(abscissas=tuple(arr), values=tuple(values),
                      meaning="quantile_envelope", source="quantile_envelope")


def omega_bound(d: Distribution, envelope_of_y: Callable[[float], float],
                omega: OmegaSpec, xs: Sequence[float], *,
                probe_step: float = 0.01) -> BoundCurve:
    """Constant-factor envelope ``H(x) * int_0^1 omega`` for dominated laws.

    Requires ``H`` to dominate Y's quantile and to satisfy the scaling
    hypothesis ``H(1 - delta (1 - x)) <= omega(delta) H(x)``; both are
    probed on a grid with spacing ``probe_step`` over (0,1) squared and a
    violation raises ``HypothesisError`` naming the point.
    """
    arr = _check_xs(xs)
    grid = np.arange(probe_step, 1.0, probe_step)
    h_grid = np.array([float(envelope_of_y(x)) for x in grid])
    hy = np.asarray(d.quantile(grid), dtype=float)
    bad = hy > h_grid * (1.0 + 1e-12) + 1e-12
    if np.any(bad):
        i = int(np.argmax(bad))
        raise HypothesisError(
            f"envelope does not dominate the quantile at x={grid[i]}: "
            f"H={h_grid[i]} < quantile={hy[i]}",
            lhs=float(hy[i]), rhs=float(h_grid[i]), where=(float(grid[i]),))
    for j, x in enumerate(grid):
        args = 1.0 - grid * (1.0 - x)  # delta ranges over the grid
        lhs = np.array([float(envelope_of_y(a)) for a in args])
        rhs = np.array([float(omega(dlt)) for dlt in grid]) * h_grid[j]
        bad = lhs > rhs * (1.0 + 1e-12) + 1e-12
        if np.any(bad):
            i = int(np.argmax(bad))
            raise HypothesisError(
                f"scaling hypothesis fails at (delta={grid[i]}, x={x}): "
                f"H(1-delta(1-x))={lhs[i]} > omega(delta) H(x)={rhs[i]}",
                lhs=float(lhs[i]), rhs=float(rhs[i]),
                where=(float(grid[i]), float(x)))
    values = np.array([float(envelope_of_y(x)) for x in arr]) * omega.integral
    check = ProbeCheck("omega_scaling_probe", True,
                       f"{grid.size}x{grid.size} grid, step {probe_step}")
    return BoundCurve(abscissas=tuple(arr), values=tuple(values),
                      meaning="quantile_envelope", source="omega_bound",
                      checks=(check,))


def gaussian_transfer(Q: Callable[[float], float], p: float, T: float,
                      gamma: float, ts: Sequence[float], *,
                      probe_points: int = 80) -> BoundCurve:
    """Sub-Gaussian tail transfer with threshold inflation ``p T / (p-1)``.

    The caller asserts ``P{Y > Q(t)} < gamma exp(-t^2/2)`` for their Y; this
    routine verifies the growth condition
    ``Q(t) exp(-t^2/(2p)) <= T Q(s) exp(-s^2/(2p))`` for ``0 < s < t`` on a
    probe grid and emits, for each requested ``t``, the threshold
    ``(pT/(p-1)) Q(t)`` with tail bound ``gamma exp(-t^2/2)``.
    """
    if not p > 1.0:
        raise DomainError("p must exceed 1")
    if not T >= 1.0:
        raise DomainError("T must be at least 1")
    if not gamma >= 1.0:
        raise DomainError("gamma must be at least 1")
    t_arr = np.asarray(list(ts), dtype=float)
    if t_arr.size == 0 or np.any(t_arr <= 0.0):
        raise DomainError("ts must be positive")

    t_max = float(t_arr.max())
    pool = np.unique(np.concatenate([
        np.geomspace(t_max * 1e-3, t_max, probe_points // 2),
        np.linspace(t_max / probe_points, t_max, probe_points - probe_points // 2),
        t_arr,
    ]))
    q_pool = np.array([float(Q(t)) for t in pool])
    if np.any(q_pool <= 0.0):
        raise DomainError("Q must be positive")
    g = q_pool * np.exp(-np.square(pool) / (2.0 * p))
    running_min = np.minimum.accumulate(g)
    bad = g[1:] > T * running_min[:-1] * (1.0 + 1e-12)
    if np.any(bad):
        j = int(np.argmax(bad)) + 1
        i = int(np.argmin(g[:j]))
        raise HypothesisError(
            f"growth condition fails for s={pool[i]}, t={pool[j]}: "
            f"Q(t)exp(-t^2/2p)={g[j]} > T Q(s)exp(-s^2/2p)={T * g[i]}",
            lhs=float(g[j]), rhs=float(T * g[i]),
            where=(float(pool[i]), float(pool[j])))

    factor = p * T / (p - 1.0)
    thresholds = factor * np.array([float(Q(t)) for t in t_arr])
    bounds = np.clip(gamma * np.exp(-0.5 * np.square(t_arr)), 0.0, 1.0)
    check = ProbeCheck("growth_rate_probe", True,
                       f"{pool.size} grid points up to t={t_max:g}")
    return BoundCurve(abscissas=tuple(thresholds), values=tuple(bounds),
                      meaning="tail_bound", source="gaussian_transfer",
                      checks=(check,))


def tail_ratio_bound(d: Distribution, x: float, R: float, *,
                     hyp_rtol: float = 1e-9) -> tuple[float, float]:
    """Multiplicative tail comparison ``P{X > t} <= R P{Y >= t}``.

    ``t`` is the average of the decreasing quantile of Y over ``(0, x)``.
    Valid when ``H*(x/R) >= t``; that hypothesis is checked numerically
    (with relative slack ``hyp_rtol``) and a failure raises
    ``HypothesisError`` carrying both sides.
    """
    if not 0.0 < x < 1.0:
        raise DomainError("x must lie inside (0, 1)")
    if not R > 1.0:
        raise DomainError("R must exceed 1")
    t = float(d.upper_tail_integral(1.0 - x)) / x
    lhs = float(d.upper_quantile(x / R))
    if lhs < t - hyp_rtol * max(1.0, abs(t)):
        raise HypothesisError(
            f"tail ratio hypothesis fails at x={x}, R={R}: "
            f"H*(x/R)={lhs} < average threshold t={t}",
            lhs=lhs, rhs=t, where=(float(x), float(R)))
    bound = min(1.0, R * (1.0 - float(d.cdf_left(t))))
    return t, bound


def region_areas(d: Distribution, x: float, R: float, *,
                 rtol: float = 1e-10, check_tol: float = 1e-8) -> RegionAreas:
    """Quadrature decomposition of the band between ``H*`` and its level at ``x``.

    A, B and D are integrated independently against the curve; C is the
    exact rectangle area.  The identity ``C = (A+B+C)/R`` then checks the
    consistency of the decomposition and is enforced within ``check_tol``.
    """
    if not 0.0 < x < 1.0:
        raise DomainError("x must lie inside (0, 1)")
    if not R > 1.0:
        raise DomainError("R must exceed 1")
    split = x / R
    l1 = float(d.upper_quantile(x))
    l2 = float(d.upper_quantile(split))

    def hstar(u: float) -> float:
        return float(d.upper_quantile(u))

    d_area = quad_unit(lambda u: hstar(u) - l2, 0.0, split, rtol=rtol)
    b_area = quad_unit(lambda u: hstar(u) - l1, split, x, rtol=rtol)
    a_area = quad_unit(lambda u: l2 - hstar(u), split, x, rtol=rtol)
    c_area = split * (l2 - l1)

    total = a_area + b_area + c_area
    scale = max(1.0, abs(total))
    if abs(c_area - total / R) > check_tol * scale:
        raise NumericalError(
            f"region decomposition inconsistent at x={x}, R={R}: "
            f"C={c_area} but (A+B+C)/R={total / R}")
    return RegionAreas(A=a_area, B=b_area, C=c_area, D=d_area, x=float(x), R=float(R))


def proof_side_coefficient(p: float, T: float, R: float) -> float:
    """Coefficient ``(R+1) / ((R-1)(R^{1-1/p}/T - 1))`` from the area chain.

    The geometric criterion is sufficient exactly when this is at most 1;
    it is reported alongside the simpler slope test for diagnostics.
    """
    denom = (R - 1.0) * (R ** (1.0 - 1.0 / p) / T - 1.0)
    if denom <= 0.0:
        return math.inf
    return (R + 1.0) / denom


def _regularity_ratio_sup(d: Distribution, p: float, n_delta: int, n_xy: int
                          ) -> tuple[float, tuple | None]:
    """Sup over a probe grid of ``|H*(dx)-H*(dy)| d^{1/p} / |H*(x)-H*(y)|``.

    Returns the sup and the argmax triple; the sup is ``inf`` when a level
    set of ``H*`` separates under scaling (flat denominator, moving
    numerator), which no finite modulus can bound.
    """
    deltas = np.geomspace(1e-3, 0.95, n_delta)
    xs = np.linspace(0.04, 0.96, n_xy)
    h = np.asarray(d.upper_quantile(xs), dtype=float)
    scaled = np.asarray(d.upper_quantile(np.outer(deltas, xs)), dtype=float)
    den = np.abs(h[:, None] - h[None, :])
    num = np.abs(scaled[:, :, None] - scaled[:, None, :])
    weight = deltas[:, None, None] ** (1.0 / p)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(den[None, :, :] > 0.0, num * weight / den[None, :, :],
                         np.where(num > 0.0, np.inf, 0.0))
    iu = np.triu_indices(n_xy, k=1)
    ratio = ratio[:, iu[0], iu[1]]
    k = int(np.argmax(ratio))
    sup = float(ratio.flat[k])
    di, pair = divmod(k, iu[0].size)
    witness = (float(deltas[di]), float(xs[iu[0][pair]]), float(xs[iu[1][pair]]))
    return sup, witness


def check_regularity(d: Distribution, p: float, *, grid: int = 20) -> RegularityParams:
    """Estimate the smallest workable regularity constant ``T`` for exponent ``p``.

    The scaling ratio is maximised over a ``grid**3`` probe set (geometric
    in the scale variable), then re-estimated on a refined grid; an
    estimate that is infinite or still growing under refinement raises
    ``NotRegularError``.
    """
    if not p > 1.0:
        raise DomainError("regularity exponent p must exceed 1")
    sup1, _ = _regularity_ratio_sup(d, p, grid, grid)
    sup2, witness = _regularity_ratio_sup(d, p, 2 * grid, 2 * grid)
    if not math.isfinite(sup2):
        raise NotRegularError(
            f"no finite regularity constant: level sets separate under scaling "
            f"near (delta, x, y) = {witness}", where=witness)
    if sup2 > 1.25 * max(sup1, 1.0) + 1e-9:
        raise NotRegularError(
            f"regularity estimate does not stabilise under grid refinement "
            f"({sup1} -> {sup2})", lhs=sup2, rhs=sup1, where=witness)
    return RegularityParams(p=float(p), T=max(1.0, sup2))


def derivative_conditions(d: Distribution, p: float, T: float, *,
                          grid: int = 20, fd_step: float = 1e-5) -> dict:
    """Finite-difference evidence for the sufficient derivative conditions.

    ``log_derivative_bound``: ``H''(t)/H'(t) <= (1 + 1/p)/(1 - t)``.
    ``derivative_scaling_bound``: ``H'(1 - delta(1-x)) <= T delta^{-1-1/p} H'(x)``.
    Only meaningful for smooth quantiles; results are evidence, not proof.
    """
    ts = np.linspace(0.05, 0.95, grid)
    h = fd_step

    def d1(u):
        return (np.asarray(d.quantile(u + h)) - np.asarray(d.quantile(u - h))) / (2 * h)

    def d2(u):
        return (np.asarray(d.quantile(u + h)) - 2 * np.asarray(d.quantile(u))
                + np.asarray(d.quantile(u - h))) / h ** 2

    h1 = d1(ts)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_deriv = d2(ts) / h1
    rhs = (1.0 + 1.0 / p) / (1.0 - ts)
    ii_ok = bool(np.all(log_deriv <= rhs * (1.0 + 1e-6) + 1e-6))

    deltas = np.linspace(0.05, 0.95, grid)
    args = 1.0 - np.outer(deltas, 1.0 - ts)
    lhs = d1(np.clip(args, 2 * h, 1.0 - 2 * h))
    rhs3 = T * deltas[:, None] ** (-1.0 - 1.0 / p) * h1[None, :]
    iii_ok = bool(np.all(lhs <= rhs3 * (1.0 + 1e-6) + 1e-6))
    return {"log_derivative_bound": ii_ok, "derivative_scaling_bound": iii_ok}


def geometric_criterion(d: Distribution, x: float, R: float,
                        reg: RegularityParams, *, confirm_tol: float = 1e-8) -> bool:
    """Slope test ``T <= (R - 1) R^{-1/p} / 2`` for the tail ratio hypothesis.

    Requires a convex quantile (probed through second differences) and the
    regularity modulus ``reg`` (probed on a coarse grid).  When the test
    passes, the implied area comparison ``D <= A`` is confirmed numerically
    at the given ``x`` before returning ``True``.
    """
    us = np.linspace(0.005, 0.995, 199)
    h = np.asarray(d.quantile(us), dtype=float)
    d2 = h[:-2] - 2.0 * h[1:-1] + h[2:]
    if float(d2.min()) < -1e-9:
        i = int(np.argmin(d2))
        raise HypothesisError(
            f"quantile function is not convex near u={us[i + 1]}",
            lhs=float(d2.min()), rhs=0.0, where=(float(us[i + 1]),))
    sup, witness = _regularity_ratio_sup(d, reg.p, 12, 12)
    if sup > reg.T * (1.0 + 1e-9) + 1e-12:
        raise HypothesisError(
            f"regularity modulus (p={reg.p}, T={reg.T}) fails on the probe grid "
            f"near (delta, x, y) = {witness}: ratio {sup}",
            lhs=sup, rhs=reg.T, where=witness)

    ok = reg.T <= (R - 1.0) * R ** (-1.0 / reg.p) / 2.0
    if ok:
        areas = region_areas(d, x, R)
        if areas.D > areas.A + confirm_tol * max(1.0, areas.A):
            raise NumericalError(
                f"criterion passed but area comparison fails at x={x}: "
                f"D={areas.D} > A={areas.A}")
    return ok


def kemperman_constant(r: float) -> float:
    """Sharp multiplicative tail constant ``(1 - 1/r)^{-r}``, with limit ``e``.

    Defined for ``r > 1``; pass ``math.inf`` for the limiting value.
    Strictly decreasing in ``r``.
    """
    if r == math.inf:
        return math.e
    if not r > 1.0:
        raise DomainError("tail exponent r must exceed 1")
    return math.exp(-r * math.log1p(-1.0 / r))


def lambda_r(r: float, x):
    """Power transform ``x^{-1/r}`` (or ``-ln x`` at ``r = inf``), with
    ``lambda_r(0) = inf``.  Defined for probabilities ``x`` in [0, 1]."""
    if not r > 0.0:
        raise DomainError("r must be positive")
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError("x must lie in [0, 1]")
    with np.errstate(divide="ignore"):
        if r == math.inf:
            out = -np.log(arr)
        else:
            out = np.power(arr, -1.0 / r)
    out = np.where(arr == 0.0, np.inf, out)
    return float(out) if scalar else out


def kemperman_criterion(d: Distribution, r: float, ts: Sequence[float]
                        ) -> ConvexityCheck:
    """Probe convexity of ``t -> lambda_r(P{Y >= t})`` on the given thresholds.

    Returns a boolean-like result; on failure the witness holds the first
    violating threshold triple.  Infinite values (empty tails) are allowed
    only at the top, where they preserve convexity.
    """
    lo, _ = d.support()
    if lo < -1e-12:
        raise PreconditionError("law must be supported on [0, inf)")
    t_arr = np.asarray(list(ts), dtype=float)
    if t_arr.size < 3:
        raise DomainError("need at least three thresholds")
    if np.any(np.diff(t_arr) <= 0.0):
        raise DomainError("thresholds must be strictly increasing")
    probs = 1.0 - np.asarray(d.cdf_left(t_arr), dtype=float)
    lam = lambda_r(r, np.clip(probs, 0.0, 1.0))
    finite = np.isfinite(lam)
    if np.any(~finite[:-1] & finite[1:]):  # a finite value after an infinite one
        return ConvexityCheck(ok=False, witness=None)
    t_f, lam_f = t_arr[finite], lam[finite]
    scale = max(1.0, float(np.abs(lam_f).max())) if lam_f.size else 1.0
    for i in range(lam_f.size - 2):
        left = (lam_f[i + 1] - lam_f[i]) / (t_f[i + 1] - t_f[i])
        right = (lam_f[i + 2] - lam_f[i + 1]) / (t_f[i + 2] - t_f[i + 1])
        if right < left - 1e-9 * scale:
            return ConvexityCheck(ok=False,
                                  witness=(float(t_f[i]), float(t_f[i + 1]),
                                           float(t_f[i + 2])))
    return ConvexityCheck(ok=True)
