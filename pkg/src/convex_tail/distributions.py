"""Univariate laws represented through their quantile functions.

Every distribution here exposes the same small set of primitives:

* ``quantile(x)``, the generalized inverse of the CDF, ``inf{t : F(t) >= x}``.
  It is non-decreasing and left continuous on (0,1), and as a random variable
  on the unit interval it has the law it describes.
* ``upper_quantile(x) = quantile(1-x)``, the decreasing view whose behaviour
  near ``x = 0`` is the upper tail.
* ``upper_tail_integral(x)``, the integral of the quantile over (x,1).  This
  single primitive drives conditional tail expectations, stop-loss values and
  averaged-quantile envelopes, so each kind implements it exactly (closed
  form, or exact summation for atomic kinds).  The generic fallback uses
  guarded adaptive quadrature and is what a custom subclass inherits.

Laws with an infinite upper-tail mean are rejected at construction; every
bound computed downstream assumes ``E max(0, Y)`` is finite.

Scalar arguments give floats back; numpy arrays are accepted everywhere and
give arrays back.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

from .errors import DomainError, EmptyTailError, SpecParseError
from .quadrature import quad_unit

__all__ = [
    "PROB_ATOL",
    "TailExpectation",
    "HingeFunction",
    "Distribution",
    "Normal",
    "Exponential",
    "Uniform",
    "Pareto",
    "LogNormal",
    "Empirical",
    "QuantileGrid",
    "AtomicMixture",
    "CollapsedTail",
    "parse_distribution",
]

# absolute tolerance below which a tail probability counts as empty
PROB_ATOL = 1e-12

_SQRT2PI = math.sqrt(2.0 * math.pi)


def _npdf(z):
    return np.exp(-0.5 * np.square(z)) / _SQRT2PI


def _as_float_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _ret(arr, scalar):
    return float(arr) if scalar else arr


def _check_prob_open(x, name="x"):
    arr, scalar = _as_float_array(x)
    if np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise DomainError(f"{name} must lie strictly inside (0, 1)")
    return arr, scalar


@dataclass(frozen=True)
class TailExpectation:
    """Conditional mean of the upper tail, ``E(Y | Y > s)`` or ``E(Y | Y >= s)``.

    ``value * tail_prob`` is the contribution of the tail to the mean.
    """

    s: float
    value: float
    tail_prob: float


@dataclass(frozen=True)
class HingeFunction:
    """The ray ``x -> max(0, a (x - t) + 1)`` with positive slope ``a``.

    The function vanishes left of the kink ``t - 1/a`` and equals 1 at ``t``.
    These rays are the extreme points of the non-negative non-decreasing
    convex cone, which is why optimal tail bounds are attained on them.
    """

    t: float
    a: float

    def __post_init__(self):
        if not self.a > 0.0:
            raise DomainError("hinge slope must be positive")

    @property
    def kink(self) -> float:
        return self.t - 1.0 / self.a

    def __call__(self, x):
        arr, scalar = _as_float_array(x)
        return _ret(np.maximum(0.0, self.a * (arr - self.t) + 1.0), scalar)


class Distribution(ABC):
    """Common interface of all law representations.

    Values are immutable after construction and all methods are pure, so
    instances can be shared freely across threads.
    """

    @abstractmethod
    def quantile(self, x):
        """Left-continuous quantile at ``x`` in (0,1)."""

    @abstractmethod
    def cdf(self, t):
        """Right-continuous distribution function ``P{Y <= t}``."""

    def cdf_left(self, t):
        """``P{Y < t}``.  Kinds with atoms must override."""
        return self.cdf(t)

    @abstractmethod
    def mean(self) -> float:
        ...

    @abstractmethod
    def support(self) -> tuple[float, float]:
        """Essential bounds of the law; entries may be infinite."""

    def is_non_atomic(self) -> bool:
        return not self.atoms()

    def atoms(self) -> list[tuple[float, float]]:
        """List of (value, mass) pairs; empty for continuous laws."""
        return []

    def upper_quantile(self, x):
        """``quantile(1-x)``, non-increasing in ``x``.

        The default computes ``1 - x`` directly, clamped to the largest
        double below 1, which is exact for laws whose quantile is constant
        on the top ``2**-53`` of mass (atomic tops, grid extensions).
        Parametric kinds override with cancellation-free formulas so deep
        tails (``x`` near 0) stay accurate.
        """
        arr, scalar = _check_prob_open(x)
        comp = np.minimum(1.0 - arr, 1.0 - 2.0 ** -53)
        return _ret(np.asarray(self.quantile(comp)), scalar)

    def upper_tail_integral(self, x):
        """Integral of the quantile function over (x, 1), for ``x`` in [0,1].

        Fallback implementation integrates the decreasing view over
        ``(0, 1-x)`` by guarded adaptive quadrature, so the improper
        endpoint sits at 0 where double precision can refine freely.
        Concrete kinds override with exact expressions.
        """
        arr, scalar = _as_float_array(x)
        if np.any(arr < 0.0) or np.any(arr > 1.0):
            raise DomainError("upper_tail_integral argument must lie in [0, 1]")
        flat = np.atleast_1d(arr)
        out = np.array([
            0.0 if xi >= 1.0 else
            quad_unit(lambda v: self.upper_quantile(v), 0.0, 1.0 - xi)
            for xi in flat
        ])
        return _ret(out.reshape(arr.shape) if not scalar else out[0], scalar)

    def upper_mean(self, x):
        """Average of the quantile over (x, 1): ``(1/(1-x)) int_x^1 H``.

        For a strictly increasing quantile this equals ``E(Y | Y > quantile(x))``
        and it is the sharp upper envelope for the quantile of any law
        dominated by this one in the increasing convex order.
        """
        arr, scalar = _check_prob_open(x)
        return _ret(np.asarray(self.upper_tail_integral(arr)) / (1.0 - arr), scalar)

    def tail_expectation(self, s: float, strict: bool = True) -> TailExpectation:
        """Conditional tail mean at threshold ``s``.

        ``strict`` selects the event {Y > s}; otherwise {Y >= s}.  The two
        differ only when there is an atom at ``s``.  Raises ``EmptyTailError``
        when the selected tail carries mass below ``PROB_ATOL``.
        """
        q = float(self.cdf(s)) if strict else float(self.cdf_left(s))
        p = 1.0 - q
        if p <= PROB_ATOL:
            op = ">" if strict else ">="
            raise EmptyTailError(f"event {{Y {op} {s}}} has no probability mass")
        return TailExpectation(s=float(s), value=float(self.upper_tail_integral(q)) / p,
                               tail_prob=p)

    def stop_loss(self, t):
        """Expected excess over ``t``: ``E max(Y - t, 0)``.

        Convex and non-increasing in ``t``; equal comparison of stop-loss
        values at every threshold characterises the increasing convex order.
        """
        arr, scalar = _as_float_array(t)
        q = np.clip(np.asarray(self.cdf(arr), dtype=float), 0.0, 1.0)
        u = np.asarray(self.upper_tail_integral(q), dtype=float)
        return _ret(np.maximum(u - arr * (1.0 - q), 0.0), scalar)

    def sample(self, n: int, seed: int) -> np.ndarray:
        """``n`` inverse-transform draws from a deterministic seeded stream."""
        if n < 1:
            raise DomainError("sample size must be at least 1")
        rng = np.random.default_rng(seed)
        u = rng.random(int(n))
        u[u == 0.0] = 2.0 ** -53
        return np.asarray(self.quantile(u), dtype=float)


# ---------------------------------------------------------------------------
# parametric kinds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Normal(Distribution):
    loc: float
    scale: float

    def __post_init__(self):
        if not self.scale > 0.0:
            raise DomainError("normal scale must be positive")

    def quantile(self, x):
        arr, scalar = _check_prob_open(x)
        return _ret(self.loc + self.scale * ndtri(arr), scalar)

    def upper_quantile(self, x):
        arr, scalar = _check_prob_open(x)
        return _ret(self.loc - self.scale * ndtri(arr), scalar)

    def cdf(self, t):
        arr, scalar = _as_float_array(t)
        return _ret(ndtr((arr - self.loc) / self.scale), scalar)

    def mean(self):
        return self.loc

    def support(self):
        return (-math.inf, math.inf)

    def upper_tail_integral(self, x):
        arr, scalar = _as_float_array(x)
        with np.errstate(divide="ignore"):
            z = ndtri(arr)
        return _ret(self.loc * (1.0 - arr) + self.scale * _npdf(z), scalar)

    def stop_loss(self, t):
        arr, scalar = _as_float_array(t)
        z = (arr - self.loc) / self.scale
        return _ret(self.scale * _npdf(z) - (arr - self.loc) * ndtr(-z), scalar)


@dataclass(frozen=True)
class Exponential(Distribution):
    rate: float

    def __post_init__(self):
        if not self.rate > 0.0:
            raise DomainError("exponential rate must be positive")

    def quantile(self, x):
        arr, scalar = _check_prob_open(x)
        return _ret(-np.log1p(-arr) / self.rate, scalar)

    def upper_quantile(self, x):
        arr, scalar = _check_prob_open(x)
        return _ret(-np.log(arr) / self.rate, scalar)

    def cdf(self, t):
        arr, scalar = _as_float_array(t)
        return _ret(np.where(arr < 0.0, 0.0, -np.expm1(-self.rate * np.maximum(arr, 0.0))),
                    scalar)

    def mean(self):
        return 1.0 / self.rate

    def support(self):
        return (0.0, math.inf)

    def upper_tail_integral(self, x):
        arr, scalar = _as_float_array(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            val = (1.0 - arr) * (1.0 - np.log1p(-arr)) / self.rate
        return _ret(np.where(arr >= 1.0, 0.0, val), scalar)

    def stop_loss(self, t):
        arr, scalar = _as_float_array(t)
        below = 1.0 / self.rate - arr
        above = np.exp(-self.rate * np.maximum(arr, 0.0)) / self.rate
        return _ret(np.where(arr <= 0.0, below, above), scalar)


@dataclass(frozen=True)
class Uniform(Distribution):
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise DomainError("uniform bounds must satisfy lo < hi")

    def quantile(self, x):
        arr, scalar = _check_prob_open(x)
        return _ret(self.lo + (self.hi - self.lo) * arr, scalar)

    def upper_quantile(self, x):
        arr, scalar = _check_prob_open(x)
        return _ret(self.hi - (self.hi - self.lo) * arr, scalar)

    def cdf(self, t):
        arr, scalar = _as_float_array(t)
        return _ret(np.clip((arr - self.lo) / (self.hi - self.lo), 0.0, 1.0), scalar)

    def mean(self):
        return 0.5 * (self.lo + self.hi)

    def support(self):
        return (self.lo, self.hi)

    def upper_tail_integral(self, x):
        arr, scalar = _as_float_array(x)
        w = self.hi - self.lo
        return _ret(self.lo * (1.0 - arr) + 0.5 * w * (1.0 - np.square(arr)), scalar)

    def stop_loss(self, t):
        arr, scalar = _as_float_array(t)
        w = self.hi - self.lo
        mid = np.square(self.hi - np.clip(arr, self.lo, self.hi)) / (2.0 * w)
        return _ret(np.where(arr <= self.lo, self.mean() - arr, mid), scalar)


@dataclass(frozen=True)
class Pareto(Distribution):
    """Power tail ``P{Y > t} = (t / scale) ** -exponent`` for ``t >= scale``.

    Requires ``exponent > 1`` so that the upper-tail mean is finite.
    """

    exponent: float
    scale: float = 1.0

    def __post_init__(self):
        if not self.exponent > 1.0:
            raise DomainError("pareto exponent must exceed 1 for a finite upper-tail mean")
        if not self.scale > 0.0:
            raise DomainError("pareto scale must be positive")

    def quantile(self, x):
        arr, scalar = _check_prob_open(x)
        return _ret(self.scale * np.exp(-np.log1p(-arr) / self.exponent), scalar)

    def upper_quantile(self, x):
        arr, scalar = _check_prob_open(x)
        return _ret(self.scale * np.power(arr, -1.0 / self.exponent), scalar)

    def cdf(self, t):
        arr, scalar = _as_float_array(t)
        safe = np.maximum(arr, self.scale)
        val = -np.expm1(self.exponent * np.log(self.scale / safe))
        return _ret(np.where(arr < self.scale, 0.0, val), scalar)

    def mean(self):
        return self.scale * self.exponent / (self.exponent - 1.0)

    def support(self):
        return (self.scale, math.inf)

    def upper_tail_integral(self, x):
        arr, scalar = _as_float_array(x)
        r = self.exponent
        return _ret(self.scale * r / (r - 1.0) * np.power(1.0 - arr, 1.0 - 1.0 / r),
                    scalar)

    def stop_loss(self, t):
        arr, scalar = _as_float_array(t)
        r = self.exponent
        safe = np.maximum(arr, self.scale)
        above = self.scale * np.power(self.scale / safe, r - 1.0) / (r - 1.0)
        return _ret(np.where(arr <= self.scale, self.mean() - arr, above), scalar)


@dataclass(frozen=True)
class LogNormal(Distribution):
    mu: float
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0.0:
            raise DomainError("lognormal sigma must be positive")

    def quantile(self, x):
        arr, scalar = _check_prob_open(x)
        return _ret(np.exp(self.mu + self.sigma * ndtri(arr)), scalar)

    def upper_quantile(self, x):
        arr, scalar = _check_prob_open(x)
        return _ret(np.exp(self.mu - self.sigma * ndtri(arr)), scalar)

    def cdf(self, t):
        arr, scalar = _as_float_array(t)
        safe = np.where(arr > 0.0, arr, 1.0)
        val = ndtr((np.log(safe) - self.mu) / self.sigma)
        return _ret(np.where(arr <= 0.0, 0.0, val), scalar)

    def mean(self):
        return math.exp(self.mu + 0.5 * self.sigma ** 2)

    def support(self):
        return (0.0, math.inf)

    def upper_tail_integral(self, x):
        arr, scalar = _as_float_array(x)
        with np.errstate(divide="ignore"):
            z = ndtri(arr)
        return _ret(self.mean() * ndtr(self.sigma - z), scalar)

    def stop_loss(self, t):
        arr, scalar = _as_float_array(t)
        safe = np.where(arr > 0.0, arr, 1.0)
        z = (np.log(safe) - self.mu) / self.sigma
        above = self.mean() * ndtr(self.sigma - z) - safe * ndtr(-z)
        return _ret(np.where(arr <= 0.0, self.mean() - arr, above), scalar)


# ---------------------------------------------------------------------------
# data-backed kinds
# ---------------------------------------------------------------------------


class Empirical(Distribution):
    """Left-continuous step quantile through the order statistics.

    ``quantile(x)`` equals the j-th order statistic for ``x`` in
    ``((j-1)/n, j/n]``, matching the inf definition of the generalized
    inverse.  All tail functionals are exact finite sums.
    """

    def __init__(self, values):
        v = np.sort(np.asarray(values, dtype=float))
        if v.size == 0:
            raise DomainError("empirical law needs at least one value")
        if not np.all(np.isfinite(v)):
            raise DomainError("empirical values must be finite")
        self._v = v
        self._n = v.size
        # suffix[k] = sum of values k..n-1
        self._suffix = np.concatenate([np.cumsum(v[::-1])[::-1], [0.0]])

    def quantile(self, x):
        arr, scalar = _check_prob_open(x)
        idx = np.ceil(arr * self._n).astype(np.int64) - 1
        idx = np.clip(idx, 0, self._n - 1)
        return _ret(self._v[idx], scalar)

    def cdf(self, t):
        arr, scalar = _as_float_array(t)
        return _ret(np.searchsorted(self._v, arr, side="right") / self._n, scalar)

    def cdf_left(self, t):
        arr, scalar = _as_float_array(t)
        return _ret(np.searchsorted(self._v, arr, side="left") / self._n, scalar)

    def mean(self):
        return float(np.mean(self._v))

    def support(self):
        return (float(self._v[0]), float(self._v[-1]))

    def atoms(self):
        vals, counts = np.unique(self._v, return_counts=True)
        return [(float(v), float(c) / self._n) for v, c in zip(vals, counts)]

    def is_non_atomic(self):
        return False

    def upper_tail_integral(self, x):
        arr, scalar = _as_float_array(x)
        pos = arr * self._n
        j0 = np.ceil(pos).astype(np.int64)
        j0 = np.clip(j0, 0, self._n)
        partial = np.where(j0 >= 1,
                           self._v[np.clip(j0 - 1, 0, self._n - 1)] * (j0 / self._n - arr),
                           0.0)
        return _ret((self._suffix[np.minimum(j0, self._n)] / self._n) + partial, scalar)

    def stop_loss(self, t):
        arr, scalar = _as_float_array(t)
        k = np.searchsorted(self._v, arr, side="right")
        return _ret((self._suffix[k] - arr * (self._n - k)) / self._n, scalar)


class AtomicMixture(Distribution):
    """Finite discrete law given as (value, probability) pairs.

    Probabilities must be positive and sum to 1 within ``PROB_ATOL``.
    Duplicate values are merged.  Stored sorted by value.
    """

    def __init__(self, pairs):
        pairs = list(pairs)
        if not pairs:
            raise DomainError("atomic mixture needs at least one atom")
        v = np.asarray([p[0] for p in pairs], dtype=float)
        p = np.asarray([p[1] for p in pairs], dtype=float)
        if np.any(p <= 0.0):
            raise DomainError("atom probabilities must be positive")
        if abs(float(np.sum(p)) - 1.0) > PROB_ATOL:
            raise DomainError("atom probabilities must sum to 1 within 1e-12")
        if not (np.all(np.isfinite(v)) and np.all(np.isfinite(p))):
            raise DomainError("atoms must be finite")
        order = np.argsort(v, kind="stable")
        v, p = v[order], p[order]
        keep_v, keep_p = [v[0]], [p[0]]
        for vi, pi in zip(v[1:], p[1:]):
            if vi == keep_v[-1]:
                keep_p[-1] += pi
            else:
                keep_v.append(vi)
                keep_p.append(pi)
        self._v = np.asarray(keep_v)
        self._p = np.asarray(keep_p)
        self._cum = np.cumsum(self._p)
        self._suffix_ev = np.concatenate([np.cumsum((self._v * self._p)[::-1])[::-1], [0.0]])
        self._suffix_p = np.concatenate([np.cumsum(self._p[::-1])[::-1], [0.0]])

    def quantile(self, x):
        arr, scalar = _check_prob_open(x)
        idx = np.searchsorted(self._cum, arr, side="left")
        idx = np.clip(idx, 0, self._v.size - 1)
        return _ret(self._v[idx], scalar)

    def cdf(self, t):
        arr, scalar = _as_float_array(t)
        k = np.searchsorted(self._v, arr, side="right")
        out = np.where(k == 0, 0.0, self._cum[np.maximum(k - 1, 0)])
        return _ret(np.minimum(out, 1.0), scalar)

    def cdf_left(self, t):
        arr, scalar = _as_float_array(t)
        k = np.searchsorted(self._v, arr, side="left")
        out = np.where(k == 0, 0.0, self._cum[np.maximum(k - 1, 0)])
        return _ret(np.minimum(out, 1.0), scalar)

    def mean(self):
        return float(np.dot(self._v, self._p))

    def support(self):
        return (float(self._v[0]), float(self._v[-1]))

    def atoms(self):
        return [(float(v), float(p)) for v, p in zip(self._v, self._p)]

    def is_non_atomic(self):
        return False

    def upper_tail_integral(self, x):
        arr, scalar = _as_float_array(x)
        j = np.searchsorted(self._cum, arr, side="left")
        j = np.clip(j, 0, self._v.size - 1)
        # full atoms above j plus the part of atom j lying above x
        partial = self._v[j] * np.maximum(self._cum[j] - np.maximum(arr, 0.0), 0.0)
        out = np.where(arr >= 1.0, 0.0, self._suffix_ev[j + 1] + partial)
        return _ret(out, scalar)

    def stop_loss(self, t):
        arr, scalar = _as_float_array(t)
        k = np.searchsorted(self._v, arr, side="right")
        return _ret(self._suffix_ev[k] - arr * self._suffix_p[k], scalar)

    def spec_string(self) -> str:
        """Spec-grammar form ``atoms:v1:p1,v2:p2,...`` with full precision."""
        return "atoms:" + ",".join(
            f"{v:.17g}:{p:.17g}" for v, p in zip(self._v, self._p))


class QuantileGrid(Distribution):
    """Piecewise-linear quantile through strictly ordered knots in (0,1).

    Queries outside the knot span extend the boundary segments linearly,
    which keeps the quantile monotone and the tail integral finite.  Flat
    interior runs represent atoms; jumps are not representable (a piecewise
    linear function is continuous), so gaps in the support are filled by
    steep ramps when a grid is built from data.
    """

    INTERPOLATIONS = ("linear",)

    def __init__(self, xs, hs, interpolation: str = "linear"):
        if interpolation not in self.INTERPOLATIONS:
            raise DomainError(f"unsupported interpolation rule {interpolation!r}")
        xs = np.asarray(xs, dtype=float)
        hs = np.asarray(hs, dtype=float)
        if xs.size < 2 or xs.shape != hs.shape:
            raise DomainError("quantile grid needs at least two (x, H) knots")
        if np.any(xs <= 0.0) or np.any(xs >= 1.0) or np.any(np.diff(xs) <= 0.0):
            raise DomainError("grid abscissas must be strictly increasing inside (0, 1)")
        if np.any(np.diff(hs) < 0.0):
            raise DomainError("grid ordinates must be non-decreasing")
        if not np.all(np.isfinite(hs)):
            raise DomainError("grid ordinates must be finite")
        self.interpolation = interpolation
        s_lo = (hs[1] - hs[0]) / (xs[1] - xs[0])
        s_hi = (hs[-1] - hs[-2]) / (xs[-1] - xs[-2])
        self._bu = np.concatenate([[0.0], xs, [1.0]])
        self._bh = np.concatenate([[hs[0] - s_lo * xs[0]], hs,
                                   [hs[-1] + s_hi * (1.0 - xs[-1])]])
        widths = np.diff(self._bu)
        areas = 0.5 * (self._bh[:-1] + self._bh[1:]) * widths
        self._suffix_area = np.concatenate([np.cumsum(areas[::-1])[::-1], [0.0]])
        if not math.isfinite(self._suffix_area[0]):
            raise DomainError("grid tail integral does not converge")

    def quantile(self, x):
        arr, scalar = _check_prob_open(x)
        return _ret(np.interp(arr, self._bu, self._bh), scalar)

    def cdf(self, t):
        return self._invert(t, side="right")

    def cdf_left(self, t):
        return self._invert(t, side="left")

    def _invert(self, t, side):
        arr, scalar = _as_float_array(t)
        j = np.searchsorted(self._bh, arr, side=side)
        j = np.clip(j, 0, self._bh.size - 1)
        lo_h = self._bh[np.maximum(j - 1, 0)]
        lo_u = self._bu[np.maximum(j - 1, 0)]
        dh = self._bh[j] - lo_h
        du = self._bu[j] - lo_u
        with np.errstate(divide="ignore", invalid="ignore"):
            frac = np.where(dh > 0.0, (arr - lo_h) / dh, 0.0)
        inner = lo_u + np.clip(frac, 0.0, 1.0) * du
        if side == "right":
            at_top = arr >= self._bh[-1]
        else:
            at_top = arr > self._bh[-1]
        out = np.where(arr < self._bh[0], 0.0, np.where(at_top, 1.0, inner))
        return _ret(np.clip(out, 0.0, 1.0), scalar)

    def mean(self):
        return float(self._suffix_area[0])

    def support(self):
        return (float(self._bh[0]), float(self._bh[-1]))

    def atoms(self):
        out = []
        run_start = 0
        bh, bu = self._bh, self._bu
        for i in range(1, bh.size):
            if bh[i] != bh[run_start]:
                if bu[i - 1] > bu[run_start]:
                    out.append((float(bh[run_start]), float(bu[i - 1] - bu[run_start])))
                run_start = i
        if bu[-1] > bu[run_start]:
            out.append((float(bh[run_start]), float(bu[-1] - bu[run_start])))
        return out

    def is_non_atomic(self):
        return bool(np.all(np.diff(self._bh) > 0.0))

    def upper_tail_integral(self, x):
        arr, scalar = _as_float_array(x)
        i = np.searchsorted(self._bu, arr, side="right") - 1
        i = np.clip(i, 0, self._bu.size - 2)
        hx = np.interp(arr, self._bu, self._bh)
        partial = 0.5 * (hx + self._bh[i + 1]) * (self._bu[i + 1] - arr)
        out = np.where(arr >= 1.0, 0.0, partial + self._suffix_area[i + 1])
        return _ret(out, scalar)


class CollapsedTail(Distribution):
    """A base law with its upper tail beyond ``cut`` collapsed to one atom.

    The atom sits at the conditional mean ``E(Y | Y >= cut)`` and carries the
    whole tail mass, so ``P{X >= atom_value} = P{Y >= cut}`` holds exactly by
    construction while Jensen's inequality keeps the collapsed law dominated
    by the base law against every convex test function.
    """

    def __init__(self, base: Distribution, cut: float):
        q = float(base.cdf_left(cut))
        te = base.tail_expectation(cut, strict=False)  # raises on empty tail
        self.base = base
        self.cut = float(cut)
        self.atom_value = te.value
        self.atom_prob = te.tail_prob
        self._q = q

    def quantile(self, x):
        arr, scalar = _check_prob_open(x)
        flat = np.atleast_1d(arr)
        out = np.full(flat.shape, self.atom_value)
        mask = flat <= self._q
        if np.any(mask):
            out[mask] = np.asarray(self.base.quantile(flat[mask]))
        out = out.reshape(arr.shape)
        return _ret(out, scalar)

    def cdf(self, t):
        arr, scalar = _as_float_array(t)
        base = np.minimum(np.asarray(self.base.cdf(arr), dtype=float), self._q)
        out = np.where(arr >= self.atom_value, 1.0,
                       np.where(arr >= self.cut, self._q, base))
        return _ret(out, scalar)

    def cdf_left(self, t):
        arr, scalar = _as_float_array(t)
        base = np.minimum(np.asarray(self.base.cdf_left(arr), dtype=float), self._q)
        out = np.where(arr > self.atom_value, 1.0,
                       np.where(arr > self.cut, self._q, base))
        return _ret(out, scalar)

    def mean(self):
        return float(self.upper_tail_integral(0.0))

    def support(self):
        return (self.base.support()[0], self.atom_value)

    def atoms(self):
        kept = [(v, p) for v, p in self.base.atoms() if v < self.cut]
        return kept + [(self.atom_value, self.atom_prob)]

    def is_non_atomic(self):
        return False

    def upper_tail_integral(self, x):
        arr, scalar = _as_float_array(x)
        ub = np.asarray(self.base.upper_tail_integral(np.minimum(arr, self._q)),
                        dtype=float)
        uq = float(self.base.upper_tail_integral(self._q))
        below = ub - uq + self.atom_prob * self.atom_value
        above = (1.0 - arr) * self.atom_value
        return _ret(np.where(arr >= self._q, above, below), scalar)


# ---------------------------------------------------------------------------
# spec-string parsing (CLI grammar)
# ---------------------------------------------------------------------------


def _floats(body: str, n: int, spec: str) -> list[float]:
    parts = body.split(",")
    if len(parts) != n:
        raise SpecParseError(f"{spec!r}: expected {n} comma-separated numbers")
    try:
        return [float(p) for p in parts]
    except ValueError as exc:
        raise SpecParseError(f"{spec!r}: {exc}") from None


def _read_numeric_rows(path: str, spec: str) -> list[list[float]]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
    except OSError as exc:
        raise SpecParseError(f"{spec!r}: cannot read {path}: {exc}") from None
    rows = []
    for i, ln in enumerate(lines):
        cells = [c for c in ln.replace(";", ",").split(",") if c != ""]
        try:
            rows.append([float(c) for c in cells])
        except ValueError:
            if i == 0:
                continue  # tolerate a single header line
            raise SpecParseError(f"{spec!r}: non-numeric row {i + 1} in {path}") from None
    if not rows:
        raise SpecParseError(f"{spec!r}: no numeric rows in {path}")
    return rows


def parse_distribution(spec: str) -> Distribution:
    """Build a distribution from its CLI spec string.

    Grammar: ``normal:M,S`` ``exp:RATE`` ``uniform:LO,HI`` ``pareto:R,SCALE``
    ``lognormal:MU,SIGMA`` ``empirical:@file.csv`` (one value per line)
    ``grid:@file.csv`` (rows ``x,H(x)``) ``atoms:v1:p1,v2:p2,...``.
    """
    if ":" not in spec:
        raise SpecParseError(f"{spec!r}: expected KIND:ARGS")
    kind, body = spec.split(":", 1)
    kind = kind.lower()
    if kind == "normal":
        m, s = _floats(body, 2, spec)
        return Normal(m, s)
    if kind == "exp":
        (rate,) = _floats(body, 1, spec)
        return Exponential(rate)
    if kind == "uniform":
        lo, hi = _floats(body, 2, spec)
        return Uniform(lo, hi)
    if kind == "pareto":
        r, scale = _floats(body, 2, spec)
        return Pareto(r, scale)
    if kind == "lognormal":
        mu, sigma = _floats(body, 2, spec)
        return LogNormal(mu, sigma)
    if kind == "empirical":
        if not body.startswith("@"):
            raise SpecParseError(f"{spec!r}: empirical expects @file")
        rows = _read_numeric_rows(body[1:], spec)
        return Empirical([r[0] for r in rows])
    if kind == "grid":
        if not body.startswith("@"):
            raise SpecParseError(f"{spec!r}: grid expects @file")
        rows = _read_numeric_rows(body[1:], spec)
        if any(len(r) < 2 for r in rows):
            raise SpecParseError(f"{spec!r}: grid rows need two columns x,H(x)")
        return QuantileGrid([r[0] for r in rows], [r[1] for r in rows])
    if kind == "atoms":
        pairs = []
        for chunk in body.split(","):
            bits = chunk.split(":")
            if len(bits) != 2:
                raise SpecParseError(f"{spec!r}: atom {chunk!r} is not value:prob")
            try:
                pairs.append((float(bits[0]), float(bits[1])))
            except ValueError as exc:
                raise SpecParseError(f"{spec!r}: {exc}") from None
        return AtomicMixture(pairs)
    raise SpecParseError(f"{spec!r}: unknown distribution kind {kind!r}")
