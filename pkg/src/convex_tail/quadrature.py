"""Adaptive quadrature over sub-intervals of (0,1) with endpoint guards.

Quantile functions are finite on the open unit interval but may blow up at
either end while staying integrable, so plain adaptive quadrature up to the
endpoint is not safe.  ``quad_unit`` integrates the interior with
Gauss-Kronrod refinement (scipy's QUADPACK) and approaches an improper
endpoint through dyadic shells, ``1 - 2**-k`` on the right and ``2**-k`` on
the left, up to ``k = MAX_DYADIC_LEVEL``.  Whatever remains beyond the last
shell is handed to QUADPACK's own endpoint extrapolation and accepted only
if its reported error is negligible; otherwise the integral is declared
non-convergent.  Integrable power singularities pass; barely integrable
log-type tails are refused rather than silently truncated.

Coordinates matter at the right endpoint: values of ``1 - u`` lose all
precision once ``u`` is within ``2**-53`` of 1, so a singularity at 1 can
only be resolved to about 1e-8 absolute.  Tail integrals of quantile
functions should therefore be computed in the reflected variable
``v = 1 - u``, where the improper endpoint sits at 0 and the full dynamic
range of doubles is available; that is what
``Distribution.upper_tail_integral`` does.
"""

from __future__ import annotations

import math
from typing import Callable

from scipy import integrate

from .errors import NumericalError

DEFAULT_RTOL = 1e-10
MAX_DYADIC_LEVEL = 60

# start shells at least this deep so the bulk panel is well separated
_FIRST_LEVEL = 4

# integrands are never evaluated outside this closed sub-interval of (0,1)
_U_MIN = 1e-300
_U_MAX = 1.0 - 2.0 ** -53


def _quad(f: Callable[[float], float], a: float, b: float, rtol: float,
          ) -> tuple[float, float]:
    if b <= a:
        return 0.0, 0.0
    out = integrate.quad(f, a, b, epsabs=0.0, epsrel=max(rtol, 1e-13),
                         limit=200, full_output=1)
    return float(out[0]), float(out[1])


def quad_unit(f: Callable[[float], float], a: float, b: float,
              rtol: float = DEFAULT_RTOL) -> float:
    """Integrate ``f`` over ``(a, b)`` with ``0 <= a < b <= 1``.

    ``a == 0`` and ``b == 1`` are treated as improper endpoints; the
    integrand is only ever evaluated strictly inside (0,1).  Raises
    ``NumericalError`` when an improper endpoint cannot be resolved to the
    requested relative tolerance.
    """
    if not 0.0 <= a < b <= 1.0:
        raise NumericalError(f"integration bounds ({a}, {b}) not inside [0, 1]")

    def fs(u: float) -> float:
        return f(min(max(u, _U_MIN), _U_MAX))

    left_guard = a == 0.0
    right_guard = b == 1.0

    lo, hi = a, b
    if left_guard:
        lo = min(2.0 ** -_FIRST_LEVEL, b / 2.0)
    if right_guard:
        hi = max(1.0 - 2.0 ** -_FIRST_LEVEL, (1.0 + a) / 2.0)
    if hi < lo:
        mid = 0.5 * (a + b)
        lo = hi = mid

    total, _ = _quad(fs, lo, hi, rtol)
    if right_guard:
        total += _guarded_tail(fs, hi, rtol, total, upper=True)
    if left_guard:
        total += _guarded_tail(fs, lo, rtol, total, upper=False)
    return total


def _guarded_tail(f, edge: float, rtol: float, bulk: float, upper: bool) -> float:
    """Shells from ``edge`` toward 1 (upper) or 0 (lower), plus a validated
    extrapolation pass over whatever the shells leave behind."""
    gap = 1.0 - edge if upper else edge
    k = max(_FIRST_LEVEL, int(round(-math.log2(gap))))
    # right-side shell edges 1 - 2**-k stop being representable near k = 53
    deepest = min(MAX_DYADIC_LEVEL, 50) if upper else MAX_DYADIC_LEVEL
    acc = 0.0
    prev = edge
    while k < deepest:
        k += 1
        nxt = 1.0 - 2.0 ** -k if upper else 2.0 ** -k
        piece, _ = _quad(f, min(prev, nxt), max(prev, nxt), rtol)
        acc += piece
        prev = nxt
        if abs(piece) <= rtol * max(abs(bulk + acc), 1e-300):
            break
    lo, hi = (prev, 1.0) if upper else (0.0, prev)
    residual, err = _quad(f, lo, hi, rtol)
    scale = max(abs(bulk + acc + residual), abs(residual), 1e-300)
    if err > 100.0 * rtol * scale and err > 1e-250:
        raise NumericalError(
            "endpoint contribution beyond the dyadic shells could not be "
            f"resolved (estimated error {err:g}); the integral diverges or "
            "converges too slowly for double precision")
    return acc + residual
