"""Scalar root-finding and 1-D maximization used across the toolkit.

Bisection only, by design: every caller verifies its bracket by endpoint
evaluation first, so convergence is unconditional and tolerance semantics
stay explicit.
"""
from __future__ import annotations

from typing import Callable

from .errors import BracketError

_GOLDEN = 0.6180339887498949  # (sqrt(5) - 1) / 2


def bisect_root(f: Callable[[float], float], lo: float, hi: float, *,
                xtol: float, max_iter: int = 200) -> float:
    """Root of f on [lo, hi] to absolute tolerance xtol on x.

    Endpoints with f == 0 are returned directly; otherwise f(lo) and f(hi)
    must have opposite signs.
    """
    flo = f(lo)
    if flo == 0.0:
        return lo
    fhi = f(hi)
    if fhi == 0.0:
        return hi
    if (flo < 0.0) == (fhi < 0.0):
        raise BracketError(
            f"no sign change on [{lo:.6e}, {hi:.6e}] (f = {flo:.6e}, {fhi:.6e})")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if (hi - lo) <= xtol or mid == lo or mid == hi:
            return mid
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if (fmid < 0.0) == (flo < 0.0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def bisect_monotone(f: Callable[[float], float], lo: float, hi: float, *,
                    ytol: float, xtol: float = 0.0, max_iter: int = 200) -> float:
    """Root of a monotone f, iterated until |f(mid)| <= ytol (or xtol on x).

    Used by the calibration inverses, whose tolerance is stated on the
    target quantity rather than on the parameter.
    """
    flo = f(lo)
    if abs(flo) <= ytol:
        return lo
    fhi = f(hi)
    if abs(fhi) <= ytol:
        return hi
    if (flo < 0.0) == (fhi < 0.0):
        raise BracketError(
            f"no sign change on [{lo:.6e}, {hi:.6e}] (f = {flo:.6e}, {fhi:.6e})")
    mid = 0.5 * (lo + hi)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if abs(fmid) <= ytol or (xtol > 0.0 and (hi - lo) <= xtol):
            return mid
        if mid == lo or mid == hi:
            return mid
        if (fmid < 0.0) == (flo < 0.0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return mid


def golden_max(f: Callable[[float], float], lo: float, hi: float, *,
               rtol: float) -> tuple[float, float]:
    """Maximum of a unimodal f on [lo, hi] to relative x tolerance rtol."""
    a, b = lo, hi
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    while (b - a) > rtol * (abs(a) + abs(b)) * 0.5:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
    x = 0.5 * (a + b)
    return x, f(x)
