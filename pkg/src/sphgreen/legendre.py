"""Legendre polynomials P_l by upward three-term recurrence.

The recurrence (l+1) P_{l+1} = (2l+1) x P_l - l P_{l-1} is forward-stable on
[-1, 1] for every degree used here, so no asymptotic formulas are needed.
Sweeps return all degrees at once because every consumer sums over l; a
constant-memory streaming variant covers very large degree counts.

Evaluation is generic over the scalar kernel: pass a float for the double
path or a highprec.DDReal for the extended-precision path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .highprec import DDReal

ARG_SLACK = 1e-14


class ArgOutOfRange(ValueError):
    """|x| beyond 1 within rounding slack."""


@dataclass(frozen=True)
class LegendreSweep:
    """P_0(x) .. P_L(x); values is a float64 array or a list of DDReal."""

    x: object
    values: object

    def __len__(self):
        return len(self.values)


@njit(cache=True)
def _fill_double(x, out):
    out[0] = 1.0
    if out.shape[0] > 1:
        out[1] = x
    pm, pc = 1.0, x
    for l in range(1, out.shape[0] - 1):
        pn = ((2 * l + 1) * x * pc - l * pm) / (l + 1)
        out[l + 1] = pn
        pm, pc = pc, pn


def legendre_all(x, L: int) -> LegendreSweep:
    """All P_l(x) for 0 <= l <= L.

    Parameters
    ----------
    x : float or DDReal, |x| <= 1 (+ rounding slack)
    L : highest degree, >= 0
    """
    if L < 0:
        raise ValueError("degree limit must be >= 0")
    xf = float(x)
    if abs(xf) > 1.0 + ARG_SLACK:
        raise ArgOutOfRange(f"|x| = {abs(xf)} exceeds 1")
    if isinstance(x, DDReal):
        values = [DDReal(1.0)]
        if L >= 1:
            values.append(x)
        for l in range(1, L):
            pn = ((2 * l + 1) * x * values[l] - l * values[l - 1]) / (l + 1)
            values.append(pn)
        return LegendreSweep(x, values)
    out = np.empty(L + 1)
    _fill_double(xf, out)
    return LegendreSweep(xf, out)


def legendre_stream(x: float, l_max: int | None = None):
    """Yield P_0(x), P_1(x), ... one at a time in constant memory."""
    x = float(x)
    if abs(x) > 1.0 + ARG_SLACK:
        raise ArgOutOfRange(f"|x| = {abs(x)} exceeds 1")
    pm = 1.0
    yield pm
    if l_max is not None and l_max < 1:
        return
    pc = x
    yield pc
    l = 1
    while l_max is None or l < l_max:
        pm, pc = pc, ((2 * l + 1) * x * pc - l * pm) / (l + 1)
        l += 1
        yield pc


def generating_function_check(x: float, u: float, L: int) -> float:
    """|sum_{l<=L} u^l P_l(x) - (u^2 - 2xu + 1)^(-1/2)|.

    Requires |u| < 1 strictly so the tail is geometric.
    """
    if not abs(u) < 1.0:
        raise ValueError(f"|u| = {abs(u)} must be < 1")
    vals = legendre_all(float(x), L).values
    powers = u ** np.arange(L + 1)
    closed = 1.0 / math.sqrt(u * u - 2.0 * float(x) * u + 1.0)
    return abs(float(powers @ vals) - closed)


def partial_sum_bound_scan(x: float, N: int) -> float:
    """Running maximum of |sum_{l<=n} P_l(x)| over n <= N."""
    vals = legendre_all(float(x), N).values
    return float(np.abs(np.cumsum(vals)).max())
