"""Series evaluation of the screened-Poisson kernel on the shell.

Two routes share the machinery:

* direct:  G = -(1/4pi) sum_{l=0}^{l'} (2l+1)/(l(l+1)+w) P_l(cos gamma)
* split:   G = -gs^2/(4pi) + (1/4pi) sum_{l=1}^{l'-1} b_l P_l(cos gamma)
              + (1/4pi) log((e/2)(1 - cos gamma)),
           b_l = (2l+1) w / (l(l+1)(l(l+1)+w)),  w = 1/gs^2

with gs the characteristic angle.  The split form subtracts the unscreened
log kernel series, so its coefficients decay like l^-3 instead of l^-1 and
the log singularity is carried by the closed form.  b_l is the magnitude of
the usual bracket coefficient; the identity
(2l+1)/(l(l+1)+w) - (2l+1)/(l(l+1)) = -b_l is exact, and the factored form
avoids subtracting two nearly equal fractions.

The extended-precision path keeps every cancellation-prone piece in
double-double: the bracket sum (see _kernels), the l = 0 term, and the log
term, which is computed from gamma at 40 significant digits and rounded to
a double-double pair.  The series argument is the exact dd complement
1 - one_minus_cos, so series and log term describe the same angle: the
evaluation error then scales with the kernel's own derivative instead of
with the (hugely magnified) sensitivity of either piece alone, which keeps
the relative error near machine level even where |G| has decayed by tens
of orders.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np

from . import _kernels
from .geometry import COINCIDENT_COS_TOL, EvalPoint, ShellParams
from .highprec import DDReal, LOG_E_HALF, PI_DD, two_prod, two_sum

FOUR_PI = 4.0 * math.pi


class Singular(ArithmeticError):
    """Central angle inside the coincidence tolerance: the kernel diverges."""


@dataclass(frozen=True, slots=True)
class GreenResult:
    """Kernel value plus evaluation diagnostics.

    terms_used is the truncation index: for the split routes the bracket sum
    spans l = 1 .. terms_used-1, for the direct route terms_used series terms
    were summed.  est_error is the magnitude of the first omitted series
    coefficient; a decay heuristic, not a bound.
    """

    value: float
    method: str
    terms_used: int
    est_error: float


@dataclass(frozen=True, slots=True)
class TruncationPolicy:
    """Either a fixed truncation index or a coefficient cutoff."""

    mode: str
    l_prime: int = 0
    epsilon: float = 0.0

    @classmethod
    def fixed(cls, l_prime: int) -> "TruncationPolicy":
        if l_prime < 1:
            raise ValueError("fixed truncation index must be >= 1")
        return cls("fixed", l_prime=int(l_prime))

    @classmethod
    def auto(cls, epsilon: float) -> "TruncationPolicy":
        if not epsilon > 0.0:
            raise ValueError("coefficient cutoff must be > 0")
        return cls("auto", epsilon=float(epsilon))


def choose_truncation(eps: float, gamma_star: float) -> int:
    """Smallest useful truncation index for a bracket-coefficient cutoff.

    Starts from the asymptotic estimate l' ~ (2/(eps gs^2))^(1/3) and walks
    upward until b_l' <= eps; the estimate is asymptotic, not exact.
    """
    if not eps > 0.0 or not gamma_star > 0.0:
        raise ValueError("eps and gamma_star must be positive")
    w = 1.0 / (gamma_star * gamma_star)
    l_prime = max(1, math.ceil((2.0 * w / eps) ** (1.0 / 3.0)))
    while _kernels.bracket_coeff(float(l_prime), w) > eps:
        l_prime += 1
    return l_prime


def _check_point(p: EvalPoint):
    if p.one_minus_cos <= COINCIDENT_COS_TOL:
        raise Singular(f"1 - cos(gamma) = {p.one_minus_cos} below tolerance")


def g_star(p: EvalPoint) -> float:
    """Unscreened (log) kernel: (1/4pi) log((e/2)(1 - cos gamma))."""
    _check_point(p)
    return (1.0 + math.log(0.5 * p.one_minus_cos)) / FOUR_PI


def green_direct(params: ShellParams, p: EvalPoint, l_trunc: int) -> GreenResult:
    """Truncated direct series."""
    _check_point(p)
    if l_trunc < 0:
        raise ValueError("truncation degree must be >= 0")
    s = _kernels.direct_sum_double(p.cos_gamma, params.w, l_trunc)
    lf = float(l_trunc + 1)
    omitted = (2.0 * lf + 1.0) / (lf * (lf + 1.0) + params.w)
    return GreenResult(-s / FOUR_PI, "direct", l_trunc + 1, omitted)


def _w_dd(params: ShellParams) -> DDReal:
    r2 = DDReal(*two_prod(params.radius_km, params.radius_km))
    l2 = DDReal(*two_prod(params.rossby_km, params.rossby_km))
    return r2 / l2


def _log_kernel_dd(p: EvalPoint) -> DDReal:
    """log((e/2)(1 - cos gamma)) as a double-double.

    Evaluated from the stored double 1 - cos(gamma) at 40 digits, so it
    describes exactly the same angle as the series argument 1 - one_minus_cos;
    any inconsistency between the two would surface as an absolute error of
    order ulp/(4 pi), burying the kernel's deep exponential tail.  The
    exactly representable cases cos gamma = -1 and 0 short-circuit to dd
    constants.
    """
    if p.cos_gamma == -1.0:
        return DDReal(1.0)
    if p.cos_gamma == 0.0:
        return LOG_E_HALF
    with mp.workdps(40):
        v = 1 + mp.log(mp.mpf(p.one_minus_cos) / 2)
        hi = float(v)
        lo = float(v - hi)
    return DDReal(hi, lo)


def _resolve_l_prime(policy: TruncationPolicy | None, gamma_star: float) -> int:
    if policy is None:
        policy = TruncationPolicy.auto(1e-14)
    if policy.mode == "fixed":
        return policy.l_prime
    if policy.mode == "auto":
        return choose_truncation(policy.epsilon, gamma_star)
    raise ValueError(f"unknown truncation mode {policy.mode!r}")


def green_split(
    params: ShellParams,
    p: EvalPoint,
    policy: TruncationPolicy | None = None,
    precision: str = "double",
) -> GreenResult:
    """Split (singularity-extracted) series evaluation.

    precision "double" sums in plain doubles; "dd" runs the bracket sum,
    the l = 0 term and the log term in double-double, which is what defeats
    the cancellation between the log term and the sum once the result is
    many orders below either piece.
    """
    _check_point(p)
    l_prime = _resolve_l_prime(policy, params.gamma_star)
    omitted = _kernels.bracket_coeff(float(l_prime), params.w)
    if precision == "double":
        s = _kernels.split_sum_double(1.0 - p.one_minus_cos, params.w, l_prime)
        gs2 = params.gamma_star * params.gamma_star
        log_term = 1.0 + math.log(0.5 * p.one_minus_cos)
        value = (s + log_term - gs2) / FOUR_PI
        return GreenResult(value, "split", l_prime, omitted)
    if precision == "dd":
        wdd = _w_dd(params)
        xh, xl = two_sum(1.0, -p.one_minus_cos)  # exact dd complement
        s = DDReal(*_kernels.split_sum_dd(xh, xl, wdd.hi, wdd.lo,
                                          l_prime, _kernels.DD_CUT))
        gs2 = 1.0 / wdd
        g = (s + _log_kernel_dd(p) - gs2) / (4.0 * PI_DD)
        return GreenResult(float(g), "split_dd", l_prime, omitted)
    raise ValueError(f"unknown precision {precision!r}")


def split_values(params: ShellParams, one_minus_cos: np.ndarray, eps: float = 1e-14) -> np.ndarray:
    """Double-precision split values for a batch of angles.

    one_minus_cos carries the angles as 1 - cos(gamma), which preserves
    relative precision for small separations; all lanes share the truncation
    index implied by eps.
    """
    omc = np.asarray(one_minus_cos, dtype=float)
    if np.any(omc <= COINCIDENT_COS_TOL) or np.any(omc > 2.0):
        raise Singular("batch contains angles outside the evaluable range")
    l_prime = choose_truncation(eps, params.gamma_star)
    s = _kernels.split_sum_double_many(1.0 - omc, params.w, l_prime)
    gs2 = params.gamma_star * params.gamma_star
    return (s + (1.0 + np.log(0.5 * omc)) - gs2) / FOUR_PI


def screened_minus_log_limit(params: ShellParams, eps: float = 1e-14) -> float:
    """Finite gamma -> 0+ limit of (screened kernel - log kernel)."""
    s = _kernels.bracket_sum_at_unity(params.w, eps)
    gs2 = params.gamma_star * params.gamma_star
    return (s - gs2) / FOUR_PI


def error_curve(
    params: ShellParams,
    p: EvalPoint,
    l_max: int,
    n_points: int = 60,
    eps_ref: float | None = None,
) -> np.ndarray:
    """|G_ref - G_l| versus truncation index l, log-spaced up to l_max.

    The reference uses the same dd machinery with a truncation index a few
    times past l_max (eps_ref defaults to b_(l_max)/100, i.e. ~4.6x l_max),
    which puts the reference tail two orders below the smallest plotted
    error.  Because the closed-form pieces cancel exactly in G_ref - G_l,
    the curve is just the double-double bracket-sum difference over 4 pi.
    """
    _check_point(p)
    if l_max < 2:
        raise ValueError("l_max must be >= 2")
    if eps_ref is None:
        eps_ref = _kernels.bracket_coeff(float(l_max), params.w) / 100.0
    l_ref = choose_truncation(eps_ref, params.gamma_star)
    ls = np.unique(
        np.round(np.logspace(0.0, math.log10(l_max), n_points)).astype(np.int64)
    )
    wdd = _w_dd(params)
    xh, xl = two_sum(1.0, -p.one_minus_cos)
    snap_h, snap_l, ref_h, ref_l = _kernels.split_sum_dd_snapshots(
        xh, xl, wdd.hi, wdd.lo, ls - 1, max(l_ref, l_max + 1), _kernels.DD_CUT
    )
    ref = DDReal(ref_h, ref_l)
    errs = np.empty(ls.shape[0])
    for i in range(ls.shape[0]):
        errs[i] = abs(float(ref - DDReal(snap_h[i], snap_l[i]))) / FOUR_PI
    return np.column_stack((ls.astype(float), errs))


def loglog_slope(curve: np.ndarray, l_lo: float, l_hi: float) -> float:
    """Least-squares log-log slope of an error curve over [l_lo, l_hi].

    Points driven to zero (or many decades under the local trend) by the
    oscillation of P_l sit far off the decay envelope; one refit pass drops
    anything more than 1.5 decades below the first fit.
    """
    pts = curve[(curve[:, 0] >= l_lo) & (curve[:, 0] <= l_hi) & (curve[:, 1] > 0.0)]
    if pts.shape[0] < 5:
        raise ValueError("need at least 5 positive points to fit a slope")
    lx, ly = np.log10(pts[:, 0]), np.log10(pts[:, 1])
    slope, intercept = np.polyfit(lx, ly, 1)
    keep = ly > slope * lx + intercept - 1.5
    if keep.sum() >= 5 and keep.sum() < pts.shape[0]:
        slope, intercept = np.polyfit(lx[keep], ly[keep], 1)
    return float(slope)


def convergence_crossings(
    params: ShellParams,
    p: EvalPoint,
    reference: float,
    tol: float,
    l_max: int,
    method: str = "split",
) -> tuple[int, int]:
    """(first_within, last_outside) truncation indexes for |G_l - reference| <= tol.

    first_within is the first index whose partial value is inside tol;
    last_outside the last index outside it (sustained convergence starts one
    past it).  reference must be a converged kernel value for this angle.
    """
    _check_point(p)
    if method == "direct":
        target = -FOUR_PI * reference
        direct = True
    elif method == "split":
        gs2 = params.gamma_star * params.gamma_star
        log_term = 1.0 + math.log(0.5 * p.one_minus_cos)
        target = FOUR_PI * reference + gs2 - log_term
        direct = False
    else:
        raise ValueError("method must be 'direct' or 'split'")
    return _kernels.trajectory_crossings(
        1.0 - p.one_minus_cos, params.w, target, FOUR_PI * tol, l_max, direct
    )
