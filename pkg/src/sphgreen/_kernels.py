"""Compiled inner loops for the Legendre series evaluators.

The split-sum kernels accumulate

    S = sum_{l=1}^{l'-1} b_l P_l(x),   b_l = (2l+1) w / (l(l+1) (l(l+1)+w)),

where b_l is the (negated) bracket coefficient of the singularity-extracted
series.  The extended-precision kernel runs the Legendre recurrence and the
coefficients in double-double arithmetic while b_l is large, then hands the
recurrence over to plain doubles once b_l < dd_cut; every term is still
folded into a double-double accumulator, so accumulation never loses digits.
Truncation indexes routinely reach 1e6..1e8, which is why this lives behind
numba.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .highprec import (
    add_dd_d as _add_dd_d,
    add_dd_dd as _add_dd_dd,
    div_dd_d as _div_dd_d,
    div_dd_dd as _div_dd_dd,
    mul_dd_d as _mul_dd_d,
    mul_dd_dd as _mul_dd_dd,
)

# switch from double-double to double recurrence once b_l drops below this;
# the remaining terms are so small that double term values cannot disturb
# the accumulated sum beyond ~1e-22 absolute
DD_CUT = 1e-10


@njit(cache=True)
def bracket_coeff(l, w):
    """b_l in doubles; l passed as float so l(l+1) stays exact-enough."""
    u = l * (l + 1.0)
    return (2.0 * l + 1.0) * w / (u * (u + w))


@njit(cache=True)
def split_sum_dd(x_hi, x_lo, w_hi, w_lo, l_prime, dd_cut):
    """S as an (hi, lo) pair for the dd evaluation path.

    The argument cos(gamma) arrives as a dd pair so the caller can hand in
    the exact complement of its 1 - cos(gamma) value; series and log term
    then describe the same angle to dd precision.
    """
    acc_h, acc_l = 0.0, 0.0
    if l_prime <= 1:
        return acc_h, acc_l
    # double-double section
    pm_h, pm_l = 1.0, 0.0      # P_0
    pc_h, pc_l = x_hi, x_lo    # P_1
    l = 1
    while l < l_prime:
        lf = float(l)
        u = lf * (lf + 1.0)
        nh, nl = _mul_dd_d(w_hi, w_lo, 2.0 * lf + 1.0)
        th, tl = _add_dd_d(w_hi, w_lo, u)
        dh, dl = _mul_dd_d(th, tl, u)
        bh, bl = _div_dd_dd(nh, nl, dh, dl)
        if bh < dd_cut:
            break
        th, tl = _mul_dd_dd(bh, bl, pc_h, pc_l)
        acc_h, acc_l = _add_dd_dd(acc_h, acc_l, th, tl)
        # advance recurrence
        ah, al = _mul_dd_dd(pc_h, pc_l, x_hi, x_lo)
        ah, al = _mul_dd_d(ah, al, 2.0 * lf + 1.0)
        sh, sl = _mul_dd_d(pm_h, pm_l, lf)
        ah, al = _add_dd_dd(ah, al, -sh, -sl)
        ph, pl = _div_dd_d(ah, al, lf + 1.0)
        pm_h, pm_l = pc_h, pc_l
        pc_h, pc_l = ph, pl
        l += 1
    # double section, dd accumulation
    w = w_hi + w_lo
    x = x_hi + x_lo
    pm = pm_h + pm_l
    pc = pc_h + pc_l
    while l < l_prime:
        lf = float(l)
        b = bracket_coeff(lf, w)
        acc_h, acc_l = _add_dd_d(acc_h, acc_l, b * pc)
        pm, pc = pc, ((2.0 * lf + 1.0) * x * pc - lf * pm) / (lf + 1.0)
        l += 1
    return acc_h, acc_l


@njit(cache=True)
def split_sum_dd_snapshots(x_hi, x_lo, w_hi, w_lo, snap_ls, l_prime, dd_cut):
    """Like split_sum_dd but records the accumulator after each term l in
    snap_ls (sorted ascending).  Returns (snap_hi, snap_lo, final_hi, final_lo).
    """
    n_snap = snap_ls.shape[0]
    snap_hi = np.zeros(n_snap)
    snap_lo = np.zeros(n_snap)
    k = 0
    acc_h, acc_l = 0.0, 0.0
    while k < n_snap and snap_ls[k] < 1:
        k += 1
    pm_h, pm_l = 1.0, 0.0
    pc_h, pc_l = x_hi, x_lo
    l = 1
    while l < l_prime:
        lf = float(l)
        u = lf * (lf + 1.0)
        nh, nl = _mul_dd_d(w_hi, w_lo, 2.0 * lf + 1.0)
        th, tl = _add_dd_d(w_hi, w_lo, u)
        dh, dl = _mul_dd_d(th, tl, u)
        bh, bl = _div_dd_dd(nh, nl, dh, dl)
        if bh < dd_cut:
            break
        th, tl = _mul_dd_dd(bh, bl, pc_h, pc_l)
        acc_h, acc_l = _add_dd_dd(acc_h, acc_l, th, tl)
        if k < n_snap and l == snap_ls[k]:
            snap_hi[k] = acc_h
            snap_lo[k] = acc_l
            k += 1
        ah, al = _mul_dd_dd(pc_h, pc_l, x_hi, x_lo)
        ah, al = _mul_dd_d(ah, al, 2.0 * lf + 1.0)
        sh, sl = _mul_dd_d(pm_h, pm_l, lf)
        ah, al = _add_dd_dd(ah, al, -sh, -sl)
        ph, pl = _div_dd_d(ah, al, lf + 1.0)
        pm_h, pm_l = pc_h, pc_l
        pc_h, pc_l = ph, pl
        l += 1
    w = w_hi + w_lo
    x = x_hi + x_lo
    pm = pm_h + pm_l
    pc = pc_h + pc_l
    while l < l_prime:
        lf = float(l)
        b = bracket_coeff(lf, w)
        acc_h, acc_l = _add_dd_d(acc_h, acc_l, b * pc)
        if k < n_snap and l == snap_ls[k]:
            snap_hi[k] = acc_h
            snap_lo[k] = acc_l
            k += 1
        pm, pc = pc, ((2.0 * lf + 1.0) * x * pc - lf * pm) / (lf + 1.0)
        l += 1
    return snap_hi, snap_lo, acc_h, acc_l


@njit(cache=True)
def split_sum_double(x, w, l_prime):
    """Double-term S, ascending l, compensated accumulator.

    Term values are plain doubles; compensating the running sum costs a few
    flops and keeps the drift over 1e6..1e8 additions below a final ulp,
    which the split/direct consistency checks rely on.
    """
    acc_h, acc_l = 0.0, 0.0
    if l_prime <= 1:
        return acc_h
    pm, pc = 1.0, x
    for l in range(1, l_prime):
        lf = float(l)
        acc_h, acc_l = _add_dd_d(acc_h, acc_l, bracket_coeff(lf, w) * pc)
        pm, pc = pc, ((2.0 * lf + 1.0) * x * pc - lf * pm) / (lf + 1.0)
    return acc_h + acc_l


@njit(cache=True)
def split_sum_double_many(xs, w, l_prime):
    """S for a batch of cos(gamma) lanes sharing one truncation index."""
    n = xs.shape[0]
    acc_h = np.zeros(n)
    acc_l = np.zeros(n)
    if l_prime <= 1:
        return acc_h
    pm = np.ones(n)
    pc = xs.copy()
    for l in range(1, l_prime):
        lf = float(l)
        b = bracket_coeff(lf, w)
        c1 = 2.0 * lf + 1.0
        inv = 1.0 / (lf + 1.0)
        for i in range(n):
            acc_h[i], acc_l[i] = _add_dd_d(acc_h[i], acc_l[i], b * pc[i])
            pn = (c1 * xs[i] * pc[i] - lf * pm[i]) * inv
            pm[i] = pc[i]
            pc[i] = pn
    return acc_h + acc_l


@njit(cache=True)
def direct_sum_double(x, w, l_trunc):
    """D = sum_{l=0}^{l_trunc} (2l+1)/(l(l+1)+w) P_l(x).

    Terms are double precision but the accumulator is compensated: the
    direct route routinely needs 1e6..1e7 terms, where a plain running sum
    would drift by ~n*eps and bury the convergence behaviour under noise.
    """
    acc_h, acc_l = 1.0 / w, 0.0
    if l_trunc < 1:
        return acc_h
    pm, pc = 1.0, x
    for l in range(1, l_trunc + 1):
        lf = float(l)
        term = (2.0 * lf + 1.0) / (lf * (lf + 1.0) + w) * pc
        acc_h, acc_l = _add_dd_d(acc_h, acc_l, term)
        pm, pc = pc, ((2.0 * lf + 1.0) * x * pc - lf * pm) / (lf + 1.0)
    return acc_h + acc_l


@njit(cache=True)
def trajectory_crossings(x, w, target, tol, l_max, direct):
    """Convergence bookkeeping for partial sums against a converged target.

    Scans truncation indexes n = 1..l_max of the direct sum D_n (direct=True)
    or the split bracket sum S_n (direct=False) and returns
    (first_within, last_outside): the first n with |sum_n - target| <= tol
    and the last n with |sum_n - target| > tol (0 / -1 when never).
    Compensated accumulation; a plain sum's drift would swamp tol levels
    near 1e-12 over 1e7 terms.
    """
    first_within = 0
    last_outside = -1
    pm, pc = 1.0, x
    if direct:
        acc_h, acc_l = 1.0 / w, 0.0
    else:
        acc_h, acc_l = 0.0, 0.0
    d = abs(acc_h + acc_l - target)
    if d <= tol:
        first_within = 1
    else:
        last_outside = 1
    for l in range(1, l_max):
        lf = float(l)
        if direct:
            term = (2.0 * lf + 1.0) / (lf * (lf + 1.0) + w) * pc
        else:
            term = bracket_coeff(lf, w) * pc
        acc_h, acc_l = _add_dd_d(acc_h, acc_l, term)
        n = l + 1
        d = abs(acc_h + acc_l - target)
        if d <= tol:
            if first_within == 0:
                first_within = n
        else:
            last_outside = n
        pm, pc = pc, ((2.0 * lf + 1.0) * x * pc - lf * pm) / (lf + 1.0)
    return first_within, last_outside


@njit(cache=True)
def bracket_sum_at_unity(w, eps):
    """sum_{l>=1} b_l (i.e. P_l == 1), truncated at b_l < eps.

    This is the gamma -> 0 limit of the screened-minus-log part of the
    kernel, used for quadrature self-terms.
    """
    acc_h, acc_l = 0.0, 0.0
    l = 1.0
    b = bracket_coeff(l, w)
    while b >= eps:
        acc_h, acc_l = _add_dd_d(acc_h, acc_l, b)
        l += 1.0
        b = bracket_coeff(l, w)
    return acc_h + acc_l
